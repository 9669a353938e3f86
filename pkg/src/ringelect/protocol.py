"""Protocol core: the three mechanized variants of Peterson's ring election.

States are immutable values.  ``step`` runs one atomic statement of one
process; a process whose guard fails stutters.  The byte-level kernels in
``_kernel_py``/``_kernel`` implement the same tables over encoded states and
are checked against :func:`step` by the test suite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

from . import _layout as L
from .errors import DuplicateUid, EmptyRing, IndexOutOfRange, InvalidUid


class Variant(enum.Enum):
    GENERAL = "general"
    MODIFIED = "modified"
    EXTRA = "extra"

    @property
    def code(self) -> int:
        return _VARIANT_CODES[self]

    def capacity(self, n: int) -> int:
        """Inbox capacity: a FIFO of ``n`` for General, one slot otherwise."""
        return L.inbox_capacity(self.code, n)

    @classmethod
    def parse(cls, name: str) -> "Variant":
        try:
            return _VARIANT_ALIASES[name.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown variant {name!r}") from None


_VARIANT_CODES = {
    Variant.GENERAL: L.VARIANT_GENERAL,
    Variant.MODIFIED: L.VARIANT_MODIFIED,
    Variant.EXTRA: L.VARIANT_EXTRA,
}
_VARIANT_ALIASES = {
    "general": Variant.GENERAL,
    "alg2": Variant.GENERAL,
    "modified": Variant.MODIFIED,
    "alg3": Variant.MODIFIED,
    "extra": Variant.EXTRA,
    "extramodified": Variant.EXTRA,
    "extra-modified": Variant.EXTRA,
    "alg4": Variant.EXTRA,
}


class Mode(enum.IntEnum):
    ACTIVE = L.MODE_ACTIVE
    RELAY = L.MODE_RELAY


class Pc(enum.IntEnum):
    S0 = L.PC_S0
    S1 = L.PC_S1
    S2 = L.PC_S2
    S3 = L.PC_S3
    S4 = L.PC_S4
    S5 = L.PC_S5
    LEAD = L.PC_LEAD


PC_VALUES = {
    Variant.GENERAL: (Pc.S0, Pc.S1, Pc.S2, Pc.S3, Pc.S4, Pc.LEAD),
    Variant.MODIFIED: (Pc.S0, Pc.S1, Pc.S2, Pc.S3, Pc.S4, Pc.S5, Pc.LEAD),
    Variant.EXTRA: (Pc.S0, Pc.S2, Pc.S3, Pc.S4, Pc.LEAD),
}


@dataclass(frozen=True)
class LocalState:
    """One ring node.  ``id2``/``id3`` are ``None`` when unset; ``inbox``
    holds pending messages oldest first (at most one for slot variants)."""

    vid: int
    mode: Mode = Mode.ACTIVE
    pc: Pc = Pc.S0
    id2: Optional[int] = None
    id3: Optional[int] = None
    inbox: tuple = ()


@dataclass(frozen=True)
class GlobalState:
    nodes: tuple

    @property
    def n(self) -> int:
        return len(self.nodes)

    def successor(self, i: int) -> int:
        return (i + 1) % len(self.nodes)

    def __getitem__(self, i: int) -> LocalState:
        return self.nodes[i]


class Outcome(enum.Enum):
    PROGRESS = "progress"
    STUTTER = "stutter"
    OVERFLOW = "overflow"


class StepResult(NamedTuple):
    outcome: Outcome
    next: Optional[GlobalState] = None


# Atomic propositions over a global state.


@dataclass(frozen=True)
class IsLeader:
    node: int

    def __str__(self):
        return f"leader({self.node})"


@dataclass(frozen=True)
class VidEquals:
    node: int
    value: int

    def __str__(self):
        return f"vid({self.node})={self.value}"


@dataclass(frozen=True)
class ModeIs:
    node: int
    mode: Mode

    def __str__(self):
        return f"mode({self.node})={self.mode.name.lower()}"


@dataclass(frozen=True)
class Quiescent:
    def __str__(self):
        return "quiescent"


Atom = (IsLeader, VidEquals, ModeIs, Quiescent)


def validate_uids(uids: Sequence[int]) -> tuple:
    uids = tuple(int(u) for u in uids)
    if not uids:
        raise EmptyRing("a ring needs at least one node")
    if len(uids) > L.MAX_RING:
        raise InvalidUid(f"ring size {len(uids)} exceeds {L.MAX_RING}")
    for u in uids:
        if not 0 <= u <= L.MAX_UID:
            raise InvalidUid(f"uid {u} outside [0, {L.MAX_UID}]")
    if len(set(uids)) != len(uids):
        seen = set()
        dup = next(u for u in uids if u in seen or seen.add(u))
        raise DuplicateUid(f"uid {dup} appears more than once")
    return uids


def initial_state(variant: Variant, uids: Sequence[int]) -> GlobalState:
    uids = validate_uids(uids)
    return GlobalState(tuple(LocalState(vid=u) for u in uids))


def _check_index(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexOutOfRange(f"process index {i} outside [0, {n - 1}]")


def step(variant: Variant, g: GlobalState, i: int, clear_temps: bool = True) -> StepResult:
    """Execute one atomic statement of process ``i``."""
    n = g.n
    _check_index(i, n)
    if g.nodes[i].pc is Pc.LEAD:
        return StepResult(Outcome.STUTTER)
    j = (i + 1) % n
    cap = variant.capacity(n)
    nodes = list(g.nodes)

    def me():
        return nodes[i]

    def update(**fields):
        nodes[i] = replace(nodes[i], **fields)

    def has_input():
        return bool(nodes[i].inbox)

    def next_free():
        return len(nodes[j].inbox) < cap

    def take():
        head, *rest = nodes[i].inbox
        nodes[i] = replace(nodes[i], inbox=tuple(rest))
        return head

    def send(value):
        nodes[j] = replace(nodes[j], inbox=nodes[j].inbox + (value,))

    def decide():
        cur = me()
        if cur.id2 > max(cur.vid, cur.id3):
            update(vid=cur.id2)
        else:
            update(mode=Mode.RELAY)
        if clear_temps:
            update(id2=None, id3=None)
        update(pc=Pc.S0)

    stutter = StepResult(Outcome.STUTTER)
    overflow = StepResult(Outcome.OVERFLOW)
    cur = me()

    if variant is Variant.GENERAL:
        if cur.mode is Mode.RELAY:
            if not has_input():
                return stutter
            m = take()
            if not next_free():
                return overflow
            send(m)
        elif cur.pc is Pc.S0:
            if not next_free():
                return overflow
            send(cur.vid)
            update(pc=Pc.S1)
        elif cur.pc is Pc.S1:
            if not has_input():
                return stutter
            update(id2=take(), pc=Pc.S2)
        elif cur.pc is Pc.S2:
            if cur.vid == cur.id2:
                update(pc=Pc.LEAD)
            else:
                if not next_free():
                    return overflow
                send(cur.id2)
                update(pc=Pc.S3)
        elif cur.pc is Pc.S3:
            if not has_input():
                return stutter
            update(id3=take(), pc=Pc.S4)
        elif cur.pc is Pc.S4:
            decide()
        else:
            return stutter
        return StepResult(Outcome.PROGRESS, GlobalState(tuple(nodes)))

    # Single-slot variants: sends block until the successor's slot is empty.
    if cur.mode is Mode.RELAY:
        if variant is Variant.EXTRA:
            if not has_input() or not next_free():
                return stutter
            send(take())
        elif cur.pc is Pc.S0:
            if not has_input():
                return stutter
            update(vid=take(), pc=Pc.S1)
        else:
            if not next_free():
                return stutter
            send(cur.vid)
            update(pc=Pc.S0)
    elif cur.pc is Pc.S0:
        if not next_free():
            return stutter
        send(cur.vid)
        update(pc=Pc.S2)
    elif cur.pc is Pc.S2:
        if not has_input():
            return stutter
        update(id2=take(), pc=Pc.S3)
    elif cur.pc is Pc.S3:
        if cur.vid == cur.id2:
            update(pc=Pc.LEAD)
        else:
            if not next_free():
                return stutter
            send(cur.id2)
            update(pc=Pc.S4)
    elif cur.pc is Pc.S4:
        if not has_input():
            return stutter
        update(id3=take())
        if variant is Variant.EXTRA:
            decide()
        else:
            update(pc=Pc.S5)
    elif cur.pc is Pc.S5 and variant is Variant.MODIFIED:
        decide()
    else:
        return stutter
    return StepResult(Outcome.PROGRESS, GlobalState(tuple(nodes)))


def successors(variant: Variant, g: GlobalState, clear_temps: bool = True) -> list:
    """One ``(label, target)`` pair per process, in label order.

    Stutters are self-loops (``target is g``); an overflowing send yields
    ``Outcome.OVERFLOW`` as the target.
    """
    out = []
    for i in range(g.n):
        res = step(variant, g, i, clear_temps)
        if res.outcome is Outcome.PROGRESS:
            out.append((i, res.next))
        elif res.outcome is Outcome.STUTTER:
            out.append((i, g))
        else:
            out.append((i, Outcome.OVERFLOW))
    return out


def leader_set(g: GlobalState) -> frozenset:
    return frozenset(i for i, node in enumerate(g.nodes) if node.pc is Pc.LEAD)


def atom_eval(g: GlobalState, atom, variant: Optional[Variant] = None) -> bool:
    """Truth of an atomic proposition in ``g``.

    ``Quiescent`` depends on the step table, so it needs ``variant``.
    """
    if isinstance(atom, Quiescent):
        if variant is None:
            raise TypeError("Quiescent needs the protocol variant")
        return all(step(variant, g, i).outcome is Outcome.STUTTER for i in range(g.n))
    _check_index(atom.node, g.n)
    node = g.nodes[atom.node]
    if isinstance(atom, IsLeader):
        return node.pc is Pc.LEAD
    if isinstance(atom, VidEquals):
        return node.vid == atom.value
    if isinstance(atom, ModeIs):
        return node.mode is atom.mode
    raise TypeError(f"not an atom: {atom!r}")


def _opt(v):
    return L.UNSET if v is None else v


def canonical_encode(variant: Variant, g: GlobalState) -> bytes:
    """Injective byte encoding for a fixed (variant, n); see ``_layout``."""
    n = g.n
    cap = variant.capacity(n)
    out = bytearray([n])
    for node in g.nodes:
        box = list(node.inbox)
        out += bytes([node.vid, int(node.mode), int(node.pc), _opt(node.id2), _opt(node.id3), len(box)])
        out += bytes(box + [L.UNSET] * (cap - len(box)))
    return bytes(out)


def is_error_code(data: bytes) -> bool:
    return data[0] == L.ERROR_FILL


def decode(variant: Variant, data: bytes) -> GlobalState:
    """Inverse of :func:`canonical_encode`."""
    if is_error_code(data):
        raise ValueError("the overflow error state has no node structure")
    n = data[0]
    cap = variant.capacity(n)
    width = L.F_BUF + cap
    nodes = []
    for i in range(n):
        r = data[1 + i * width: 1 + (i + 1) * width]
        length = r[L.F_LEN]
        nodes.append(
            LocalState(
                vid=r[L.F_VID],
                mode=Mode(r[L.F_MODE]),
                pc=Pc(r[L.F_PC]),
                id2=None if r[L.F_ID2] == L.UNSET else r[L.F_ID2],
                id3=None if r[L.F_ID3] == L.UNSET else r[L.F_ID3],
                inbox=tuple(r[L.F_BUF: L.F_BUF + length]),
            )
        )
    return GlobalState(tuple(nodes))
