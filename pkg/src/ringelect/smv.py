"""SMV model export.

Each variant's step table is written once, as data (:data:`STEP_ROWS`).
The same rows render the ``case`` arms of the emitted model and can be
evaluated against a :class:`~ringelect.protocol.LocalState`, which is how
the tests tie the text to ``protocol.step``.

Inbox encoding: slot variants pass two integer variables per node (its own
slot ``myinput`` and the successor's ``nextinput``, ``-1`` meaning empty).
The FIFO variant keeps ``n`` cells per inbox plus a read index advanced by
the owner, a write index advanced by the predecessor, and an occupancy
count; a send into a full inbox moves the sender to state ``ovf``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .protocol import PC_VALUES, GlobalState, LocalState, Mode, Pc, Variant, validate_uids

EMPTY = -1


@dataclass(frozen=True)
class Row:
    """One guarded atomic statement.

    ``guard`` is a conjunction of condition names (see :func:`_cond_text`).
    ``sets`` assigns local variables from value names; ``pop`` consumes the
    head of the own inbox; ``push`` names the value sent to the successor.
    """

    name: str
    guard: Tuple[str, ...]
    sets: Tuple[Tuple[str, str], ...] = ()
    pop: bool = False
    push: Optional[str] = None


def _decide_rows(prefix, pc, extra_guard=(), id3="id3", pop=False):
    win = "win_head" if id3 == "head" else "win"
    keep_id3 = "head" if id3 == "head" else "id3"
    return [
        Row(f"{prefix}w", ("active", pc) + extra_guard + (win,),
            (("vid", "id2"), ("state", "s0"), ("id2", "unset?id2"), ("id3", f"unset?{keep_id3}")), pop=pop),
        Row(f"{prefix}l", ("active", pc) + extra_guard + (f"not_{win}",),
            (("mode", "relay"), ("state", "s0"), ("id2", "unset?id2"), ("id3", f"unset?{keep_id3}")), pop=pop),
    ]


_SLOT_ACTIVE = [
    Row("A0", ("active", "s0", "next_free"), (("state", "s2"),), push="vid"),
    Row("A2", ("active", "s2", "has_input"), (("id2", "head"), ("state", "s3")), pop=True),
    Row("A3a", ("active", "s3", "vid_eq_id2"), (("state", "lead"),)),
    Row("A3b", ("active", "s3", "vid_ne_id2", "next_free"), (("state", "s4"),), push="id2"),
]

STEP_ROWS = {
    Variant.GENERAL: [
        Row("R0", ("relay", "s0", "has_input"), pop=True, push="head"),
        Row("A0", ("active", "s0"), (("state", "s1"),), push="vid"),
        Row("A1", ("active", "s1", "has_input"), (("id2", "head"), ("state", "s2")), pop=True),
        Row("A2a", ("active", "s2", "vid_eq_id2"), (("state", "lead"),)),
        Row("A2b", ("active", "s2", "vid_ne_id2"), (("state", "s3"),), push="id2"),
        Row("A3", ("active", "s3", "has_input"), (("id3", "head"), ("state", "s4")), pop=True),
        *_decide_rows("A4", "s4"),
    ],
    Variant.MODIFIED: [
        Row("R0", ("relay", "s0", "has_input"), (("vid", "head"), ("state", "s1")), pop=True),
        Row("R1", ("relay", "s1", "next_free"), (("state", "s0"),), push="vid"),
        *_SLOT_ACTIVE,
        Row("A4", ("active", "s4", "has_input"), (("id3", "head"), ("state", "s5")), pop=True),
        *_decide_rows("A5", "s5"),
    ],
    Variant.EXTRA: [
        Row("R0", ("relay", "has_input", "next_free"), pop=True, push="head"),
        *_SLOT_ACTIVE,
        *_decide_rows("A4", "s4", ("has_input",), id3="head", pop=True),
    ],
}

_PC_NAMES = {pc: pc.name.lower() for pc in Pc}


# Python-side evaluation of rows, used to check the table against protocol.step.


def row_enabled(row: Row, node: LocalState, next_len: int, cap: int) -> bool:
    head = node.inbox[0] if node.inbox else None
    for c in row.guard:
        if c == "active":
            ok = node.mode is Mode.ACTIVE
        elif c == "relay":
            ok = node.mode is Mode.RELAY
        elif c in ("s0", "s1", "s2", "s3", "s4", "s5"):
            ok = _PC_NAMES[node.pc] == c
        elif c == "has_input":
            ok = head is not None
        elif c == "next_free":
            ok = next_len < cap
        elif c == "vid_eq_id2":
            ok = node.vid == node.id2
        elif c == "vid_ne_id2":
            ok = node.vid != node.id2
        elif c in ("win", "not_win"):
            ok = (node.id2 > max(node.vid, node.id3)) == (c == "win")
        elif c in ("win_head", "not_win_head"):
            ok = head is not None and (node.id2 > max(node.vid, head)) == (c == "win_head")
        else:
            raise KeyError(c)
        if not ok:
            return False
    return True


def enabled_rows(variant: Variant, node: LocalState, next_len: int, n: int) -> List[Row]:
    cap = variant.capacity(n)
    return [r for r in STEP_ROWS[variant] if row_enabled(r, node, next_len, cap)]


def apply_row(variant: Variant, g: GlobalState, i: int, row: Row, clear_temps: bool = True) -> GlobalState:
    """Execute ``row`` for process ``i``: read, local updates, then send."""
    nodes = list(g.nodes)
    j = (i + 1) % g.n
    me = nodes[i]
    head = me.inbox[0] if me.inbox else None
    values = {"head": head, "vid": me.vid, "id2": me.id2, "id3": me.id3}
    updates = {}
    for var, val in row.sets:
        if val.startswith("unset?"):
            updates[var] = None if clear_temps else values[val[len("unset?"):]]
        elif var == "mode":
            updates[var] = Mode.RELAY if val == "relay" else Mode.ACTIVE
        elif var == "state":
            updates[var] = Pc[val.upper()]
        else:
            updates[var] = values[val]
    if "state" in updates:
        updates["pc"] = updates.pop("state")
    if row.pop:
        updates["inbox"] = me.inbox[1:]
    nodes[i] = replace(me, **updates)
    if row.push is not None:
        nodes[j] = replace(nodes[j], inbox=nodes[j].inbox + (values[row.push],))
    return GlobalState(tuple(nodes))


# Text rendering.


class _Names:
    def __init__(self, variant: Variant, n: int):
        self.variant = variant
        self.n = n
        self.fifo = variant is Variant.GENERAL
        self.shared = n == 1

    @property
    def params(self) -> List[str]:
        if self.fifo:
            own = [f"my_b{k}" for k in range(self.n)] + ["my_rd", "my_cnt"]
            if self.shared:
                return own + ["my_wr"]
            return own + [f"nx_b{k}" for k in range(self.n)] + ["nx_wr", "nx_cnt"]
        return ["box"] if self.shared else ["myinput", "nextinput"]

    def own(self, field="slot"):
        if self.fifo:
            return f"my_{field}"
        return "box" if self.shared else "myinput"

    def nxt(self, field="slot"):
        if self.fifo:
            return f"my_{field}" if self.shared else f"nx_{field}"
        return "box" if self.shared else "nextinput"


def _cond_text(c: str, names: _Names) -> str:
    if c in ("active", "relay"):
        return f"mode = {c}"
    if c in ("s0", "s1", "s2", "s3", "s4", "s5"):
        return f"state = {c}"
    if c == "has_input":
        return f"{names.own('cnt')} > 0" if names.fifo else f"{names.own()} != {EMPTY}"
    if c == "next_free":
        return f"{names.nxt('cnt')} < {names.n}" if names.fifo else f"{names.nxt()} = {EMPTY}"
    if c == "vid_eq_id2":
        return "vid = id2"
    if c == "vid_ne_id2":
        return "vid != id2"
    if c == "win":
        return "id2 > vid & id2 > id3"
    if c == "not_win":
        return "!(id2 > vid & id2 > id3)"
    if c == "win_head":
        return f"id2 > vid & id2 > {names.own()}"
    if c == "not_win_head":
        return f"!(id2 > vid & id2 > {names.own()})"
    raise KeyError(c)


def guard_text(row: Row, names: _Names) -> str:
    return " & ".join(_cond_text(c, names) for c in row.guard)


def _value_text(v: str, names: _Names, clear: bool) -> str:
    if v.startswith("unset?"):
        return str(EMPTY) if clear else _value_text(v[len("unset?"):], names, clear)
    if v == "head":
        return "head" if names.fifo else names.own()
    return v


def _overflow_split(row: Row, names: _Names):
    """(normal guard, overflow guard or None) for a row."""
    base = guard_text(row, names)
    if not names.fifo or row.push is None:
        return base, None
    if names.shared and row.pop:
        return base, None  # the pop frees a cell first
    full = f"{names.nxt('cnt')} = {names.n}"
    free = f"{names.nxt('cnt')} < {names.n}"
    return f"{base} & {free}", f"{base} & {full}"


def _case(target: str, arms: List[Tuple[str, str, str]]) -> List[str]:
    lines = [f"  next({target}) :=", "    case"]
    for guard, value, tag in arms:
        lines.append(f"      {guard} : {value};  -- {tag}")
    lines += [f"      TRUE : {target};", "    esac;"]
    return lines


def _node_module(variant: Variant, n: int, max_uid: int, clear: bool) -> List[str]:
    names = _Names(variant, n)
    rows = STEP_ROWS[variant]
    pcs = [_PC_NAMES[p] for p in PC_VALUES[variant]] + (["ovf"] if names.fifo else [])
    lines = [f"MODULE node(uid, {', '.join(names.params)})", "VAR",
             f"  vid : 0..{max_uid};", "  mode : {active, relay};",
             f"  state : {{{', '.join(pcs)}}};",
             f"  id2 : {EMPTY}..{max_uid};", f"  id3 : {EMPTY}..{max_uid};"]
    if names.fifo:
        arms = [f"my_rd = {k} : my_b{k};" for k in range(n - 1)] + [f"TRUE : my_b{n - 1};"]
        lines += ["DEFINE", f"  head := case {' '.join(arms)} esac;"]
    lines += ["ASSIGN", "  init(vid) := uid;", "  init(mode) := active;", "  init(state) := s0;",
              f"  init(id2) := {EMPTY};", f"  init(id3) := {EMPTY};"]

    local = {"vid": [], "mode": [], "state": [], "id2": [], "id3": []}
    inbox = {}

    def arm(var, guard, value, tag):
        inbox.setdefault(var, []).append((guard, value, tag))

    for row in rows:
        guard, over = _overflow_split(row, names)
        for var, val in row.sets:
            local[var].append((guard, _value_text(val, names, clear), row.name))
        if over is not None:
            local["state"].append((over, "ovf", f"{row.name} overflow"))
        pushed = _value_text(row.push, names, clear) if row.push else None
        if names.fifo:
            if row.pop:
                arm("my_rd", guard, f"(my_rd + 1) mod {n}", row.name)
            if row.push:
                for k in range(n):
                    arm(f"{names.nxt('b')}{k}", f"{guard} & {names.nxt('wr')} = {k}", pushed, row.name)
                arm(names.nxt("wr"), guard, f"({names.nxt('wr')} + 1) mod {n}", row.name)
            if names.shared:
                delta = int(bool(row.push)) - int(row.pop)
                if delta:
                    arm("my_cnt", guard, f"my_cnt {'+' if delta > 0 else '-'} 1", row.name)
            else:
                if row.pop:
                    arm("my_cnt", guard, "my_cnt - 1", row.name)
                if row.push:
                    arm("nx_cnt", guard, "nx_cnt + 1", row.name)
        else:
            if names.shared and row.pop and row.push:
                arm("box", guard, pushed, row.name)
            else:
                if row.pop:
                    arm(names.own(), guard, str(EMPTY), row.name)
                if row.push:
                    arm(names.nxt(), guard, pushed, row.name)

    for var in ("vid", "mode", "state", "id2", "id3"):
        if local[var]:
            lines += _case(var, local[var])
    for var in sorted(inbox, key=_natural):
        lines += _case(var, inbox[var])
    return lines


def _natural(s):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def _main_module(variant: Variant, uids: Sequence[int], max_uid: int) -> List[str]:
    n = len(uids)
    fifo = variant is Variant.GENERAL
    lines = ["MODULE main", "VAR"]
    inits = []
    for i in range(n):
        if fifo:
            for k in range(n):
                lines.append(f"  q{i}_b{k} : {EMPTY}..{max_uid};")
                inits.append(f"  init(q{i}_b{k}) := {EMPTY};")
            lines += [f"  q{i}_rd : 0..{n - 1};", f"  q{i}_wr : 0..{n - 1};", f"  q{i}_cnt : 0..{n};"]
            inits += [f"  init(q{i}_rd) := 0;", f"  init(q{i}_wr) := 0;", f"  init(q{i}_cnt) := 0;"]
        else:
            lines.append(f"  in{i} : {EMPTY}..{max_uid};")
            inits.append(f"  init(in{i}) := {EMPTY};")
    for i, uid in enumerate(uids):
        j = (i + 1) % n
        if fifo:
            own = [f"q{i}_b{k}" for k in range(n)] + [f"q{i}_rd", f"q{i}_cnt"]
            args = own + ([f"q{i}_wr"] if n == 1 else [f"q{j}_b{k}" for k in range(n)] + [f"q{j}_wr", f"q{j}_cnt"])
        else:
            args = [f"in{i}"] if n == 1 else [f"in{i}", f"in{j}"]
        lines.append(f"  node{i} : process node({uid}, {', '.join(args)});")
    lines += ["ASSIGN"] + inits
    for i in range(n):
        lines += ["FAIRNESS", f"  node{i}.running"]
    return lines


def _spec_lines(n: int, max_uid: int) -> List[str]:
    lead = [f"node{i}.state = lead" for i in range(n)]
    p1 = " | ".join(lead)
    pairs = [f"({lead[i]} & {lead[j]})" for i in range(n) for j in range(i + 1, n)]
    p2 = " | ".join(pairs) if pairs else "FALSE"
    p3 = " & ".join(f"({lead[i]} -> node{i}.vid = {max_uid})" for i in range(n))
    return [
        "-- P1: eventually a leader is elected (under the FAIRNESS constraints)",
        "SPEC", f"  AF ({p1})",
        "-- P2: expected to be false: two leaders never coexist",
        "SPEC", f"  EF ({p2})",
        "-- P3: a leader's virtual id equals the maximum uid",
        "SPEC", f"  AG ({p3})",
    ]


@dataclass(frozen=True)
class SmvModel:
    text: str
    variant: Variant
    n: int
    uids: Tuple[int, ...]

    @property
    def filename(self) -> str:
        return smv_filename(self.variant, self.n)


def smv_filename(variant: Variant, n: int) -> str:
    return f"{variant.value}_{n}.smv"


def emit_smv(variant: Variant, uids: Sequence[int], clear_temps: bool = True) -> SmvModel:
    uids = validate_uids(uids)
    n = len(uids)
    max_uid = max(uids)
    header = [
        f"-- Generated by ringelect {__version__}",
        f"-- variant: {variant.value}",
        f"-- n: {n}",
        f"-- uids: {' '.join(map(str, uids))}",
        f"-- max_uid: {max_uid}",
        f"-- {EMPTY} encodes an empty inbox cell or an unset temporary.",
    ]
    if variant is Variant.GENERAL:
        header.append("-- state ovf marks a send into a full inbox.")
    body = header + [""] + _node_module(variant, n, max_uid, clear_temps) + [""] + _main_module(variant, uids, max_uid)
    body += [""] + _spec_lines(n, max_uid)
    return SmvModel("\n".join(body) + "\n", variant, n, uids)


# Structural checker for emitted models.

_SECTION = {"VAR", "ASSIGN", "DEFINE", "FAIRNESS", "SPEC"}
_DECL = re.compile(r"^\s*([A-Za-z_][\w]*)\s*:\s*(.+);$")
_ASSIGN = re.compile(r"^\s*(init|next)\(([A-Za-z_][\w.]*)\)\s*:=\s*(.*)$")
_ARM = re.compile(r"^\s*(.+?)\s*:\s*(.+?);(\s*--.*)?$")
_PROCESS = re.compile(r"^process\s+([A-Za-z_]\w*)\((.*)\)$")


def validate_smv(text: str) -> List[str]:
    """Return a list of well-formedness problems (empty when the model is ok).

    Checks module headers, that declarations, assignments and case arms sit
    in the right sections, case/esac and parenthesis balance, that every
    process instance names a declared module with the right arity, that
    every assigned variable is declared or a parameter, and that ``main``
    exists.
    """
    errors = []
    modules = {}
    instances = []
    current = None
    section = None
    in_case = False
    pending = None
    declared = set()
    assigned = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        code = raw.split("--", 1)[0].rstrip()
        if not code.strip():
            continue
        if code.count("(") != code.count(")"):
            errors.append(f"line {lineno}: unbalanced parentheses")
        stripped = code.strip()
        if stripped.startswith("MODULE "):
            if in_case:
                errors.append(f"line {lineno}: MODULE inside case")
            if current is not None:
                _close_module(current, declared, assigned, errors)
            m = re.match(r"MODULE\s+([A-Za-z_]\w*)(?:\((.*)\))?$", stripped)
            if not m:
                errors.append(f"line {lineno}: malformed MODULE header")
                current = None
                continue
            params = [p.strip() for p in m.group(2).split(",")] if m.group(2) else []
            current = (m.group(1), params)
            modules[m.group(1)] = params
            declared = set(params)
            assigned = []
            section = None
            continue
        if current is None:
            errors.append(f"line {lineno}: content outside any MODULE")
            continue
        if stripped in _SECTION:
            if in_case:
                errors.append(f"line {lineno}: section {stripped} inside case")
            section = stripped
            continue
        if section is None:
            errors.append(f"line {lineno}: content before any section")
            continue
        if section in ("VAR", "DEFINE"):
            m = _DECL.match(code) if section == "VAR" else re.match(r"^\s*([A-Za-z_]\w*)\s*:=\s*(.+);$", code)
            if not m:
                errors.append(f"line {lineno}: malformed {section} entry")
                continue
            declared.add(m.group(1))
            pm = _PROCESS.match(m.group(2).strip())
            if pm:
                args = [a.strip() for a in pm.group(2).split(",")] if pm.group(2).strip() else []
                instances.append((lineno, pm.group(1), len(args)))
            if section == "DEFINE" and m.group(2).count("case") != m.group(2).count("esac"):
                errors.append(f"line {lineno}: unbalanced case in DEFINE")
            continue
        if section == "ASSIGN":
            if stripped == "case":
                if in_case or pending is None:
                    errors.append(f"line {lineno}: unexpected case")
                in_case = True
                continue
            if stripped == "esac;":
                if not in_case:
                    errors.append(f"line {lineno}: esac without case")
                in_case = False
                pending = None
                continue
            if in_case:
                if not _ARM.match(raw):
                    errors.append(f"line {lineno}: malformed case arm")
                continue
            m = _ASSIGN.match(code)
            if not m:
                errors.append(f"line {lineno}: malformed assignment")
                continue
            assigned.append((lineno, m.group(2)))
            rhs = m.group(3).strip()
            if rhs == "":
                pending = m.group(2)
            elif not rhs.endswith(";"):
                errors.append(f"line {lineno}: assignment missing ';'")
            continue
        if section in ("FAIRNESS", "SPEC"):
            if stripped.endswith(";"):
                errors.append(f"line {lineno}: {section} expression must not end with ';'")
            continue
    if in_case:
        errors.append("unterminated case at end of file")
    if current is not None:
        _close_module(current, declared, assigned, errors)
    if "main" not in modules:
        errors.append("no MODULE main")
    for lineno, mod, arity in instances:
        if mod not in modules:
            errors.append(f"line {lineno}: instance of undeclared module {mod}")
        elif len(modules[mod]) != arity:
            errors.append(f"line {lineno}: module {mod} takes {len(modules[mod])} arguments, got {arity}")
    return errors


def _close_module(current, declared, assigned, errors):
    name, _ = current
    for lineno, var in assigned:
        if var.split(".")[0] not in declared:
            errors.append(f"line {lineno}: module {name} assigns undeclared {var}")
