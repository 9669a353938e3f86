import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringelect import (
    GlobalState,
    IsLeader,
    Mode,
    Outcome,
    Pc,
    Quiescent,
    Variant,
    VidEquals,
    atom_eval,
    canonical_encode,
    decode,
    explore,
    initial_state,
    leader_set,
    step,
    successors,
)
from ringelect.errors import DuplicateUid, EmptyRing, IndexOutOfRange, InvalidUid

VARIANTS = list(Variant)


def test_initial_state_modified():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    assert g.n == 3
    for i, node in enumerate(g.nodes):
        assert node.mode is Mode.ACTIVE
        assert node.pc is Pc.S0
        assert node.vid == i
        assert node.inbox == ()
        assert node.id2 is None and node.id3 is None


def test_initial_state_general_eight():
    uids = [7, 4, 6, 3, 5, 0, 2, 1]
    g = initial_state(Variant.GENERAL, uids)
    assert [nd.vid for nd in g.nodes] == uids
    assert all(nd.mode is Mode.ACTIVE for nd in g.nodes)


@pytest.mark.parametrize("uids, exc", [
    ([0, 0], DuplicateUid),
    ([], EmptyRing),
    ([-1, 2], InvalidUid),
    ([0, 128], InvalidUid),
])
def test_initial_state_rejects(uids, exc):
    with pytest.raises(exc):
        initial_state(Variant.MODIFIED, uids)


def test_variant_aliases():
    assert Variant.parse("alg2") is Variant.GENERAL
    assert Variant.parse("alg3") is Variant.MODIFIED
    assert Variant.parse("ALG4") is Variant.EXTRA
    with pytest.raises(ValueError):
        Variant.parse("bogus")


def test_first_send_writes_successor_slot():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    res = step(Variant.MODIFIED, g, 2)
    assert res.outcome is Outcome.PROGRESS
    assert res.next[0].inbox == (2,)
    assert res.next[2].pc is Pc.S2


def test_wait_on_empty_slot_stutters():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    g = step(Variant.MODIFIED, g, 0).next
    assert g[0].pc is Pc.S2 and g[0].inbox == ()
    res = step(Variant.MODIFIED, g, 0)
    assert res.outcome is Outcome.STUTTER
    assert res.next is None


@pytest.mark.parametrize("variant", VARIANTS)
def test_single_node_elects_itself(variant):
    g = initial_state(variant, [0])
    for _ in range(3):
        res = step(variant, g, 0)
        assert res.outcome is Outcome.PROGRESS
        g = res.next
    assert g[0].pc is Pc.LEAD and g[0].vid == 0
    assert leader_set(g) == {0}
    assert atom_eval(g, IsLeader(0)) and atom_eval(g, VidEquals(0, 0))
    assert step(variant, g, 0).outcome is Outcome.STUTTER


def test_step_index_checked():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    with pytest.raises(IndexOutOfRange):
        step(Variant.MODIFIED, g, 3)
    with pytest.raises(IndexOutOfRange):
        atom_eval(g, IsLeader(5))


def test_successors_of_initial_state():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    succ = successors(Variant.MODIFIED, g)
    assert [lab for lab, _ in succ] == [0, 1, 2]
    for lab, nxt in succ:
        assert nxt[(lab + 1) % 3].inbox == (g[lab].vid,)


def test_successors_of_terminal_state_are_self_loops():
    g = initial_state(Variant.EXTRA, [0])
    for _ in range(3):
        g = step(Variant.EXTRA, g, 0).next
    assert successors(Variant.EXTRA, g) == [(0, g)]


def test_initial_atoms():
    g = initial_state(Variant.MODIFIED, [0, 1, 2])
    assert not atom_eval(g, IsLeader(0))
    assert leader_set(g) == frozenset()
    assert not atom_eval(g, Quiescent(), Variant.MODIFIED)
    with pytest.raises(TypeError):
        atom_eval(g, Quiescent())


def test_some_reachable_state_has_exactly_one_leader():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2])
    sizes = [len(leader_set(g)) for _, g in graph.states()]
    assert 1 in sizes
    assert max(sizes) <= 1


def test_encoding_distinguishes_uid_order():
    a = canonical_encode(Variant.MODIFIED, initial_state(Variant.MODIFIED, [0, 1]))
    b = canonical_encode(Variant.MODIFIED, initial_state(Variant.MODIFIED, [1, 0]))
    assert a != b


def test_encoding_has_no_collisions_on_sample():
    graph, _ = explore(Variant.MODIFIED, [0, 1, 2, 3])
    rng = random.Random(11)
    ids = list(range(graph.num_states))
    sample = ids if len(ids) <= 10**4 else rng.sample(ids, 10**4)
    decoded = {}
    for sid in sample:
        g = graph.state(sid)
        code = canonical_encode(Variant.MODIFIED, g)
        assert decode(Variant.MODIFIED, code) == g
        assert decoded.setdefault(code, g) == g
    assert len(decoded) == len(sample)


# Random walks through the object-level semantics.

def _walk(variant, uids, schedule):
    g = initial_state(variant, uids)
    yield g
    for i in schedule:
        res = step(variant, g, i % g.n)
        if res.outcome is Outcome.OVERFLOW:
            return
        if res.outcome is Outcome.PROGRESS:
            g = res.next
            yield g


def _without_inbox(node):
    return node.vid, node.mode, node.pc, node.id2, node.id3


walks = st.tuples(
    st.sampled_from(VARIANTS),
    st.integers(1, 5).flatmap(lambda n: st.permutations(range(n))),
    st.lists(st.integers(0, 63), max_size=80),
)


@settings(max_examples=150, deadline=None)
@given(walks)
def test_step_is_deterministic(case):
    variant, uids, schedule = case
    for g in _walk(variant, uids, schedule[:20]):
        for i in range(g.n):
            assert step(variant, g, i) == step(variant, g, i)


@settings(max_examples=150, deadline=None)
@given(walks)
def test_step_touches_only_own_record_and_successor_inbox(case):
    variant, uids, schedule = case
    for g in _walk(variant, uids, schedule):
        for i in range(g.n):
            res = step(variant, g, i)
            if res.outcome is not Outcome.PROGRESS:
                continue
            h = res.next
            nxt = (i + 1) % g.n
            for k in range(g.n):
                if k == i:
                    continue
                if k == nxt:
                    assert _without_inbox(h[k]) == _without_inbox(g[k])
                else:
                    assert h[k] == g[k]


@settings(max_examples=150, deadline=None)
@given(walks)
def test_lead_is_absorbing(case):
    variant, uids, schedule = case
    for g in _walk(variant, uids, schedule):
        leaders = leader_set(g)
        for i in range(g.n):
            res = step(variant, g, i)
            if res.outcome is Outcome.PROGRESS:
                assert leaders <= leader_set(res.next)


@settings(max_examples=150, deadline=None)
@given(walks)
def test_temps_cleared_at_s0_and_values_closed(case):
    variant, uids, schedule = case
    allowed = set(uids)
    for g in _walk(variant, uids, schedule):
        for node in g.nodes:
            if node.pc is Pc.S0:
                assert node.id2 is None and node.id3 is None
            for v in (node.id2, node.id3, node.vid, *node.inbox):
                assert v is None or v in allowed
            assert len(node.inbox) <= variant.capacity(g.n)


@settings(max_examples=100, deadline=None)
@given(walks)
def test_encode_decode_roundtrip(case):
    variant, uids, schedule = case
    for g in _walk(variant, uids, schedule):
        code = canonical_encode(variant, g)
        assert canonical_encode(variant, g) == code
        assert decode(variant, code) == g
        assert isinstance(decode(variant, code), GlobalState)
