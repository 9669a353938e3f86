"""Pure-Python transition kernel over encoded states.

This is the fallback used when the compiled ``_kernel`` extension is not
available.  Both backends expose the same two functions, ``step`` and
``explore``, and must agree byte for byte.
"""

from array import array

from ._layout import (
    ERROR_FILL,
    F_BUF,
    F_ID2,
    F_ID3,
    F_LEN,
    F_MODE,
    F_PC,
    F_VID,
    MODE_ACTIVE,
    MODE_RELAY,
    OVERFLOW,
    PC_LEAD,
    PC_S0,
    PC_S1,
    PC_S2,
    PC_S3,
    PC_S4,
    PC_S5,
    PROGRESS,
    STUTTER,
    UNSET,
    VARIANT_EXTRA,
    VARIANT_GENERAL,
    VARIANT_MODIFIED,
    error_state,
    inbox_capacity,
)


def _pop(s, o, cap):
    """Remove and return the head of the FIFO at record offset ``o``."""
    b = o + F_BUF
    length = s[o + F_LEN]
    v = s[b]
    for k in range(length - 1):
        s[b + k] = s[b + k + 1]
    s[b + length - 1] = UNSET
    s[o + F_LEN] = length - 1
    return v


def _push(s, o, cap, v):
    length = s[o + F_LEN]
    if length >= cap:
        return False
    s[o + F_BUF + length] = v
    s[o + F_LEN] = length + 1
    return True


def _decide(s, o, clear):
    id2 = s[o + F_ID2]
    if id2 > s[o + F_VID] and id2 > s[o + F_ID3]:
        s[o + F_VID] = id2
    else:
        s[o + F_MODE] = MODE_RELAY
    if clear:
        s[o + F_ID2] = UNSET
        s[o + F_ID3] = UNSET
    s[o + F_PC] = PC_S0


def _step_general(s, o, so, cap, clear):
    pc = s[o + F_PC]
    if s[o + F_MODE] == MODE_RELAY:
        if s[o + F_LEN] == 0:
            return STUTTER
        m = _pop(s, o, cap)
        return PROGRESS if _push(s, so, cap, m) else OVERFLOW
    if pc == PC_S0:
        if not _push(s, so, cap, s[o + F_VID]):
            return OVERFLOW
        s[o + F_PC] = PC_S1
    elif pc == PC_S1:
        if s[o + F_LEN] == 0:
            return STUTTER
        s[o + F_ID2] = _pop(s, o, cap)
        s[o + F_PC] = PC_S2
    elif pc == PC_S2:
        if s[o + F_VID] == s[o + F_ID2]:
            s[o + F_PC] = PC_LEAD
        else:
            if not _push(s, so, cap, s[o + F_ID2]):
                return OVERFLOW
            s[o + F_PC] = PC_S3
    elif pc == PC_S3:
        if s[o + F_LEN] == 0:
            return STUTTER
        s[o + F_ID3] = _pop(s, o, cap)
        s[o + F_PC] = PC_S4
    elif pc == PC_S4:
        _decide(s, o, clear)
    else:
        return STUTTER
    return PROGRESS


def _step_slot(s, o, so, variant, clear):
    pc = s[o + F_PC]
    if s[o + F_MODE] == MODE_RELAY:
        if variant == VARIANT_EXTRA:
            if s[o + F_LEN] == 0 or s[so + F_LEN] != 0:
                return STUTTER
            v = s[o + F_BUF]
            s[o + F_BUF] = UNSET
            s[o + F_LEN] = 0
            s[so + F_BUF] = v
            s[so + F_LEN] = 1
            return PROGRESS
        if pc == PC_S0:
            if s[o + F_LEN] == 0:
                return STUTTER
            s[o + F_VID] = s[o + F_BUF]
            s[o + F_BUF] = UNSET
            s[o + F_LEN] = 0
            s[o + F_PC] = PC_S1
            return PROGRESS
        if s[so + F_LEN] != 0:
            return STUTTER
        s[so + F_BUF] = s[o + F_VID]
        s[so + F_LEN] = 1
        s[o + F_PC] = PC_S0
        return PROGRESS

    if pc == PC_S0:
        if s[so + F_LEN] != 0:
            return STUTTER
        s[so + F_BUF] = s[o + F_VID]
        s[so + F_LEN] = 1
        s[o + F_PC] = PC_S2
    elif pc == PC_S2:
        if s[o + F_LEN] == 0:
            return STUTTER
        s[o + F_ID2] = s[o + F_BUF]
        s[o + F_BUF] = UNSET
        s[o + F_LEN] = 0
        s[o + F_PC] = PC_S3
    elif pc == PC_S3:
        if s[o + F_VID] == s[o + F_ID2]:
            s[o + F_PC] = PC_LEAD
        else:
            if s[so + F_LEN] != 0:
                return STUTTER
            s[so + F_BUF] = s[o + F_ID2]
            s[so + F_LEN] = 1
            s[o + F_PC] = PC_S4
    elif pc == PC_S4:
        if s[o + F_LEN] == 0:
            return STUTTER
        s[o + F_ID3] = s[o + F_BUF]
        s[o + F_BUF] = UNSET
        s[o + F_LEN] = 0
        if variant == VARIANT_EXTRA:
            _decide(s, o, clear)
        else:
            s[o + F_PC] = PC_S5
    elif pc == PC_S5 and variant == VARIANT_MODIFIED:
        _decide(s, o, clear)
    else:
        return STUTTER
    return PROGRESS


def step(variant, n, clear, state, i):
    """Run process ``i`` once on an encoded state.

    Returns ``(outcome, next_state)``; ``next_state`` is ``None`` unless the
    outcome is ``PROGRESS``.
    """
    if state[0] == ERROR_FILL:
        return STUTTER, None
    cap = inbox_capacity(variant, n)
    width = F_BUF + cap
    o = 1 + i * width
    if state[o + F_PC] == PC_LEAD:
        return STUTTER, None
    so = 1 + ((i + 1) % n) * width
    s = bytearray(state)
    if variant == VARIANT_GENERAL:
        code = _step_general(s, o, so, cap, clear)
    else:
        code = _step_slot(s, o, so, variant, clear)
    if code != PROGRESS:
        return code, None
    return PROGRESS, bytes(s)


def explore(variant, n, clear, init, max_states):
    """Breadth-first exploration from ``init``.

    Returns ``(states, edges, error_id, truncated, peak_frontier)`` where
    ``edges`` is a flat ``array('i')`` of length ``n * expanded`` holding the
    target id for each (state, process) pair in label order.  When the state
    limit is hit, exploration stops and the remaining edge slots of the
    unexpanded states are left out.
    """
    error = error_state(variant, n)
    index = {init: 0}
    states = [init]
    edges = array("i")
    error_id = -1
    truncated = False
    peak = 1
    head = 0
    while head < len(states):
        frontier = len(states) - head
        if frontier > peak:
            peak = frontier
        cur = states[head]
        row = array("i")
        for i in range(n):
            code, nxt = step(variant, n, clear, cur, i)
            if code == STUTTER:
                row.append(head)
                continue
            if code == OVERFLOW:
                nxt = error
            j = index.get(nxt)
            if j is None:
                if len(states) >= max_states:
                    truncated = True
                    break
                j = len(states)
                index[nxt] = j
                states.append(nxt)
                if code == OVERFLOW:
                    error_id = j
            row.append(j)
        if truncated:
            break
        edges.extend(row)
        head += 1
    return states, edges, error_id, truncated, peak
