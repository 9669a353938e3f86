# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transition kernel; same contract as ``_kernel_py``."""

from array import array

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.string cimport memcpy

cdef enum:
    VARIANT_GENERAL = 0
    VARIANT_MODIFIED = 1
    VARIANT_EXTRA = 2
    MODE_RELAY = 1
    PC_S0 = 0
    PC_S1 = 1
    PC_S2 = 2
    PC_S3 = 3
    PC_S4 = 4
    PC_S5 = 5
    PC_LEAD = 6
    F_VID = 0
    F_MODE = 1
    F_PC = 2
    F_ID2 = 3
    F_ID3 = 4
    F_LEN = 5
    F_BUF = 6
    UNSET = 0xFF
    ERROR_FILL = 0xFE
    PROGRESS = 0
    STUTTER = 1
    OVERFLOW = 2


cdef inline int _pop(unsigned char* s, int o) noexcept nogil:
    cdef int b = o + F_BUF
    cdef int length = s[o + F_LEN]
    cdef int v = s[b]
    cdef int k
    for k in range(length - 1):
        s[b + k] = s[b + k + 1]
    s[b + length - 1] = UNSET
    s[o + F_LEN] = length - 1
    return v


cdef inline bint _push(unsigned char* s, int o, int cap, int v) noexcept nogil:
    cdef int length = s[o + F_LEN]
    if length >= cap:
        return False
    s[o + F_BUF + length] = v
    s[o + F_LEN] = length + 1
    return True


cdef inline void _decide(unsigned char* s, int o, bint clear) noexcept nogil:
    cdef int id2 = s[o + F_ID2]
    if id2 > s[o + F_VID] and id2 > s[o + F_ID3]:
        s[o + F_VID] = id2
    else:
        s[o + F_MODE] = MODE_RELAY
    if clear:
        s[o + F_ID2] = UNSET
        s[o + F_ID3] = UNSET
    s[o + F_PC] = PC_S0


cdef int _step_general(unsigned char* s, int o, int so, int cap, bint clear) noexcept nogil:
    cdef int pc = s[o + F_PC]
    cdef int m
    if s[o + F_MODE] == MODE_RELAY:
        if s[o + F_LEN] == 0:
            return STUTTER
        m = _pop(s, o)
        return PROGRESS if _push(s, so, cap, m) else OVERFLOW
    if pc == PC_S0:
        if not _push(s, so, cap, s[o + F_VID]):
            return OVERFLOW
        s[o + F_PC] = PC_S1
    elif pc == PC_S1:
        if s[o + F_LEN] == 0:
            return STUTTER
        s[o + F_ID2] = _pop(s, o)
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
        s[o + F_ID3] = _pop(s, o)
        s[o + F_PC] = PC_S4
    elif pc == PC_S4:
        _decide(s, o, clear)
    else:
        return STUTTER
    return PROGRESS


cdef int _step_slot(unsigned char* s, int o, int so, int variant, bint clear) noexcept nogil:
    cdef int pc = s[o + F_PC]
    cdef int v
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


cdef int _step_into(int variant, int n, bint clear, const unsigned char* src,
                    unsigned char* dst, int width, int i) noexcept nogil:
    cdef int cap, rec, o, so
    if src[0] == ERROR_FILL:
        return STUTTER
    cap = n if variant == VARIANT_GENERAL else 1
    rec = F_BUF + cap
    o = 1 + i * rec
    if src[o + F_PC] == PC_LEAD:
        return STUTTER
    so = 1 + ((i + 1) % n) * rec
    memcpy(dst, src, width)
    if variant == VARIANT_GENERAL:
        return _step_general(dst, o, so, cap, clear)
    return _step_slot(dst, o, so, variant, clear)


def step(int variant, int n, bint clear, bytes state, int i):
    cdef int width = len(state)
    cdef bytes out = PyBytes_FromStringAndSize(NULL, width)
    cdef int code = _step_into(variant, n, clear,
                               <const unsigned char*> PyBytes_AS_STRING(state),
                               <unsigned char*> PyBytes_AS_STRING(out), width, i)
    if code != PROGRESS:
        return code, None
    return PROGRESS, out


def explore(int variant, int n, bint clear, bytes init, Py_ssize_t max_states):
    cdef int cap = n if variant == VARIANT_GENERAL else 1
    cdef int width = 1 + n * (F_BUF + cap)
    cdef bytes error = bytes([ERROR_FILL]) * width
    cdef dict index = {init: 0}
    cdef list states = [init]
    cdef Py_ssize_t head = 0, peak = 1, frontier, j, error_id = -1
    cdef bint truncated = False
    cdef int i, code
    cdef bytes cur, nxt
    cdef object found
    cdef unsigned char[:] scratch = bytearray(width)
    edges = array("i")
    row = array("i", [0]) * n
    cdef int[:] rowv = row

    while head < len(states):
        frontier = len(states) - head
        if frontier > peak:
            peak = frontier
        cur = <bytes> states[head]
        for i in range(n):
            code = _step_into(variant, n, clear,
                              <const unsigned char*> PyBytes_AS_STRING(cur),
                              &scratch[0], width, i)
            if code == STUTTER:
                rowv[i] = head
                continue
            if code == OVERFLOW:
                nxt = error
            else:
                nxt = PyBytes_FromStringAndSize(<char*> &scratch[0], width)
            found = index.get(nxt)
            if found is None:
                if len(states) >= max_states:
                    truncated = True
                    break
                j = len(states)
                index[nxt] = j
                states.append(nxt)
                if code == OVERFLOW:
                    error_id = j
            else:
                j = found
            rowv[i] = j
        if truncated:
            break
        edges.extend(row)
        head += 1
    return states, edges, error_id, truncated, peak
