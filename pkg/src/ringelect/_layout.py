"""Byte layout of an encoded global state.

An encoded state is ``bytes``: one header byte holding the ring size ``n``,
followed by ``n`` fixed-width node records.  Each record is::

    vid, mode, pc, id2, id3, inbox_len, inbox[0 .. cap-1]

``cap`` is 1 for the single-slot variants and ``n`` for the FIFO variant.
Unused inbox cells and unset temporaries hold ``UNSET``.  The Cython kernel
hard-codes the same numbers; ``tests/test_kernel.py`` checks they agree.
"""

VARIANT_GENERAL = 0
VARIANT_MODIFIED = 1
VARIANT_EXTRA = 2

MODE_ACTIVE = 0
MODE_RELAY = 1

PC_S0, PC_S1, PC_S2, PC_S3, PC_S4, PC_S5 = range(6)
PC_LEAD = 6

F_VID = 0
F_MODE = 1
F_PC = 2
F_ID2 = 3
F_ID3 = 4
F_LEN = 5
F_BUF = 6

UNSET = 0xFF
# Fill byte of the absorbing overflow state; never a legal field value.
ERROR_FILL = 0xFE
MAX_UID = 127
MAX_RING = 127

PROGRESS = 0
STUTTER = 1
OVERFLOW = 2


def inbox_capacity(variant: int, n: int) -> int:
    return n if variant == VARIANT_GENERAL else 1


def record_width(variant: int, n: int) -> int:
    return F_BUF + inbox_capacity(variant, n)


def state_width(variant: int, n: int) -> int:
    return 1 + n * record_width(variant, n)


def error_state(variant: int, n: int) -> bytes:
    return bytes([ERROR_FILL]) * state_width(variant, n)
