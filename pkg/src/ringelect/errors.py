class RingelectError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateUid(RingelectError, ValueError):
    pass


class EmptyRing(RingelectError, ValueError):
    pass


class InvalidUid(RingelectError, ValueError):
    pass


class IndexOutOfRange(RingelectError, IndexError):
    pass


class TruncatedGraph(RingelectError):
    """An operation needs a complete graph but exploration was cut off."""


class StateLimitExceeded(RingelectError):
    """Exploration hit ``max_states``; the partial result is attached."""

    def __init__(self, graph, stats):
        super().__init__(f"state limit reached after {stats.reachable_states} states")
        self.graph = graph
        self.stats = stats


class StepBudgetExhausted(RingelectError):
    """A simulation ran out of steps; ``report.terminated`` is False."""

    def __init__(self, report):
        super().__init__(f"no termination within {report.steps} steps")
        self.report = report


class OverflowEncountered(RingelectError):
    """A FIFO send found the successor's inbox full."""

    def __init__(self, report):
        super().__init__(f"inbox overflow after {report.steps} steps")
        self.report = report


class FormulaSyntaxError(RingelectError, ValueError):
    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text[pos:pos + 12]!r}")
        self.text = text
        self.pos = pos
