"""Exceptions shared by the schedulers and the estimator."""


class PeriodNotFound(RuntimeError):
    """No state recurred within the iteration cap."""


class BufferOverflowAttempt(AssertionError):
    """A transmitting hop found its out-buffer full.

    Placement keeps this unreachable, so hitting it means a bug rather than a
    recoverable condition.
    """


class NotConverged(RuntimeError):
    """The streaming estimator hit ``t_max`` before stabilising."""


class ZeroThroughputWindow(RuntimeError):
    """No terminal transmission became a sink within the grace period."""
