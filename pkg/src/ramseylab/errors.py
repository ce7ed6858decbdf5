"""Shared exception types.

Every failure mode that callers are expected to branch on gets its own class;
all of them derive from RamseyLabError so the CLI can map library failures to
exit code 2 (or 1 for verified-negative results) in one place.
"""

from __future__ import annotations


class RamseyLabError(Exception):
    """Base class for all library errors."""


class CycleFound(RamseyLabError):
    """An acyclicity check failed; carries one witness cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"digraph contains a cycle: {self.cycle}")


class SizeOverflow(RamseyLabError):
    """A requested object would exceed an explicit size cap."""


class TooLarge(RamseyLabError):
    """Input exceeds the vertex/enumeration cap of an exact routine."""


class TooSmall(RamseyLabError):
    """Input is below the minimum size a construction needs."""


class LayeringMismatch(RamseyLabError):
    """A layering does not belong to the digraph it was paired with."""


class InfeasibleDegree(RamseyLabError):
    """Degree bound makes the requested random digraph impossible."""


class InfeasibleParams(RamseyLabError):
    """Parameter profile violates its own consistency constraints."""


class HypothesisViolation(RamseyLabError):
    """An observation's arithmetic hypotheses do not hold for these inputs."""


class MonotonicityViolated(RamseyLabError):
    """A family declared upward-closed failed a closure check."""

    def __init__(self, smaller, larger, msg=""):
        self.smaller = smaller
        self.larger = larger
        super().__init__(msg or f"member {smaller:#x} has non-member superset {larger:#x}")


class NotSubset(RamseyLabError):
    """A set that must be contained in another is not."""


class PreconditionUnverified(RamseyLabError):
    """A stated precondition was checked and found false."""


class PreconditionViolated(RamseyLabError):
    """Hard precondition of a routine does not hold."""


class DensityTooLow(RamseyLabError):
    """Edge density below the declared lower bound."""


class RetriesExhausted(RamseyLabError):
    """Randomized search used up its retry budget; carries a transcript."""

    def __init__(self, transcript, msg="retry budget exhausted"):
        self.transcript = transcript
        super().__init__(f"{msg} ({len(transcript)} attempts)")


class StructureFailed(RamseyLabError):
    """Structure construction failed at a named stage with a deficit report."""

    def __init__(self, stage, deficit):
        self.stage = stage
        self.deficit = deficit
        super().__init__(f"structure stage {stage!r} failed: {deficit}")


class ResampleBudgetExhausted(RamseyLabError):
    """Resampling loop hit its budget; carries the surviving bad events."""

    def __init__(self, events, resamples):
        self.events = events
        self.resamples = resamples
        super().__init__(f"{resamples} resamples spent, {len(events)} bad events remain")


class LayerFailed(RamseyLabError):
    """Layer-by-layer embedding failed at a specific layer."""

    def __init__(self, layer, cause):
        self.layer = layer
        self.cause = cause
        super().__init__(f"embedding failed at layer {layer}: {cause}")


class PartialLayers(RamseyLabError):
    """A map covers some layer only partially where whole layers are required."""


class FormatError(RamseyLabError):
    """A serialized file does not conform to its declared format."""
