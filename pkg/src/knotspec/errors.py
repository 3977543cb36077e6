"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the CLI exit
status it maps to (1 input, 2 computational refusal, 3 internal).
"""


class KnotspecError(Exception):
    code = "error"
    exit_status = 3


class InputError(KnotspecError, ValueError):
    code = "input_error"
    exit_status = 1


class StructuralError(InputError):
    """A diagram code that does not describe a planar (spherical) diagram."""

    code = "structural_error"


class InvalidMove(InputError):
    code = "invalid_move"


class SamplingError(KnotspecError):
    code = "sampling_error"
    exit_status = 2


class DegenerateProjection(KnotspecError):
    """The projection direction hit a non-generic configuration; resample."""

    code = "degenerate_projection"
    exit_status = 2


class CapExceeded(KnotspecError):
    code = "cap_exceeded"
    exit_status = 2


class StepError(KnotspecError):
    code = "step_error"
    exit_status = 2


class InvariantViolation(KnotspecError, AssertionError):
    code = "invariant_violation"
    exit_status = 3
