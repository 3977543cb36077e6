"""Run configuration and seed derivation."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, fields

from .errors import InputError

SCHEMA_VERSION = 1


def derive_seed(seed: int, label: str) -> int:
    """64-bit seed for a named stream, derived from the single top-level seed."""
    digest = hashlib.sha256(f"{int(seed)}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    directions: int = 500
    scheme: str = "uniform"
    samples_per_base: int = 50
    h_frac: float = 0.1  # fraction of the tube radius
    cap: int = 24  # bracket crossing cap
    budget: int = 500  # simplification move budget
    degeneracy_tol: float = 1e-9  # relative to curve diameter
    genericity_tol: float = 1e-9
    secant_tol: float = 1e-9
    max_retries: int = 10  # resamples per degenerate direction
    # "record": extra knot-type classes are kept and flagged as conflicts;
    # "strict": they raise InvariantViolation
    knot_type_policy: str = "record"
    output: str | None = None
    workers: int = 1

    # output location and worker count never change results, so they stay
    # out of provenance (keeps artifacts byte-identical across runs)
    NOT_IN_PROVENANCE = ("output", "workers")

    def __post_init__(self):
        if self.directions < 1:
            raise InputError("directions must be >= 1")
        if self.samples_per_base < 1:
            raise InputError("samples per base must be >= 1")
        if not 0 < self.h_frac < 1:
            raise InputError("h fraction must lie in (0, 1)")
        if self.cap < 1 or self.budget < 0:
            raise InputError("cap must be >= 1 and budget >= 0")
        if self.workers < 1:
            raise InputError("workers must be >= 1")
        if self.scheme not in ("uniform", "fibonacci"):
            raise InputError(f"unknown direction scheme {self.scheme!r}")
        if self.knot_type_policy not in ("record", "strict"):
            raise InputError(f"unknown knot-type policy {self.knot_type_policy!r}")
        for name in ("degeneracy_tol", "genericity_tol", "secant_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")

    def provenance(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in self.NOT_IN_PROVENANCE}

    def seed_for(self, label: str) -> int:
        return derive_seed(self.seed, label)

    @classmethod
    def from_provenance(cls, obj: dict, **overrides) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        kw = {k: v for k, v in obj.items() if k in names}
        kw.update(overrides)
        return cls(**kw)
