"""Exception types shared across the toolkit."""


class KneexoError(Exception):
    """Base class for all toolkit errors."""

    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class DomainError(KneexoError, ValueError):
    kind = "domain_error"


class SolverError(KneexoError, RuntimeError):
    """Loop-closure iteration did not reach tolerance."""

    kind = "solver_error"

    def __init__(self, message: str, residual: float = float("nan"), theta: float | None = None):
        super().__init__(message)
        self.residual = residual
        self.theta = theta

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["residual"] = self.residual
        if self.theta is not None:
            d["theta_rad"] = self.theta
        return d


class SingularityError(SolverError):
    kind = "singularity_error"


class InconsistentSystemError(KneexoError, ValueError):
    """Statics system has no exact solution or no unique one."""

    kind = "inconsistent_system"

    def __init__(self, message: str, rank: int, rank_augmented: int, n_unknowns: int):
        super().__init__(message)
        self.rank = rank
        self.rank_augmented = rank_augmented
        self.n_unknowns = n_unknowns

    @property
    def rank_deficiency(self) -> int:
        return self.n_unknowns - self.rank

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(rank=self.rank, rank_augmented=self.rank_augmented,
                 n_unknowns=self.n_unknowns, rank_deficiency=self.rank_deficiency)
        return d


class CalibrationError(KneexoError, ValueError):
    kind = "calibration_error"


class StreamError(KneexoError, ValueError):
    kind = "stream_error"


class ConfigError(KneexoError, ValueError):
    """Configuration could not be parsed or failed validation.

    ``problems`` lists every violation found, not just the first.
    """

    kind = "config_error"

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["problems"] = self.problems
        return d
