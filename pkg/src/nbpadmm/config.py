from __future__ import annotations

from dataclasses import asdict, dataclass, replace


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DecoderConfig:
    """Proximal-ADMM parameters.

    ``tol`` bounds both squared residuals ||Av + e1 - b||^2 and ||v - e2||^2.
    """

    mu: float = 0.8
    alpha: float = 0.5
    rho: float = 0.52
    beta: float = 0.9
    tol: float = 1e-5
    max_iter: int = 500
    stop_on_codeword: bool = False

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if not self.rho > self.alpha:
            raise ConfigError(f"rho ({self.rho}) must exceed alpha ({self.alpha})")
        if not 0 < self.beta <= 1:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")

    @property
    def epsilon(self) -> float:
        """Diagonal shift of the v-subproblem system: 1 + rho/mu - alpha/mu."""
        return 1.0 + self.rho / self.mu - self.alpha / self.mu

    @classmethod
    def for_field(cls, q: int, **overrides) -> "DecoderConfig":
        """Defaults tuned per field size: mu = 0.8 up to GF(4), 0.6 above."""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        overrides.setdefault("mu", 0.8 if q <= 2 else 0.6)
        return cls(**overrides)

    def with_(self, **changes) -> "DecoderConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)
