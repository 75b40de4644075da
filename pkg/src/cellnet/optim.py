"""Adam optimizer with per-parameter moment estimates and bias correction."""

from dataclasses import dataclass, field

import numpy as np


class NumericalError(RuntimeError):
    """Raised when a numeric computation produces non-finite values."""


@dataclass
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass
class AdamState:
    """Step counter plus first/second moment buffers, one pair per parameter block."""

    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def for_network(cls, net) -> "AdamState":
        blocks = {"betas": net.betas, "centers": net.centers, "alphas": net.alphas}
        return cls(
            step=0,
            m={name: np.zeros_like(arr) for name, arr in blocks.items()},
            v={name: np.zeros_like(arr) for name, arr in blocks.items()},
        )


def adam_step(state: AdamState, net, grad, cfg: AdamConfig) -> None:
    """Apply one bias-corrected Adam update in place.

    `grad` must hold minimization-oriented partials (d_betas, d_centers,
    d_alphas); parameters move against it. Mutates both `net` and `state`.
    """
    blocks = [
        ("betas", net.betas, grad.d_betas),
        ("centers", net.centers, grad.d_centers),
        ("alphas", net.alphas, grad.d_alphas),
    ]
    for name, param, g in blocks:
        if param.shape != g.shape:
            raise ValueError(f"gradient shape mismatch in {name}")
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite gradient in {name}")

    state.step += 1
    t = state.step
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t
    for name, param, g in blocks:
        m = state.m[name]
        v = state.v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        param -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon)
