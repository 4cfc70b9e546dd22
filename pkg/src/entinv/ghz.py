"""GHZ-type purifier: M entangled with N system qubits, each damped into its own reservoir.

Layout is ``(M, S1..SN, R1..RN)``.  Every single-party reduction of the
evolved state is diagonal, so all W values use lam = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import apply_damping, check_p
from .errors import CapacityError, NormalizationError
from .invariants import DEFAULT_TOL, Regime, invariant_lhs, regime_select, w_from_state
from .qstate import PureState, Subsystem, purity, reduced_density

DEFAULT_MAX_N = 8


def system_name(j: int) -> str:
    return f"S{j}"


def reservoir_name(j: int) -> str:
    return f"R{j}"


@dataclass(frozen=True)
class GhzConfig:
    n: int
    alpha: complex
    beta: complex
    p_list: tuple[float, ...]
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self.n > self.max_n:
            raise CapacityError(
                f"n={self.n} needs 2^{2 * self.n + 1} amplitudes; raise max_n to at least {self.n} "
                f"(current cap max_n={self.max_n}, 2^{2 * self.max_n + 1} amplitudes)"
            )
        a, b = complex(self.alpha), complex(self.beta)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
            raise NormalizationError(f"|alpha|^2 + |beta|^2 = {abs(a) ** 2 + abs(b) ** 2!r}, expected 1")
        p_list = tuple(check_p(p) for p in self.p_list)
        if len(p_list) != self.n:
            raise ValueError(f"expected {self.n} damping parameters, got {len(p_list)}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "p_list", p_list)

    @classmethod
    def from_alpha2(cls, n: int, alpha2: float, p_list: Sequence[float], **kw) -> "GhzConfig":
        return cls(n, math.sqrt(alpha2), math.sqrt(1.0 - alpha2), tuple(p_list), **kw)

    @property
    def rho_ee(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def labels(self) -> tuple[Subsystem, ...]:
        return (
            (Subsystem("M"),)
            + tuple(Subsystem(system_name(j)) for j in range(1, self.n + 1))
            + tuple(Subsystem(reservoir_name(j)) for j in range(1, self.n + 1))
        )


@dataclass(frozen=True)
class GhzReport:
    """Per-qubit W values and the N-party conservation check.

    ``literal_*`` is the averaged-sum relation W_M + 1/2 = mean(W_Sj + W_Rj),
    which only holds for |alpha|^2 <= 1/2.  ``lhs``/``rhs``/``residual`` apply
    the per-pair sign pattern, so they coincide with the literal form in that
    range and stay valid above it.
    """

    rho_ee: float
    W_M: float
    W_S: tuple[float, ...]
    W_R: tuple[float, ...]
    regimes: tuple[Regime, ...]
    lhs: float
    rhs: float
    literal_lhs: float
    literal_rhs: float
    tolerance: float = DEFAULT_TOL

    @property
    def n(self) -> int:
        return len(self.W_S)

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def literal_residual(self) -> float:
        return abs(self.literal_lhs - self.literal_rhs)

    @property
    def literal_applies(self) -> bool:
        return self.rho_ee <= 0.5

    @property
    def ok(self) -> bool:
        if self.literal_applies and self.literal_residual > self.tolerance:
            return False
        return self.residual <= self.tolerance


def build_ghz(cfg: GhzConfig) -> PureState:
    n = cfg.n
    t = np.zeros((2,) * (2 * n + 1), dtype=complex)
    t[(1,) + (1,) * n + (0,) * n] = cfg.alpha
    t[(0,) * (2 * n + 1)] = cfg.beta
    return PureState(cfg.labels, t.reshape(-1))


def evolve_ghz(cfg: GhzConfig, order: Sequence[int] | None = None) -> PureState:
    """Damp each S_j into R_j with p_j; ``order`` is a permutation of 1..n."""
    order = range(1, cfg.n + 1) if order is None else order
    if sorted(order) != list(range(1, cfg.n + 1)):
        raise ValueError(f"order must be a permutation of 1..{cfg.n}")
    psi = build_ghz(cfg)
    for j in order:
        psi = apply_damping(psi, system_name(j), reservoir_name(j), cfg.p_list[j - 1])
    return psi


def _w(psi: PureState, name: str) -> float:
    rho = reduced_density(psi, name)
    purity(rho)  # range check only; W itself comes from the matrix
    return w_from_state(rho, 1.0)


def evolve_and_check(cfg: GhzConfig, tolerance: float = DEFAULT_TOL) -> GhzReport:
    psi = evolve_ghz(cfg)
    lam = 1.0
    w_m = _w(psi, "M")
    w_s, w_r, regimes = [], [], []
    for j in range(1, cfg.n + 1):
        w_s.append(_w(psi, system_name(j)))
        w_r.append(_w(psi, reservoir_name(j)))
        regimes.append(regime_select(cfg.rho_ee, lam, cfg.p_list[j - 1]))
    n = cfg.n
    rhs = sum(reg.combine(s, r) for reg, s, r in zip(regimes, w_s, w_r)) / n
    return GhzReport(
        rho_ee=cfg.rho_ee,
        W_M=w_m,
        W_S=tuple(w_s),
        W_R=tuple(w_r),
        regimes=tuple(regimes),
        lhs=invariant_lhs(cfg.rho_ee, lam, w_m),
        rhs=rhs,
        literal_lhs=w_m + 0.5,
        literal_rhs=sum(s + r for s, r in zip(w_s, w_r)) / n,
        tolerance=tolerance,
    )
