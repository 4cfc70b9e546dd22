"""Purifier M, system S and reservoir R: build, evolve, reduce, sweep.

Layout is ``(M, S, R)``, each two-level.  M0/M1 are M's index 0/1, the
system uses g=0/e=1 and the reservoir starts in phi_0 = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import QubitDensity, apply_damping, check_p
from .errors import NormalizationError
from .invariants import DEFAULT_TOL, InvariantReport, evaluate_invariant
from .qstate import DensityMatrix, PureState, Subsystem, purity, reduced_density

LABELS = (Subsystem("M"), Subsystem("S"), Subsystem("R"))
AMP_TOL = 1e-9


@dataclass(frozen=True)
class PurificationAmplitudes:
    """Coefficients of a|M1 e> + b|M0 g> + c|M1 g> + d|M0 e>."""

    alpha: complex
    beta: complex
    gamma: complex = 0.0
    delta: complex = 0.0

    def __post_init__(self):
        vals = [complex(getattr(self, k)) for k in ("alpha", "beta", "gamma", "delta")]
        norm2 = sum(abs(v) ** 2 for v in vals)
        if abs(norm2 - 1.0) > AMP_TOL:
            raise NormalizationError(f"|alpha|^2+|beta|^2+|gamma|^2+|delta|^2 = {norm2!r}, expected 1")
        for k, v in zip(("alpha", "beta", "gamma", "delta"), vals):
            object.__setattr__(self, k, v)

    @classmethod
    def from_rho_ee(cls, rho_ee: float) -> "PurificationAmplitudes":
        """Diagonal-system purification sqrt(rho_ee)|M1 e> + sqrt(1-rho_ee)|M0 g>."""
        return cls(math.sqrt(rho_ee), math.sqrt(1.0 - rho_ee))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "PurificationAmplitudes":
        """Haar-uniform draw: 8 standard normals -> 4 complex numbers -> normalize."""
        z = rng.standard_normal(8)
        c = z[0::2] + 1j * z[1::2]
        c = c / np.linalg.norm(c)
        return cls(*c)

    @property
    def rho_ee(self) -> float:
        return abs(self.alpha) ** 2 + abs(self.delta) ** 2

    @property
    def rho_gg(self) -> float:
        return abs(self.beta) ** 2 + abs(self.gamma) ** 2

    @property
    def rho_ge(self) -> complex:
        return self.beta * self.delta.conjugate() + self.alpha.conjugate() * self.gamma

    @property
    def rho0(self) -> QubitDensity:
        """Initial system state obtained by tracing out M."""
        return QubitDensity(self.rho_gg, self.rho_ee, self.rho_ge)


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[float, ...]
    reports: tuple[InvariantReport, ...]

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.reports), default=0.0)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


def build_initial(amp: PurificationAmplitudes) -> PureState:
    t = np.zeros((2, 2, 2), dtype=complex)
    t[1, 1, 0] = amp.alpha
    t[0, 0, 0] = amp.beta
    t[1, 0, 0] = amp.gamma
    t[0, 1, 0] = amp.delta
    return PureState(LABELS, t.reshape(-1))


def evolve_tripartite(state: PureState, p: float) -> PureState:
    return apply_damping(state, "S", "R", p)


def rho_m_analytic(amp: PurificationAmplitudes) -> QubitDensity:
    """Reduced state of M; it never changes because M does not interact."""
    a, b, c, d = amp.alpha, amp.beta, amp.gamma, amp.delta
    return QubitDensity(
        abs(b) ** 2 + abs(d) ** 2,
        abs(a) ** 2 + abs(c) ** 2,
        b * c.conjugate() + a.conjugate() * d,
    )


def single_party_states(psi: PureState, names: Iterable[str] = ("M", "S", "R")) -> dict[str, DensityMatrix]:
    return {n: reduced_density(psi, n) for n in names}


def single_party_purities(psi: PureState, names: Iterable[str] = ("M", "S", "R")) -> dict[str, float]:
    return {n: purity(rho) for n, rho in single_party_states(psi, names).items()}


def evaluate_point(amp: PurificationAmplitudes, p: float, tolerance: float = DEFAULT_TOL) -> InvariantReport:
    """Evolve the purification to ``p`` and check the invariant on its brute-force reductions."""
    return _evaluate(amp.rho0, evolve_tripartite(build_initial(amp), p), p, tolerance)


def _evaluate(rho0: QubitDensity, psi: PureState, p: float, tolerance: float) -> InvariantReport:
    red = single_party_states(psi)
    return evaluate_invariant(rho0, red["M"], p, red["S"], red["R"], tolerance)


def run_sweep(
    amp: PurificationAmplitudes, grid: Sequence[float], tolerance: float = DEFAULT_TOL
) -> SweepResult:
    grid = tuple(check_p(p) for p in grid)
    psi0 = build_initial(amp)
    rho0 = amp.rho0
    reports = []
    for p in grid:
        reports.append(_evaluate(rho0, evolve_tripartite(psi0, p), p, tolerance))
    return SweepResult(grid, tuple(reports))


def uniform_grid(points: int) -> np.ndarray:
    if points < 1:
        raise ValueError("grid needs at least one point")
    return np.linspace(0.0, 1.0, points) if points > 1 else np.zeros(1)
