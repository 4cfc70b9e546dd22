"""Purity/excitation relations and the bipartite entanglement invariant.

For a qubit reduced state with mean excitation ``n`` the purity is the
quadratic ``2 n**2 - 2 n lam + 1``, where ``lam = 1 - |rho_ge|**2 / rho_ee``
is fixed by the initial coherence.  Each factor then contributes
``W = sqrt(lam**2 - 2 (1 - purity)) / 2 = |n - lam/2|`` and the sign pattern
with which W_S and W_R combine depends on where ``p`` sits relative to the
breakpoints ``1 - lam/(2 rho_ee)`` and ``lam/(2 rho_ee)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channel import QubitDensity, check_p
from .errors import PhysicalityError

DISCRIMINANT_TOL = 1e-9
PURITY_TOL = 1e-9
RHO_EE_FLOOR = 1e-12
# rho_ee within this of lam/2 counts as rho_ee <= lam/2; absorbs rounding of |alpha|^2
REGIME_TOL = 1e-12
DEFAULT_TOL = 1e-10


class Regime(str, enum.Enum):
    """Which combination of W_S and W_R equals the invariant."""

    SUM_ALWAYS = "SumAlways"  # rho_ee <= lam/2: W_S + W_R for every p
    R_MINUS_S = "RMinusS"  # p < p_low: W_R - W_S
    SUM_MID = "SumMid"  # p_low <= p <= p_high: W_S + W_R
    S_MINUS_R = "SMinusR"  # p > p_high: W_S - W_R

    def __str__(self) -> str:
        return self.value

    def combine(self, w_s: float, w_r: float) -> float:
        if self is Regime.R_MINUS_S:
            return w_r - w_s
        if self is Regime.S_MINUS_R:
            return w_s - w_r
        return w_s + w_r


def lambda_of(rho0: QubitDensity) -> float:
    """Coherence parameter ``1 - |rho_ge|^2 / rho_ee``; 1 for an (almost) unexcited qubit."""
    if rho0.rho_ee < RHO_EE_FLOOR:
        return 1.0
    return 1.0 - abs(rho0.rho_ge) ** 2 / rho0.rho_ee


def purity_from_excitation(n: float, lam: float) -> float:
    # 1 + 2n(n - lam) keeps the subtraction exact near the vertex n = lam/2
    return 1.0 + 2.0 * n * (n - lam)


def _discriminant(purity: float, lam: float) -> float:
    disc = lam * lam - 2.0 * (1.0 - purity)
    if disc < 0.0:
        if disc < -DISCRIMINANT_TOL:
            raise PhysicalityError(
                f"purity {purity!r} is below the minimum 1 - lam^2/2 = {1 - lam * lam / 2!r} for lam={lam!r}"
            )
        return 0.0
    return disc


def excitation_from_purity(purity: float, lam: float, branch: Literal["upper", "lower"]) -> float:
    """Invert :func:`purity_from_excitation` on the requested branch."""
    half = 0.5 * math.sqrt(_discriminant(purity, lam))
    if branch == "upper":
        return 0.5 * lam + half
    if branch == "lower":
        return 0.5 * lam - half
    raise ValueError(f"branch must be 'upper' or 'lower', got {branch!r}")


def w_value(purity: float, lam: float) -> float:
    return 0.5 * math.sqrt(_discriminant(purity, lam))


def w_from_state(rho, lam: float) -> float:
    """W of a single-qubit reduced state, given as a 2x2 matrix.

    Uses 2 Tr(rho^2) - 1 = |r|^2 (Bloch vector length) so that
    lam^2 - 2 (1 - purity) = |r|^2 - (1 - lam^2).  Unlike going through the
    purity as a float, this keeps full relative precision when W is near 0.
    """
    m = np.asarray(getattr(rho, "matrix", rho))
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    r2 = float((m[0, 0].real - m[1, 1].real) ** 2 + 4.0 * abs(m[0, 1]) ** 2)
    disc = r2 - (1.0 - lam) * (1.0 + lam)
    if disc < 0.0:
        if disc < -DISCRIMINANT_TOL:
            raise PhysicalityError(f"state has W^2 = {disc / 4!r} < 0 for lam={lam!r}")
        disc = 0.0
    return 0.5 * math.sqrt(disc)


def regime_boundaries(rho_ee: float, lam: float) -> tuple[float, float] | None:
    """``(p_low, p_high)`` when the sign pattern depends on p, else None."""
    if rho_ee <= 0.5 * lam + REGIME_TOL:
        return None
    return 1.0 - lam / (2.0 * rho_ee), lam / (2.0 * rho_ee)


def regime_select(rho_ee: float, lam: float, p: float) -> Regime:
    p = check_p(p)
    bounds = regime_boundaries(rho_ee, lam)
    if bounds is None:
        return Regime.SUM_ALWAYS
    p_low, p_high = bounds
    if p < p_low:
        return Regime.R_MINUS_S
    if p > p_high:
        return Regime.S_MINUS_R
    return Regime.SUM_MID


def closed_form_w(rho_ee: float, p: float) -> tuple[float, float, float]:
    """``(W_S, W_R, W_M)`` for a diagonal initial state (lam = 1)."""
    return abs(rho_ee * (1.0 - p) - 0.5), abs(rho_ee * p - 0.5), abs(rho_ee - 0.5)


def invariant_lhs(rho_ee: float, lam: float, w_m: float) -> float:
    """The constant side: ``lam/2 + W_M`` if rho_ee <= lam/2, else ``lam/2 - W_M``."""
    return 0.5 * lam + w_m if rho_ee <= 0.5 * lam + REGIME_TOL else 0.5 * lam - w_m


@dataclass(frozen=True)
class InvariantReport:
    lam: float
    rho_ee: float
    p: float
    regime: Regime
    W_M: float
    W_S: float
    W_R: float
    lhs: float
    rhs: float
    residual: float
    tolerance: float = DEFAULT_TOL
    stderr_WS: float | None = None
    stderr_WR: float | None = None
    stderr_WM: float | None = None
    stderr_lhs: float | None = None
    stderr_rhs: float | None = None

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def boundaries(self) -> tuple[float, float] | None:
        return regime_boundaries(self.rho_ee, self.lam)


def _check_purity(name: str, value: float) -> float:
    value = float(value)
    if not 0.5 - PURITY_TOL <= value <= 1.0 + PURITY_TOL:
        raise PhysicalityError(f"purity of {name} = {value!r} outside [1/2, 1]")
    return value


def _w_of(name: str, value, lam: float) -> float:
    if np.ndim(getattr(value, "matrix", value)) == 0:
        return w_value(_check_purity(name, value), lam)
    m = np.asarray(getattr(value, "matrix", value))
    _check_purity(name, float(np.vdot(m.conj().T, m).real))
    return w_from_state(m, lam)


def report_from_w(
    rho_ee: float, lam: float, p: float, w_m: float, w_s: float, w_r: float, tolerance: float = DEFAULT_TOL, **stderr
) -> InvariantReport:
    """Assemble a report from already-computed W values."""
    regime = regime_select(rho_ee, lam, p)
    lhs = invariant_lhs(rho_ee, lam, w_m)
    rhs = regime.combine(w_s, w_r)
    return InvariantReport(
        lam=lam, rho_ee=rho_ee, p=p, regime=regime, W_M=w_m, W_S=w_s, W_R=w_r,
        lhs=lhs, rhs=rhs, residual=abs(lhs - rhs), tolerance=tolerance, **stderr,
    )


def evaluate_invariant(
    rho0: QubitDensity,
    purity_M,
    p: float,
    purity_S,
    purity_R,
    tolerance: float = DEFAULT_TOL,
) -> InvariantReport:
    """Check the conservation relation for one value of ``p``.

    Purities come from the caller (analytic, brute force or measured).  Each
    may instead be the party's 2x2 reduced state, in which case W is taken
    from :func:`w_from_state`.  A residual above ``tolerance`` is reported via
    ``report.ok``, not raised.
    """
    lam = lambda_of(rho0)
    w_m = _w_of("M", purity_M, lam)
    w_s = _w_of("S", purity_S, lam)
    w_r = _w_of("R", purity_R, lam)
    return report_from_w(rho0.rho_ee, lam, check_p(p), w_m, w_s, w_r, tolerance)
