"""Emulation of the two-photon amplitude-damping experiment.

Photon 1 polarization plays the purifier M, photon 2 polarization the system
S and photon 2's spatial mode the reservoir R.  Identifications: H <-> g
(index 0), V <-> e (index 1), spatial modes 0/1 <-> phi_0/phi_1.

The source imperfection model (pure target mixed with its fully dephased
version and with white noise) is a stand-in: the measured purities are known,
their microscopic origin is not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import PhysicalityError, PreconditionError
from .invariants import DEFAULT_TOL, InvariantReport, Regime, invariant_lhs, report_from_w
from .qstate import DensityMatrix, PureState, Subsystem, basis_state, tensor_product

NOISE_MODEL = "dephasing+white (stand-in)"
SOURCE_LABELS = (Subsystem("M"), Subsystem("S"))
RESERVOIR = Subsystem("R")
LABELS = SOURCE_LABELS + (RESERVOIR,)
OUTCOMES = tuple((m, s, r) for m in "HV" for s in "HV" for r in (0, 1))
THETA_TOL = 1e-12
NEGATIVE_TOL = 1e-9
FRESH_TOL = 1e-12


@dataclass(frozen=True)
class SourceModel:
    rho_ee_target: float
    dephasing_weight: float = 0.0
    white_noise_weight: float = 0.0

    def __post_init__(self):
        for name in ("rho_ee_target", "dephasing_weight", "white_noise_weight"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise PhysicalityError(f"{name}={v!r} outside [0, 1]")
            object.__setattr__(self, name, v)
        if self.dephasing_weight + self.white_noise_weight > 1.0 + 1e-12:
            raise PhysicalityError("dephasing_weight + white_noise_weight exceeds 1")

    @property
    def alpha(self) -> float:
        return math.sqrt(self.rho_ee_target)

    @property
    def beta(self) -> float:
        return math.sqrt(1.0 - self.rho_ee_target)

    @classmethod
    def with_purity(cls, rho_ee_target: float, purity: float, white_noise_weight: float = 0.0) -> "SourceModel":
        d = solve_dephasing(rho_ee_target, purity, white_noise_weight)
        return cls(rho_ee_target, d, white_noise_weight)


def target_state(rho_ee: float) -> PureState:
    """alpha|V>_M|V>_S + beta|H>_M|H>_S with |alpha|^2 = rho_ee."""
    t = np.zeros((2, 2), dtype=complex)
    t[1, 1] = math.sqrt(rho_ee)
    t[0, 0] = math.sqrt(1.0 - rho_ee)
    return PureState(SOURCE_LABELS, t.reshape(-1))


def prepare_source(m: SourceModel) -> DensityMatrix:
    psi = target_state(m.rho_ee_target).amplitudes
    proj = np.outer(psi, psi.conj())
    d, w = m.dephasing_weight, m.white_noise_weight
    rho = (1.0 - d - w) * proj + d * np.diag(proj.diagonal()) + w * np.eye(4) / 4.0
    return DensityMatrix(SOURCE_LABELS, rho)


def source_purity(rho_ee: float, dephasing_weight: float, white_noise_weight: float = 0.0) -> float:
    """Closed-form Tr(rho^2) of :func:`prepare_source`."""
    a, b = 1.0 - rho_ee, rho_ee
    c = 1.0 - dephasing_weight - white_noise_weight
    w4 = white_noise_weight / 4.0
    diag = [(1.0 - white_noise_weight) * a + w4, w4, w4, (1.0 - white_noise_weight) * b + w4]
    return sum(x * x for x in diag) + 2.0 * c * c * a * b


def solve_dephasing(rho_ee: float, purity: float, white_noise_weight: float = 0.0) -> float:
    """Dephasing weight giving the requested source purity (bisection)."""
    hi = 1.0 - white_noise_weight
    f = lambda d: source_purity(rho_ee, d, white_noise_weight) - purity
    f0, f1 = f(0.0), f(hi)
    if abs(f0) <= 1e-15:
        return 0.0
    if f0 * f1 > 0:
        lo_p = source_purity(rho_ee, hi, white_noise_weight)
        hi_p = source_purity(rho_ee, 0.0, white_noise_weight)
        raise PhysicalityError(f"purity {purity!r} not reachable; dephasing spans [{lo_p!r}, {hi_p!r}]")
    return bisect(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def with_reservoir(state: PureState | DensityMatrix) -> PureState | DensityMatrix:
    """Attach photon 2's spatial mode in |0>."""
    if isinstance(state, PureState):
        return tensor_product(state, basis_state((RESERVOIR,), (0,)))
    zero = np.zeros((2, 2))
    zero[0, 0] = 1.0
    return DensityMatrix(state.labels + (RESERVOIR,), np.kron(state.matrix, zero))


def sagnac_unitary(theta: float) -> np.ndarray:
    """4x4 unitary on (polarization, spatial mode), basis order H0, H1, V0, V1.

    Acts as |H0> -> |H0>, |V0> -> cos|V0> + sin|H1>; the |H1>, |V1> columns
    complete it to a unitary and are irrelevant on inputs with mode 0.
    """
    c, s = math.cos(theta), math.sin(theta)
    u = np.eye(4, dtype=complex)
    u[1, 1], u[2, 1] = c, -s
    u[1, 2], u[2, 2] = s, c
    return u


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not -THETA_TOL <= theta <= math.pi / 2 + THETA_TOL:
        raise PreconditionError(f"theta={theta!r} outside [0, pi/2]")
    return min(max(theta, 0.0), math.pi / 2)


def sagnac_transform(state, theta: float, system: str = "S", mode: str = "R"):
    """Apply the interferometer map to a PureState or DensityMatrix."""
    theta = _check_theta(theta)
    u = sagnac_unitary(theta)
    s_ax, r_ax = state.axis(system), state.axis(mode)
    if state.dims[s_ax] != 2 or state.dims[r_ax] != 2:
        raise PreconditionError("polarization and spatial mode must both be two-level")
    if isinstance(state, PureState):
        t = np.moveaxis(state.tensor(), (s_ax, r_ax), (0, 1))
        if np.max(np.abs(t[:, 1]), initial=0.0) > FRESH_TOL:
            raise PreconditionError(f"spatial mode {mode!r} is not in |0>")
        shape = t.shape
        out = (u @ t.reshape(4, -1)).reshape(shape)
        out = np.moveaxis(out, (0, 1), (s_ax, r_ax))
        return PureState(state.labels, out.reshape(-1))
    n = len(state.labels)
    t = state.matrix.reshape(state.dims + state.dims)
    t = np.moveaxis(t, (s_ax, r_ax, n + s_ax, n + r_ax), (0, 1, 2, 3))
    if max(np.max(np.abs(t[:, 1])), np.max(np.abs(t[:, :, :, 1]))) > FRESH_TOL:
        raise PreconditionError(f"spatial mode {mode!r} is not in |0>")
    shape = t.shape
    t = t.reshape(4, 4, -1)
    out = np.einsum("ab,bcx,dc->adx", u, t, u.conj()).reshape(shape)
    out = np.moveaxis(out, (0, 1, 2, 3), (s_ax, r_ax, n + s_ax, n + r_ax))
    return DensityMatrix(state.labels, out.reshape(state.matrix.shape))


@dataclass(frozen=True, eq=False)
class CountRecord:
    """Outcome statistics for one interferometer setting.

    ``populations`` follow :data:`OUTCOMES` order (m, s, r).  ``shots`` is
    None for the exact, infinite-statistics record.
    """

    theta: float
    shots: int | None
    counts: dict | None
    populations: np.ndarray
    stderr: np.ndarray

    @property
    def p(self) -> float:
        return math.sin(self.theta) ** 2

    def marginals(self) -> tuple[float, float, float]:
        """(P(m=V), P(s=V), P(r=1))."""
        t = np.asarray(self.populations).reshape(2, 2, 2)
        return float(t[1].sum()), float(t[:, 1].sum()), float(t[:, :, 1].sum())


def outcome_probabilities(rho: DensityMatrix) -> np.ndarray:
    """Diagonal of ``rho`` in the (M, S, R) product basis, checked and clipped."""
    if sorted(rho.names) != ["M", "R", "S"] or rho.dims != (2, 2, 2):
        raise PreconditionError(f"expected two-level subsystems M, S, R; got {rho.names} {rho.dims}")
    diag = rho.matrix.diagonal().real.reshape(rho.dims)
    diag = np.transpose(diag, [rho.axis(k) for k in ("M", "S", "R")]).reshape(-1)
    if diag.min() < -NEGATIVE_TOL:
        raise PhysicalityError(f"negative population {diag.min():.3g}")
    diag = np.clip(diag, 0.0, None)
    return diag / diag.sum()


def sample_counts(rho: DensityMatrix, shots: int, seed, theta: float = 0.0) -> CountRecord:
    """Multinomial draw of ``shots`` detection events; deterministic in ``seed``.

    ``seed`` may be an int or a :class:`numpy.random.SeedSequence`.
    """
    if int(shots) != shots or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    shots = int(shots)
    probs = outcome_probabilities(rho)
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    pops = counts / shots
    return CountRecord(
        theta=float(theta),
        shots=shots,
        counts=dict(zip(OUTCOMES, (int(c) for c in counts))),
        populations=pops,
        stderr=np.sqrt(pops * (1.0 - pops) / shots),
    )


def exact_record(rho: DensityMatrix, theta: float = 0.0) -> CountRecord:
    probs = outcome_probabilities(rho)
    return CountRecord(float(theta), None, None, probs, np.zeros_like(probs))


_COEFFS = {
    Regime.SUM_ALWAYS: (1.0, 1.0),
    Regime.SUM_MID: (1.0, 1.0),
    Regime.R_MINUS_S: (-1.0, 1.0),
    Regime.S_MINUS_R: (1.0, -1.0),
}


def estimate_invariant(rec: CountRecord, tolerance: float = DEFAULT_TOL) -> InvariantReport:
    """Invariant from marginal populations, lam = 1, W_i = |n_i - 1/2|.

    Standard errors use the multinomial covariance and the delta method;
    at n_i = 1/2 the raw binomial error of n_i is reported.
    """
    n_m, n_s, n_r = rec.marginals()
    w_m, w_s, w_r = abs(n_m - 0.5), abs(n_s - 0.5), abs(n_r - 0.5)
    report = report_from_w(n_m, 1.0, rec.p, w_m, w_s, w_r, tolerance)
    if rec.shots is None:
        zero = dict(stderr_WS=0.0, stderr_WR=0.0, stderr_WM=0.0, stderr_lhs=0.0, stderr_rhs=0.0)
        return report_from_w(n_m, 1.0, rec.p, w_m, w_s, w_r, tolerance, **zero)
    N = rec.shots
    var_m, var_s, var_r = (x * (1.0 - x) / N for x in (n_m, n_s, n_r))
    t = np.asarray(rec.populations).reshape(2, 2, 2)
    cov_sr = (float(t[:, 1, 1].sum()) - n_s * n_r) / N
    sg_s = 1.0 if n_s >= 0.5 else -1.0
    sg_r = 1.0 if n_r >= 0.5 else -1.0
    c_s, c_r = _COEFFS[report.regime]
    g_s, g_r = c_s * sg_s, c_r * sg_r
    var_rhs = g_s**2 * var_s + g_r**2 * var_r + 2.0 * g_s * g_r * cov_sr
    return report_from_w(
        n_m, 1.0, rec.p, w_m, w_s, w_r, tolerance,
        stderr_WS=math.sqrt(var_s), stderr_WR=math.sqrt(var_r), stderr_WM=math.sqrt(var_m),
        stderr_lhs=math.sqrt(var_m), stderr_rhs=math.sqrt(max(var_rhs, 0.0)),
    )


def bootstrap_stderr(rec: CountRecord, resamples: int = 200, seed=0) -> tuple[float, float]:
    """Parametric-bootstrap standard errors of (lhs, rhs), cross-check for the delta method."""
    if rec.shots is None:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(rec.shots, np.asarray(rec.populations), size=resamples) / rec.shots
    lhs, rhs = [], []
    for pops in draws:
        r = estimate_invariant(CountRecord(rec.theta, rec.shots, None, pops, np.zeros(8)))
        lhs.append(r.lhs)
        rhs.append(r.rhs)
    return float(np.std(lhs, ddof=1)), float(np.std(rhs, ddof=1))


def analytic_invariant(rho_ee: float) -> float:
    """Exact invariant value for a pure diagonal-system source (lam = 1)."""
    return invariant_lhs(rho_ee, 1.0, abs(rho_ee - 0.5))


def default_theta_grid(points: int = 19) -> np.ndarray:
    return np.linspace(0.0, math.pi / 2, points)


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceModel
    theta_grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_theta_grid()))
    shots: int = 100_000
    seed: int = 0

    def __post_init__(self):
        grid = tuple(_check_theta(t) for t in self.theta_grid)
        if not grid:
            raise ValueError("theta_grid is empty")
        if int(self.shots) != self.shots or self.shots < 1:
            raise ValueError(f"shots must be a positive integer, got {self.shots!r}")
        object.__setattr__(self, "theta_grid", grid)


@dataclass(frozen=True)
class ExperimentPoint:
    theta: float
    record: CountRecord
    report: InvariantReport


def point_seed(master: int, index: int) -> np.random.SeedSequence:
    """Independent substream for grid point ``index``; no dependence on evaluation order."""
    return np.random.SeedSequence(master, spawn_key=(index,))


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentPoint]:
    source = with_reservoir(prepare_source(cfg.source))
    points = []
    for k, theta in enumerate(cfg.theta_grid):
        rho = sagnac_transform(source, theta)
        rec = sample_counts(rho, cfg.shots, point_seed(cfg.seed, k), theta=theta)
        points.append(ExperimentPoint(theta, rec, estimate_invariant(rec)))
    return points
