"""Amplitude damping as an isometry onto a two-level reservoir.

Basis conventions: system qubit index 0 = |g>, 1 = |e>; reservoir index
0 = |phi_0>, 1 = |phi_1>.  The reservoir is kept two-level because only the
{phi_0, phi_1} block is ever populated by this map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LabelError, PhysicalityError, PreconditionError
from .qstate import DensityMatrix, PureState, Subsystem

#: excitation-number operators in the {g, e} and truncated {phi_0, phi_1} bases
N_SYSTEM = np.diag([0.0, 1.0])
N_RESERVOIR = np.diag([0.0, 1.0])

FRESH_TOL = 1e-12
QUBIT_TOL = 1e-12


def check_p(p: float) -> float:
    """Validate a damping parameter and return it as float."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise PhysicalityError(f"damping parameter p={p!r} outside [0, 1]")
    return p


@dataclass(frozen=True)
class QubitDensity:
    """Single-qubit density matrix in the {g, e} basis.

    ``rho_ge`` is the upper off-diagonal element; ``rho_eg`` is its conjugate.
    """

    rho_gg: float
    rho_ee: float
    rho_ge: complex = 0.0

    def __post_init__(self):
        gg, ee = float(self.rho_gg), float(self.rho_ee)
        ge = complex(self.rho_ge)
        if abs(gg + ee - 1.0) > QUBIT_TOL:
            raise PhysicalityError(f"rho_gg + rho_ee = {gg + ee!r}, expected 1")
        if not (-QUBIT_TOL <= ee <= 1.0 + QUBIT_TOL and -QUBIT_TOL <= gg <= 1.0 + QUBIT_TOL):
            raise PhysicalityError(f"populations ({gg!r}, {ee!r}) outside [0, 1]")
        if abs(ge) ** 2 > gg * ee + QUBIT_TOL:
            raise PhysicalityError(f"|rho_ge|^2 = {abs(ge) ** 2!r} exceeds rho_gg*rho_ee = {gg * ee!r}")
        object.__setattr__(self, "rho_gg", gg)
        object.__setattr__(self, "rho_ee", ee)
        object.__setattr__(self, "rho_ge", ge)

    @classmethod
    def from_excited(cls, rho_ee: float, rho_ge: complex = 0.0) -> "QubitDensity":
        return cls(1.0 - rho_ee, rho_ee, rho_ge)

    @classmethod
    def from_matrix(cls, m) -> "QubitDensity":
        if isinstance(m, DensityMatrix):
            if m.dims != (2,):
                raise LabelError(f"expected a single qubit, got dims {m.dims}")
            m = m.matrix
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1])

    @property
    def rho_eg(self) -> complex:
        return self.rho_ge.conjugate()

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho_gg, self.rho_ge], [self.rho_eg, self.rho_ee]], dtype=complex)

    def as_density(self, name: str = "S") -> DensityMatrix:
        return DensityMatrix((Subsystem(name, 2),), self.matrix)


@dataclass(frozen=True)
class Schedule:
    """Time parameterization p(t) of the damping strength.

    ``exponential`` models spontaneous emission, p = 1 - exp(-rate t);
    ``rabi`` models resonant exchange with a single cavity mode,
    p = sin^2(rate t); ``explicit`` looks up p from ``values`` by integer
    step index.
    """

    kind: str
    rate: float | None = None
    values: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind in ("exponential", "rabi"):
            if self.rate is None or not self.rate > 0:
                raise PhysicalityError(f"{self.kind} schedule needs a positive rate, got {self.rate!r}")
        elif self.kind == "explicit":
            vals = tuple(check_p(v) for v in self.values)
            if not vals:
                raise PhysicalityError("explicit schedule needs at least one p value")
            object.__setattr__(self, "values", vals)
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def exponential(cls, rate: float) -> "Schedule":
        return cls("exponential", rate=rate)

    @classmethod
    def rabi(cls, coupling: float) -> "Schedule":
        return cls("rabi", rate=coupling)

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "Schedule":
        return cls("explicit", values=tuple(values))


def schedule_to_p(s: Schedule, t: float) -> float:
    if t < 0:
        raise PreconditionError(f"time must be non-negative, got {t!r}")
    if s.kind == "exponential":
        return -math.expm1(-s.rate * t)
    if s.kind == "rabi":
        return math.sin(s.rate * t) ** 2
    if int(t) != t or t >= len(s.values):
        raise PreconditionError(f"explicit schedule has {len(s.values)} steps, got index {t!r}")
    return s.values[int(t)]


def _pair_axes(state: PureState, system_label: str, reservoir_label: str) -> tuple[int, int]:
    if system_label == reservoir_label:
        raise LabelError("system and reservoir must be different subsystems")
    s_ax, r_ax = state.axis(system_label), state.axis(reservoir_label)
    if state.dims[s_ax] != 2:
        raise LabelError(f"system {system_label!r} must be a qubit, has dim {state.dims[s_ax]}")
    if state.dims[r_ax] != 2:
        raise LabelError(f"reservoir {reservoir_label!r} must be two-level, has dim {state.dims[r_ax]}")
    return s_ax, r_ax


def apply_damping(state: PureState, system_label: str, reservoir_label: str, p: float) -> PureState:
    """Apply |g,phi0> -> |g,phi0>, |e,phi0> -> sqrt(1-p)|e,phi0> + sqrt(p)|g,phi1>.

    The reservoir factor must already be present and unexcited; every other
    factor is left alone.
    """
    p = check_p(p)
    s_ax, r_ax = _pair_axes(state, system_label, reservoir_label)
    t = np.moveaxis(state.tensor(), (s_ax, r_ax), (0, 1))
    if np.max(np.abs(t[:, 1]), initial=0.0) > FRESH_TOL:
        raise PreconditionError(f"reservoir {reservoir_label!r} is not in its ground state")
    out = np.zeros_like(t)
    out[0, 0] = t[0, 0]
    out[1, 0] = math.sqrt(1.0 - p) * t[1, 0]
    out[0, 1] = math.sqrt(p) * t[1, 0]
    out = np.moveaxis(out, (0, 1), (s_ax, r_ax))
    return PureState(state.labels, out.reshape(-1))


def evolved_reduced(rho0: QubitDensity, p: float) -> tuple[QubitDensity, QubitDensity]:
    """Closed-form system and reservoir states after damping with strength ``p``."""
    p = check_p(p)
    ee, ge = rho0.rho_ee, rho0.rho_ge
    rho_s = QubitDensity(1.0 - ee * (1.0 - p), ee * (1.0 - p), ge * math.sqrt(1.0 - p))
    rho_r = QubitDensity(1.0 - ee * p, ee * p, ge * math.sqrt(p))
    return rho_s, rho_r


def excitations(rho0: QubitDensity, p: float) -> tuple[float, float, float]:
    """Mean excitation numbers ``(n_S, n_R, n_S + n_R)``; the total equals rho_ee."""
    p = check_p(p)
    n_s = rho0.rho_ee * (1.0 - p)
    n_r = rho0.rho_ee * p
    return n_s, n_r, n_s + n_r


def mean_number(rho: QubitDensity | DensityMatrix, op: np.ndarray = N_SYSTEM) -> float:
    """``Tr(rho op)`` for a single two-level factor."""
    m = rho.matrix
    return float(np.trace(m @ op).real)
