"""Dense state vectors and density matrices over labeled subsystems.

Every composite object carries an ordered tuple of :class:`Subsystem` labels;
reductions address factors by name, never by axis position.  Values are
immutable once constructed (the backing arrays are flagged read-only).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import LabelError, NormalizationError, PhysicalityError

NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-9
PURITY_TOL = 1e-9


@dataclass(frozen=True)
class Subsystem:
    name: str
    dim: int = 2

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise LabelError(f"subsystem name must be a non-empty string, got {self.name!r}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise LabelError(f"subsystem {self.name!r} needs dim >= 2, got {self.dim}")


def _check_labels(labels: Sequence[Subsystem]) -> tuple[Subsystem, ...]:
    labels = tuple(labels)
    if not labels:
        raise LabelError("at least one subsystem label is required")
    seen = set()
    for lab in labels:
        if not isinstance(lab, Subsystem):
            raise LabelError(f"expected Subsystem, got {type(lab).__name__}")
        if lab.name in seen:
            raise LabelError(f"duplicate subsystem name {lab.name!r}")
        seen.add(lab.name)
    return labels


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


class _Labeled:
    labels: tuple[Subsystem, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(lab.dim for lab in self.labels)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LabelError(f"unknown subsystem {name!r}; have {list(self.names)}") from None


@dataclass(frozen=True, eq=False)
class PureState(_Labeled):
    """Normalized ket over an ordered list of subsystems.

    Amplitudes are stored flat in row-major order of ``labels`` (the first
    label is the most significant index).  A norm off by less than
    ``NORM_TOL`` is renormalized; anything worse raises
    :class:`NormalizationError`.
    """

    labels: tuple[Subsystem, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        expected = int(np.prod([lab.dim for lab in labels]))
        if amps.size != expected:
            raise LabelError(f"{amps.size} amplitudes given for total dimension {expected}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", _frozen(amps / norm))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix(_Labeled):
    """Hermitian, unit-trace, positive semidefinite matrix over labeled subsystems."""

    labels: tuple[Subsystem, ...]
    matrix: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        mat = np.asarray(self.matrix, dtype=complex)
        side = int(np.prod([lab.dim for lab in labels]))
        if mat.shape != (side, side):
            raise LabelError(f"matrix shape {mat.shape} does not match total dimension {side}")
        herm_err = np.max(np.abs(mat - mat.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise PhysicalityError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise PhysicalityError(f"trace {tr!r} differs from 1")
        lam_min = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
        if lam_min < -POSITIVITY_TOL:
            raise PhysicalityError(f"negative eigenvalue {lam_min:.3g}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", _frozen(mat))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


def basis_state(labels: Sequence[Subsystem], indices: Sequence[int]) -> PureState:
    """Computational basis ket with the given per-subsystem indices."""
    labels = _check_labels(labels)
    if len(indices) != len(labels):
        raise LabelError("one index per subsystem is required")
    amps = np.zeros([lab.dim for lab in labels], dtype=complex)
    amps[tuple(indices)] = 1.0
    return PureState(labels, amps.reshape(-1))


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product ``a ⊗ b`` with labels concatenated in that order."""
    clash = set(a.names) & set(b.names)
    if clash:
        raise LabelError(f"duplicate subsystem name {sorted(clash)[0]!r}")
    return PureState(a.labels + b.labels, np.kron(a.amplitudes, b.amplitudes))


def density_from_pure(psi: PureState) -> DensityMatrix:
    return DensityMatrix(psi.labels, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def _resolve_keep(obj: _Labeled, keep: Iterable[str]) -> list[int]:
    if isinstance(keep, str):
        keep = (keep,)
    keep = set(keep)
    if not keep:
        raise LabelError("keep must name at least one subsystem")
    unknown = keep - set(obj.names)
    if unknown:
        raise LabelError(f"unknown subsystem {sorted(unknown)[0]!r}; have {list(obj.names)}")
    return [i for i, n in enumerate(obj.names) if n in keep]


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every subsystem not named in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    kept = _resolve_keep(rho, keep)
    if len(kept) == len(rho.labels):
        return rho
    n = len(rho.labels)
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # row axis i -> index i, column axis i -> index n+i, traced columns reuse the row index
    col_idx = [n + i if i in kept else i for i in range(n)]
    out_idx = kept + [n + i for i in kept]
    red = np.einsum(t, list(range(n)) + col_idx, out_idx)
    side = int(np.prod([rho.dims[i] for i in kept]))
    return DensityMatrix(tuple(rho.labels[i] for i in kept), red.reshape(side, side))


def reduced_density(psi: PureState, keep: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix of a pure state, contracted on the ket directly.

    Equivalent to ``partial_trace(density_from_pure(psi), keep)`` but never
    forms the full projector, so it stays cheap for the large GHZ layouts.
    """
    kept = _resolve_keep(psi, keep)
    rest = [i for i in range(len(psi.labels)) if i not in kept]
    side = int(np.prod([psi.dims[i] for i in kept]))
    m = np.transpose(psi.tensor(), kept + rest).reshape(side, -1)
    return DensityMatrix(tuple(psi.labels[i] for i in kept), m @ m.conj().T)


def purity_and_schmidt(rho: DensityMatrix) -> tuple[float, float]:
    """Return ``(Tr rho**2, 1 / Tr rho**2)``.

    The second value is the Schmidt weight of the bipartition
    (this factor | everything else) when ``rho`` is a reduction of a pure state.
    """
    m = rho.matrix
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    pur_c = np.vdot(m.conj().T, m)
    if abs(pur_c.imag) >= 1e-12:
        raise PhysicalityError(f"purity has imaginary part {pur_c.imag:.3g}")
    purity = float(pur_c.real)
    d = m.shape[0]
    if purity < 1.0 / d - PURITY_TOL or purity > 1.0 + PURITY_TOL:
        raise PhysicalityError(f"purity {purity!r} outside [1/{d}, 1]")
    return purity, 1.0 / purity


def purity(rho: DensityMatrix) -> float:
    return purity_and_schmidt(rho)[0]
