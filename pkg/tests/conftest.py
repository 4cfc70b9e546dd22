import itertools

import numpy as np
import pytest

from entinv.qstate import DensityMatrix, PureState, Subsystem


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pure(rng, names, dims=None):
    dims = dims or [2] * len(names)
    z = rng.standard_normal(int(np.prod(dims))) + 1j * rng.standard_normal(int(np.prod(dims)))
    return PureState(tuple(Subsystem(n, d) for n, d in zip(names, dims)), z / np.linalg.norm(z))


def random_mixed(rng, names, dims=None, rank=3):
    dims = dims or [2] * len(names)
    side = int(np.prod(dims))
    g = rng.standard_normal((side, rank)) + 1j * rng.standard_normal((side, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T) / np.trace(m).real
    return DensityMatrix(tuple(Subsystem(n, d) for n, d in zip(names, dims)), m)


def loop_partial_trace(matrix, dims, keep_axes):
    """Index-by-index reduction; deliberately naive, used as an oracle."""
    dims = list(dims)
    kept_dims = [dims[i] for i in keep_axes]
    traced = [i for i in range(len(dims)) if i not in keep_axes]
    side = int(np.prod(kept_dims)) if kept_dims else 1
    out = np.zeros((side, side), dtype=complex)

    def flat(idx):
        f = 0
        for i, d in zip(idx, dims):
            f = f * d + i
        return f

    def kflat(idx):
        f = 0
        for i, d in zip(idx, kept_dims):
            f = f * d + i
        return f

    for row in itertools.product(*[range(d) for d in kept_dims]):
        for col in itertools.product(*[range(d) for d in kept_dims]):
            acc = 0j
            for env in itertools.product(*[range(dims[i]) for i in traced]):
                r = [0] * len(dims)
                c = [0] * len(dims)
                for a, v in zip(keep_axes, row):
                    r[a] = v
                for a, v in zip(keep_axes, col):
                    c[a] = v
                for a, v in zip(traced, env):
                    r[a] = v
                    c[a] = v
                acc += matrix[flat(r), flat(c)]
            out[kflat(row), kflat(col)] = acc
    return out


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number, title, passed, detail):
        _ACCEPTANCE.append(f"[{number}] {'PASS' if passed else 'FAIL'} {title}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
