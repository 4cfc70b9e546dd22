"""Randomized property suites behind ``entinv verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import N_RESERVOIR, N_SYSTEM, apply_damping, excitations, mean_number
from .experiment import sagnac_transform, target_state, with_reservoir
from .ghz import GhzConfig, evolve_and_check
from .invariants import (
    DEFAULT_TOL,
    evaluate_invariant,
    excitation_from_purity,
    lambda_of,
    purity_from_excitation,
)
from .qstate import purity, reduced_density
from .tripartite import PurificationAmplitudes, build_initial, evolve_tripartite, single_party_states

P_GRID = np.linspace(0.0, 1.0, 11)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    count: int

    @property
    def passed(self) -> bool:
        return self.value < self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: max error {self.value:.3e} (threshold {self.threshold:.0e}, {self.count} cases)"


def conservation(draws: int, rng: np.random.Generator, tol: float = DEFAULT_TOL) -> tuple[CheckResult, CheckResult]:
    """Invariant residual on brute-force reductions, and rho_ee recovered from the purity of M."""
    worst, worst_rec = 0.0, 0.0
    for _ in range(draws):
        amp = PurificationAmplitudes.random(rng)
        rho0 = amp.rho0
        lam = lambda_of(rho0)
        psi0 = build_initial(amp)
        for p in P_GRID:
            red = single_party_states(evolve_tripartite(psi0, p))
            rep = evaluate_invariant(rho0, red["M"], p, red["S"], red["R"])
            worst = max(worst, rep.residual)
        branch = "lower" if rho0.rho_ee <= lam / 2 else "upper"
        rec = excitation_from_purity(purity(reduced_density(psi0, "M")), lam, branch)
        worst_rec = max(worst_rec, abs(rec - rho0.rho_ee))
    n = draws * len(P_GRID)
    return (
        CheckResult("invariant conservation (random purifications)", worst, tol, n),
        CheckResult("rho_ee recovered from purity of M", worst_rec, 1e-12, draws),
    )


def excitation_conservation(draws: int, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        amp = PurificationAmplitudes.random(rng)
        psi0 = build_initial(amp)
        for p in P_GRID:
            red = single_party_states(evolve_tripartite(psi0, p), ("S", "R"))
            brute = mean_number(red["S"], N_SYSTEM) + mean_number(red["R"], N_RESERVOIR)
            analytic = excitations(amp.rho0, p)[2]
            worst = max(worst, abs(brute - amp.rho_ee), abs(analytic - amp.rho_ee))
    return CheckResult("excitation number conservation", worst, 1e-12, draws * len(P_GRID))


def ghz_law(draws: int, rng: np.random.Generator, n_max: int = 6, tol: float = DEFAULT_TOL) -> CheckResult:
    worst = 0.0
    for n in range(1, n_max + 1):
        for _ in range(draws):
            alpha2 = rng.uniform()
            phase = np.exp(2j * math.pi * rng.uniform())
            cfg = GhzConfig(n, math.sqrt(alpha2) * phase, math.sqrt(1 - alpha2), tuple(rng.uniform(size=n)))
            rep = evolve_and_check(cfg, tol)
            worst = max(worst, rep.residual)
            if rep.literal_applies:
                worst = max(worst, rep.literal_residual)
    return CheckResult(f"GHZ conservation, n=1..{n_max}", worst, tol, draws * n_max)


def channel_equivalence(points: int = 19) -> CheckResult:
    psi = with_reservoir(target_state(0.73))
    worst = 0.0
    for theta in np.linspace(0.0, math.pi / 2, points):
        a = sagnac_transform(psi, theta).amplitudes
        b = apply_damping(psi, "S", "R", math.sin(theta) ** 2).amplitudes
        worst = max(worst, float(np.max(np.abs(a - b))))
    return CheckResult("interferometer == amplitude damping", worst, 1e-12, points)


def quadratic_round_trip(pairs: int, rng: np.random.Generator) -> CheckResult:
    """Round trip n -> purity -> n, error measured in units of the achievable accuracy.

    Storing the purity as a double perturbs the discriminant by a few ulps;
    near the vertex n = lam/2 that is amplified by 1 / (8 |n - lam/2|), so the
    allowed error is ``1e-12 + 4 eps / (8 |n - lam/2|)``.  The reported value is
    the worst error divided by that allowance (passes below 1).
    """
    lam = rng.uniform(size=pairs)
    n = rng.uniform(size=pairs) * lam
    eps = np.finfo(float).eps
    worst = 0.0
    for ni, li in zip(n, lam):
        branch = "upper" if ni >= li / 2 else "lower"
        back = excitation_from_purity(purity_from_excitation(ni, li), li, branch)
        gap = abs(ni - li / 2)
        allowed = 1e-12 + (4 * eps / (8 * gap) if gap > 0 else math.inf)
        worst = max(worst, abs(back - ni) / allowed)
    return CheckResult("purity quadratic round trip (error / conditioning allowance)", worst, 1.0, pairs)


def run_all(draws: int = 1000, seed: int = 0, ghz_draws: int = 200, tol: float = DEFAULT_TOL) -> list[CheckResult]:
    ss = np.random.SeedSequence(seed)
    rngs = [np.random.default_rng(s) for s in ss.spawn(4)]
    results = list(conservation(draws, rngs[0], tol))
    results.append(excitation_conservation(draws, rngs[1]))
    results.append(ghz_law(ghz_draws, rngs[2], tol=tol))
    results.append(channel_equivalence())
    results.append(quadratic_round_trip(10 * draws, rngs[3]))
    return results
