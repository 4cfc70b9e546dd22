import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from entinv.channel import QubitDensity, evolved_reduced, excitations
from entinv.errors import PhysicalityError
from entinv.invariants import (
    Regime,
    closed_form_w,
    evaluate_invariant,
    excitation_from_purity,
    lambda_of,
    purity_from_excitation,
    regime_boundaries,
    regime_select,
    w_from_state,
    w_value,
)
from entinv.qstate import purity, reduced_density
from entinv.tripartite import PurificationAmplitudes, build_initial, evolve_tripartite

THIRD = 1 / math.sqrt(3)


def analytic_purities(rho_ee, p):
    rho0 = QubitDensity.from_excited(rho_ee)
    lam = lambda_of(rho0)
    n_s, n_r, _ = excitations(rho0, p)
    return rho0, purity_from_excitation(rho_ee, lam), purity_from_excitation(n_s, lam), purity_from_excitation(n_r, lam)


class TestLambda:
    def test_diagonal(self):
        assert lambda_of(QubitDensity.from_excited(0.73)) == 1.0

    def test_coherent(self):
        assert lambda_of(QubitDensity.from_excited(1 / 3, 1 / 3)) == pytest.approx(2 / 3, abs=1e-15)
        # same state reached through its purification
        amp = PurificationAmplitudes(THIRD, THIRD, THIRD, 0)
        assert lambda_of(amp.rho0) == pytest.approx(2 / 3, abs=1e-15)

    def test_unexcited_convention(self):
        assert lambda_of(QubitDensity.from_excited(0.0)) == 1.0


class TestQuadratic:
    def test_pure_endpoint(self):
        assert purity_from_excitation(0.0, 0.8) == 1.0

    def test_vertex(self):
        assert purity_from_excitation(0.35, 0.7) == pytest.approx(1 - 0.7**2 / 2, abs=1e-15)

    def test_against_eigenvalues(self):
        rho_m = reduced_density(build_initial(PurificationAmplitudes.from_rho_ee(0.31)), "M")
        eig = np.linalg.eigvalsh(rho_m.matrix)
        assert purity_from_excitation(0.31, 1.0) == pytest.approx(np.sum(eig**2), abs=1e-14)
        assert purity_from_excitation(0.31, 1.0) == pytest.approx(0.5722, abs=1e-14)

    def test_inverse_endpoints(self):
        assert excitation_from_purity(1.0, 1.0, "lower") == 0.0
        assert excitation_from_purity(1.0, 1.0, "upper") == 1.0

    def test_inverse_value(self):
        assert excitation_from_purity(0.5722, 1.0, "lower") == pytest.approx(0.31, abs=1e-14)

    def test_double_root(self):
        lam = 0.6
        pur = 1 - lam**2 / 2
        assert excitation_from_purity(pur, lam, "upper") == pytest.approx(lam / 2, abs=1e-8)
        assert excitation_from_purity(pur, lam, "lower") == pytest.approx(lam / 2, abs=1e-8)

    def test_discriminant_clamp_and_reject(self):
        assert w_value(0.5 - 2e-10, 1.0) == 0.0
        with pytest.raises(PhysicalityError):
            w_value(0.4, 1.0)

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            excitation_from_purity(0.9, 1.0, "middle")


class TestW:
    def test_pure(self):
        assert w_value(1.0, 1.0) == 0.5

    def test_from_purity(self):
        assert w_value(0.5722, 1.0) == pytest.approx(abs(0.31 - 0.5), abs=1e-14)

    def test_vertex(self):
        assert w_value(1 - 0.8**2 / 2, 0.8) == pytest.approx(0.0, abs=1e-8)

    def test_matrix_route_agrees(self):
        for rho_ee, ge in [(0.4, 0.2), (0.73, 0.1 - 0.3j), (0.5, 0.0), (1e-3, 0.0)]:
            rho0 = QubitDensity.from_excited(rho_ee, ge)
            lam = lambda_of(rho0)
            s, _ = evolved_reduced(rho0, 0.3)
            pur = float(np.sum(np.abs(s.matrix) ** 2))
            assert w_from_state(s.matrix, lam) == pytest.approx(w_value(pur, lam), abs=1e-7)
            assert w_from_state(s.matrix, lam) == pytest.approx(abs(s.rho_ee - lam / 2), abs=1e-14)


class TestRegime:
    def test_low_excitation_always_sum(self):
        assert {regime_select(0.31, 1.0, p) for p in np.linspace(0, 1, 21)} == {Regime.SUM_ALWAYS}

    def test_boundaries(self):
        lo, hi = regime_boundaries(0.73, 1.0)
        assert lo == pytest.approx(0.31507, abs=5e-6)
        assert hi == pytest.approx(0.68493, abs=5e-6)
        assert regime_select(0.73, 1.0, 0.5) is Regime.SUM_MID

    def test_late(self):
        assert regime_select(0.73, 1.0, 0.9) is Regime.S_MINUS_R

    def test_early(self):
        assert regime_select(0.73, 1.0, 0.1) is Regime.R_MINUS_S

    def test_closed_middle_interval(self):
        lo, hi = regime_boundaries(0.73, 1.0)
        assert regime_select(0.73, 1.0, lo) is Regime.SUM_MID
        assert regime_select(0.73, 1.0, hi) is Regime.SUM_MID

    def test_equality_counts_as_sum_always(self):
        assert regime_select(math.sqrt(0.5) ** 2, 1.0, 0.0) is Regime.SUM_ALWAYS


class TestClosedForm:
    @pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 1.0])
    def test_half_excited(self, p):
        w_s, w_r, w_m = closed_form_w(0.5, p)
        assert (w_s, w_r, w_m) == pytest.approx((p / 2, (1 - p) / 2, 0.0), abs=1e-15)
        assert w_s + w_r == pytest.approx(0.5, abs=1e-15)

    def test_start(self):
        assert closed_form_w(0.73, 0.0) == pytest.approx((0.23, 0.5, 0.23), abs=1e-15)

    def test_ground(self):
        assert closed_form_w(0.0, 0.4) == (0.5, 0.5, 0.5)


class TestEvaluate:
    def test_sum_mid(self):
        rho0, pm, ps, pr = analytic_purities(0.73, 0.5)
        rep = evaluate_invariant(rho0, pm, 0.5, ps, pr)
        assert rep.regime is Regime.SUM_MID
        assert rep.lhs == pytest.approx(0.27, abs=1e-12)
        assert rep.rhs == pytest.approx(0.27, abs=1e-12)
        assert rep.residual < 1e-12

    @pytest.mark.parametrize("p", [0.0, 0.33, 0.8, 1.0])
    def test_sum_always(self, p):
        rho0, pm, ps, pr = analytic_purities(0.31, p)
        rep = evaluate_invariant(rho0, pm, p, ps, pr)
        assert rep.regime is Regime.SUM_ALWAYS
        assert rep.lhs == pytest.approx(0.69, abs=1e-12)
        assert rep.residual < 1e-12

    def test_general_lambda_at_vertex(self, rng):
        # rho_ee = lam/2 exactly: W_M = sqrt(~0)/2 inherits sqrt(eps) rounding,
        # so 1e-12 is out of reach in double precision here
        amp = PurificationAmplitudes(THIRD, THIRD, THIRD, 0)
        psi0 = build_initial(amp)
        for p in rng.uniform(size=5):
            psi = evolve_tripartite(psi0, p)
            pur = {k: purity(reduced_density(psi, k)) for k in "MSR"}
            rep = evaluate_invariant(amp.rho0, pur["M"], p, pur["S"], pur["R"])
            assert rep.lam == pytest.approx(2 / 3, abs=1e-14)
            assert rep.regime is Regime.SUM_ALWAYS
            assert rep.residual < 1e-7

    def test_general_lambda_off_vertex(self, rng):
        amp = PurificationAmplitudes(0.5, 0.5, 0.5, 0.5)  # rho_ee = 1/2, lam = 1/2
        psi0 = build_initial(amp)
        for p in np.concatenate([rng.uniform(size=5), [0.0, 0.5, 1.0]]):
            psi = evolve_tripartite(psi0, p)
            pur = {k: purity(reduced_density(psi, k)) for k in "MSR"}
            rep = evaluate_invariant(amp.rho0, pur["M"], p, pur["S"], pur["R"])
            assert rep.lam == pytest.approx(0.5, abs=1e-14)
            assert rep.lhs == pytest.approx(0.0, abs=1e-12)
            assert rep.residual < 1e-12

    def test_nonphysical_purity(self):
        with pytest.raises(PhysicalityError):
            evaluate_invariant(QubitDensity.from_excited(0.3), 1.2, 0.1, 0.9, 0.9)

    def test_residual_reported_not_raised(self):
        rho0, pm, ps, pr = analytic_purities(0.31, 0.4)
        rep = evaluate_invariant(rho0, pm, 0.4, 1.0, pr)
        assert not rep.ok and rep.residual > 0.01


def test_continuity_at_boundaries():
    for rho_ee in (0.6, 0.73, 0.9, 1.0):
        lo, hi = regime_boundaries(rho_ee, 1.0)
        w_s, w_r, _ = closed_form_w(rho_ee, lo)
        assert abs(Regime.R_MINUS_S.combine(w_s, w_r) - Regime.SUM_MID.combine(w_s, w_r)) < 1e-12
        w_s, w_r, _ = closed_form_w(rho_ee, hi)
        assert abs(Regime.SUM_MID.combine(w_s, w_r) - Regime.S_MINUS_R.combine(w_s, w_r)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(rho_ee=st.floats(0, 1), p=st.floats(0, 1))
def test_closed_form_matches_purity_route(rho_ee, p):
    w_s, w_r, w_m = closed_form_w(rho_ee, p)
    # the purity route loses accuracy as W -> 0 (sqrt of a small difference)
    for w, n in ((w_s, rho_ee * (1 - p)), (w_r, rho_ee * p), (w_m, rho_ee)):
        assume(w > 1e-4)
        assert w_value(purity_from_excitation(n, 1.0), 1.0) == pytest.approx(w, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.floats(0, 1), lam=st.floats(0.01, 1))
def test_round_trip_well_conditioned(n, lam):
    n = n * lam
    assume(abs(n - lam / 2) > 1e-4)
    branch = "upper" if n >= lam / 2 else "lower"
    assert excitation_from_purity(purity_from_excitation(n, lam), lam, branch) == pytest.approx(n, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_lambda_bound_and_rho_ee_recovery(seed):
    amp = PurificationAmplitudes.random(np.random.default_rng(seed))
    lam = lambda_of(amp.rho0)
    assert lam >= amp.rho_ee - 1e-12
    assume(abs(amp.rho_ee - lam / 2) > 1e-4)
    pur_m = purity(reduced_density(build_initial(amp), "M"))
    branch = "lower" if amp.rho_ee <= lam / 2 else "upper"
    assert excitation_from_purity(pur_m, lam, branch) == pytest.approx(amp.rho_ee, abs=1e-12)
