import numpy as np
import pytest

from dressedcavity import (
    ConvergenceFailure,
    DressedAtomParams,
    RegimeViolation,
    approx_small_cavity_spectrum,
    cotangent_residual,
    field_frequencies,
    secular_residual,
    solve_eigenfrequencies,
)
from dressedcavity.spectrum import truncated_mode_sum, truncated_mode_sum_sq

# frozen first-order values at delta=0.1, g=0.5, omega_bar=1 (direct evaluation)
OM0_APPROX = 0.8952802448803402
OM1_APPROX = 5.3183098861837905
OM2_APPROX = 10.159154943091895


class TestParams:
    def test_derived_quantities(self):
        p = DressedAtomParams(omega_bar=1.0, g=0.5, radius=2.0, c=1.0, n_modes=5)
        assert p.delta_omega * p.radius / p.c == pytest.approx(np.pi, rel=1e-15)
        assert p.eta**2 == pytest.approx(4 * p.g * p.delta_omega / np.pi, rel=1e-15)
        assert p.delta == pytest.approx(p.g * p.radius / (np.pi * p.c), rel=1e-15)
        assert p.kappa_sq == pytest.approx(0.75)

    def test_from_delta_round_trip(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=3)
        assert p.delta == pytest.approx(0.1, rel=1e-15)
        assert p.delta_omega == pytest.approx(5.0, rel=1e-15)

    @pytest.mark.parametrize("bad", [
        dict(omega_bar=-1.0, g=0.5, radius=1.0),
        dict(omega_bar=1.0, g=0.0, radius=1.0),
        dict(omega_bar=1.0, g=0.5, radius=-2.0),
        dict(omega_bar=1.0, g=0.5, radius=1.0, n_modes=0),
    ])
    def test_rejects_bad_inputs(self, bad):
        with pytest.raises(ValueError):
            DressedAtomParams(**bad)


class TestFieldFrequencies:
    def test_unit_spacing(self):
        p = DressedAtomParams(omega_bar=1.0, g=0.1, radius=np.pi, c=1.0, n_modes=3)
        assert field_frequencies(p) == pytest.approx([1.0, 2.0, 3.0], rel=1e-15)

    def test_pi_spacing(self):
        p = DressedAtomParams(omega_bar=1.0, g=0.1, radius=1.0, c=1.0, n_modes=2)
        assert field_frequencies(p) == pytest.approx([np.pi, 2 * np.pi], rel=1e-15)

    def test_delta_parameterization(self):
        # delta=0.1, g=0.5 puts the first mode at g/delta = 5
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=1)
        assert field_frequencies(p) == pytest.approx([5.0], rel=1e-14)


class TestSolve:
    def test_lowest_root_near_first_order_value(self, fig_spectrum):
        assert fig_spectrum.bigomegas[0] == pytest.approx(OM0_APPROX, rel=0.02)

    def test_field_roots_near_first_order_values(self, fig_spectrum):
        assert fig_spectrum.bigomegas[1] == pytest.approx(OM1_APPROX, rel=0.01)
        assert fig_spectrum.bigomegas[2] == pytest.approx(OM2_APPROX, rel=0.01)

    def test_method_tag(self, fig_spectrum):
        assert fig_spectrum.method == "exact-roots"

    def test_interlacing(self, fig_spectrum):
        om, bo = fig_spectrum.omegas, fig_spectrum.bigomegas
        assert bo[0] < om[0]
        assert np.all(bo[1:] > om)
        assert np.all(bo[1:-1] < om[1:])

    @pytest.mark.parametrize("n_modes", [1, 2, 7, 40])
    def test_residuals_small_at_all_roots(self, n_modes):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=n_modes)
        spec = solve_eigenfrequencies(p)
        lam = spec.bigomegas**2
        resid = np.abs(secular_residual(spec.bigomegas, p))
        slope = 1.0 + p.eta_sq * lam * truncated_mode_sum_sq(lam, p)
        assert np.all(resid / (slope * lam) < 1e-10)

    def test_cotangent_residual_shrinks_with_mode_count(self):
        # the truncated secular roots approach the infinite-cavity condition
        res = {}
        for n in (50, 400, 1600):
            p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=n)
            spec = solve_eigenfrequencies(p)
            res[n] = abs(cotangent_residual(spec.bigomegas[0], p))
        assert res[400] < 0.2 * res[50]
        assert res[1600] < 0.3 * res[400]
        assert res[1600] < 1e-4

    def test_closed_form_evaluator_matches_direct(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.3, n_modes=120)
        lam = np.array([0.37, 3.1, 26.0, 311.7, 4001.0])
        s_direct = truncated_mode_sum(lam, p, "direct")
        s_closed = truncated_mode_sum(lam, p, "closed")
        assert s_closed == pytest.approx(s_direct, rel=1e-11)
        s2_direct = truncated_mode_sum_sq(lam, p, "direct")
        s2_closed = truncated_mode_sum_sq(lam, p, "closed")
        assert s2_closed == pytest.approx(s2_direct, rel=1e-11)

    def test_closed_form_solver_matches_direct_solver(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=150)
        direct = solve_eigenfrequencies(p, method="direct").bigomegas
        closed = solve_eigenfrequencies(p, method="closed").bigomegas
        assert closed == pytest.approx(direct, rel=1e-12)

    def test_interlacing_at_ten_thousand_modes(self):
        # ModeSpectrum construction enforces the full bracket structure
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=10_000)
        spec = solve_eigenfrequencies(p)
        assert spec.bigomegas.size == 10_001

    def test_convergence_failure_reports_interval(self, fig_params):
        with pytest.raises(ConvergenceFailure) as err:
            solve_eigenfrequencies(fig_params, max_iter=2)
        assert err.value.interval_index is not None


class TestSmallCavityApprox:
    def test_lowest_frequency(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.1, n_modes=4)
        spec = approx_small_cavity_spectrum(p)
        assert spec.method == "small-cavity-approx"
        assert spec.bigomegas[0] == pytest.approx(OM0_APPROX, rel=1e-12)
        assert spec.bigomegas[2] == pytest.approx(OM2_APPROX, rel=1e-12)

    def test_decoupling_limit(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 1e-9, n_modes=2)
        spec = approx_small_cavity_spectrum(p)
        assert spec.bigomegas[0] == pytest.approx(1.0, abs=1e-8)

    def test_regime_gate(self):
        p = DressedAtomParams.from_delta(1.0, 0.5, 0.5, n_modes=4)
        with pytest.raises(RegimeViolation):
            approx_small_cavity_spectrum(p)

    def test_matches_exact_roots_at_small_delta(self):
        # leading-order error stays below 5 delta^2 for the first ten gaps
        delta = 0.01
        p = DressedAtomParams.from_delta(1.0, 0.5, delta, n_modes=200)
        exact = solve_eigenfrequencies(p).bigomegas[:11]
        approx = approx_small_cavity_spectrum(p).bigomegas[:11]
        assert np.max(np.abs(exact - approx) / exact) < 5 * delta**2
