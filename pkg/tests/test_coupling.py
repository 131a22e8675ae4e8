import math
import warnings

import numpy as np
import pytest
from scipy import optimize, stats

from einsteinrabi.constants import dipole_from_a0e
from einsteinrabi.coupling import (
    CavityGeometry,
    Scenario,
    TwoLevelSystem,
    blackbody_coupling,
    einstein_b0,
    free_space_a0,
    free_space_coupling,
    invert_a0_from_rabi,
    lossy_fixed_point,
    lossy_term_limits,
    net_quality_factor,
    renorm_blackbody,
    renorm_coherent,
    solve_cavity_coupled,
)
from einsteinrabi.errors import DomainError
from einsteinrabi.photons import PhotonField, photon_distribution, planck_density_per_photon
from einsteinrabi.specfun import polylog_neg_half

from conftest import NBAR_RYD, OMEGA_R_RYD, W0_RYD, W0_NA

A_BRUNE = 0.473053e6
QNET_BRUNE = 1.28318e6


def ryd_system(dipole=1250):
    return TwoLevelSystem(W0_RYD, dipole_from_a0e(dipole))


def test_free_space_a0_rydberg():
    assert free_space_a0(ryd_system()) == pytest.approx(15.68, rel=0.01)
    assert free_space_a0(ryd_system()) == pytest.approx(15.6765, rel=0.01)


def test_free_space_a0_sodium():
    system = TwoLevelSystem(3.198e15, dipole_from_a0e(2.5))
    assert free_space_a0(system) == pytest.approx(6.2e7, rel=0.02)


def test_free_space_a0_scaling():
    base = free_space_a0(ryd_system())
    assert free_space_a0(ryd_system(2500)) == pytest.approx(4 * base, rel=1e-14)
    doubled = TwoLevelSystem(2 * W0_RYD, dipole_from_a0e(1250))
    assert free_space_a0(doubled) == pytest.approx(8 * base, rel=1e-14)


def test_einstein_b_identity_and_frequency_independence():
    for w0 in (W0_RYD, W0_NA):
        system = TwoLevelSystem(w0, dipole_from_a0e(2.5))
        ratio = free_space_a0(system) / einstein_b0(system)
        assert ratio == pytest.approx(planck_density_per_photon(w0), rel=1e-12)
    a = TwoLevelSystem(W0_RYD, dipole_from_a0e(2.5))
    b = TwoLevelSystem(W0_NA, dipole_from_a0e(2.5))
    assert einstein_b0(a) == einstein_b0(b)


def test_invalid_system_and_geometry():
    with pytest.raises(DomainError):
        TwoLevelSystem(-1.0, 1e-29)
    with pytest.raises(DomainError):
        TwoLevelSystem(1.0, 0.0)
    with pytest.raises(DomainError):
        CavityGeometry(1e6, 0.0, 0.027)


# --- blackbody --------------------------------------------------------------

def test_renorm_blackbody_limits():
    assert renorm_blackbody(15.0, 0.0) == 15.0
    assert renorm_blackbody(15.0, 1e-9) == pytest.approx(15.0, rel=1e-8)


def test_renorm_blackbody_polylog_form():
    nbar = NBAR_RYD
    x = nbar / (1 + nbar)
    brute = math.fsum(math.sqrt(k) * x**k for k in range(1, 10001))
    assert renorm_blackbody(15.0, nbar) == pytest.approx(15.0 * brute / nbar, rel=1e-12)
    assert renorm_blackbody(15.0, nbar) == pytest.approx(15.0 * polylog_neg_half(x) / nbar, rel=1e-15)


@pytest.mark.parametrize("nbar", [1e-4, 0.0489, 0.7, 4.0])
def test_renorm_blackbody_series_identity(nbar):
    field = PhotonField.thermal_with_nbar(W0_RYD, nbar)
    n, p = photon_distribution(field)
    series = 15.0 * math.fsum(p * np.sqrt(n + 1.0))
    assert renorm_blackbody(15.0, nbar) == pytest.approx(series, rel=1e-10)
    assert renorm_blackbody(15.0, nbar) >= 15.0


def test_blackbody_coupling_invariants():
    a0 = free_space_a0(ryd_system())
    sol = blackbody_coupling(a0, NBAR_RYD, W0_RYD)
    assert sol.scenario is Scenario.BLACKBODY_THERMAL
    assert sol.omega_rabi == pytest.approx(2 * sol.g_prime * math.sqrt(NBAR_RYD + 1), rel=1e-15)
    assert planck_density_per_photon(W0_RYD) * sol.b0_coefficient == pytest.approx(a0, rel=1e-10)
    assert sol.q_net is None


def test_free_space_coupling():
    system = ryd_system()
    sol = free_space_coupling(system)
    assert sol.scenario is Scenario.FREE_SPACE
    assert sol.g_prime == free_space_a0(system)
    assert sol.b0_coefficient == einstein_b0(system)


def test_rwa_warning():
    with pytest.warns(RuntimeWarning, match="rotating-wave"):
        blackbody_coupling(0.01 * W0_RYD, 0.0, W0_RYD)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        blackbody_coupling(1e-4 * W0_RYD, 0.0, W0_RYD)


# --- cavity algebra ---------------------------------------------------------

def test_escape_probability():
    geo = CavityGeometry(7e7, 0.025, 0.027)
    assert geo.escape_probability == pytest.approx(27 / 52, rel=1e-15)
    assert geo.escape_probability == pytest.approx(0.51923, abs=1e-5)


def test_net_quality_factor_example(geometry):
    q_net = net_quality_factor(geometry, A_BRUNE, W0_RYD)
    assert q_net == pytest.approx(QNET_BRUNE, rel=1e-3)
    assert W0_RYD / q_net == pytest.approx(250210, rel=1e-3)
    assert q_net <= geometry.q_factor
    assert net_quality_factor(geometry, 0.0, W0_RYD) == geometry.q_factor


def test_lossy_fixed_point_example():
    sol = lossy_fixed_point(A_BRUNE, NBAR_RYD, QNET_BRUNE, W0_RYD)
    assert sol.omega_rabi == pytest.approx(OMEGA_R_RYD, rel=1e-3)
    assert sol.scenario is Scenario.LOSSY_THERMAL
    omega, q = sol.omega_rabi, QNET_BRUNE / W0_RYD
    quadratic = 2 * omega**2 * q + omega - 2 * A_BRUNE * (NBAR_RYD + 1)
    assert abs(quadratic) < 1e-10 * 2 * A_BRUNE * (NBAR_RYD + 1)
    s = math.sqrt(NBAR_RYD + 1)
    rhs = A_BRUNE * s / (1 + 4 * sol.g_prime * s * q)
    assert sol.g_prime == pytest.approx(rhs, rel=1e-12)


def test_lossy_fixed_point_free_space_limit():
    a0 = 1e3
    sol = lossy_fixed_point(a0, 0.3, 1e-6, W0_RYD)
    assert sol.omega_rabi == pytest.approx(2 * a0 * 1.3, rel=1e-9)


def test_lossy_fixed_point_vs_bisection():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a0 = 10 ** rng.uniform(1, 6)
        nbar = rng.uniform(0, 3)
        q_net = 10 ** rng.uniform(3, 8)
        s = math.sqrt(nbar + 1)

        def residual(g):
            return g - a0 * s / (1 + 4 * g * s * q_net / W0_RYD)

        g_ref = optimize.bisect(residual, 0.0, a0 * s, xtol=1e-14 * a0, rtol=1e-15, maxiter=400)
        g = lossy_fixed_point(a0, nbar, q_net, W0_RYD).g_prime
        assert g == pytest.approx(g_ref, rel=1e-10)


def test_lossy_fixed_point_monotone():
    a = np.geomspace(1e2, 1e6, 50)
    om = [lossy_fixed_point(x, NBAR_RYD, QNET_BRUNE, W0_RYD).omega_rabi for x in a]
    assert np.all(np.diff(om) > 0)
    nbars = np.linspace(0, 3, 50)
    om = [lossy_fixed_point(A_BRUNE, x, QNET_BRUNE, W0_RYD).omega_rabi for x in nbars]
    assert np.all(np.diff(om) > 0)


def test_invert_a0_example():
    a0 = invert_a0_from_rabi(OMEGA_R_RYD, NBAR_RYD, QNET_BRUNE, W0_RYD)
    assert a0 == pytest.approx(A_BRUNE, rel=1e-3)
    free = invert_a0_from_rabi(OMEGA_R_RYD, NBAR_RYD, 0.0, W0_RYD)
    assert free == pytest.approx(OMEGA_R_RYD / (2 * (NBAR_RYD + 1)), rel=1e-15)


def test_invert_round_trip_random():
    rng = np.random.default_rng(5)
    for _ in range(100):
        omega = 10 ** rng.uniform(3, 6)
        nbar = rng.uniform(0, 2)
        q_net = 10 ** rng.uniform(3, 8)
        a0 = invert_a0_from_rabi(omega, nbar, q_net, W0_RYD)
        back = lossy_fixed_point(a0, nbar, q_net, W0_RYD).omega_rabi
        assert back == pytest.approx(omega, rel=1e-12)


def test_coupled_solve_example(brune):
    assert brune.a0_coefficient == pytest.approx(A_BRUNE, rel=1e-3)
    assert brune.q_net == pytest.approx(QNET_BRUNE, rel=1e-3)
    assert brune.omega_rabi == pytest.approx(OMEGA_R_RYD, rel=1e-12)


def test_coupled_solve_residuals_random():
    rng = np.random.default_rng(9)
    for _ in range(100):
        omega = 10 ** rng.uniform(3, 6)
        nbar = rng.uniform(0, 2)
        geo = CavityGeometry(10 ** rng.uniform(4, 9), rng.uniform(0.005, 0.05), rng.uniform(0.005, 0.05))
        sol = solve_cavity_coupled(omega, nbar, geo, W0_RYD)
        a0, q_net = sol.a0_coefficient, sol.q_net
        inv = omega / (2 * (nbar + 1)) + omega**2 * q_net / (W0_RYD * (nbar + 1))
        assert abs(inv - a0) < 1e-10 * a0
        q_ref = 1 / (1 / geo.q_factor + geo.escape_probability * a0 / W0_RYD)
        assert abs(q_net - q_ref) < 1e-10 * q_ref


def test_coupled_solve_without_escape():
    # p0 = 1/(1 + r/h) vanishes when the mirror gap closes
    geo = CavityGeometry(7e7, 1.0, 1e-300)
    sol = solve_cavity_coupled(OMEGA_R_RYD, NBAR_RYD, geo, W0_RYD)
    assert sol.q_net == pytest.approx(7e7, rel=1e-12)
    ref = invert_a0_from_rabi(OMEGA_R_RYD, NBAR_RYD, 7e7, W0_RYD)
    assert sol.a0_coefficient == pytest.approx(ref, rel=1e-12)


def test_lossy_solution_b_identity(brune):
    ut = planck_density_per_photon(W0_RYD)
    assert ut * brune.b0_coefficient == pytest.approx(brune.a0_coefficient, rel=1e-10)


# --- coherent field ---------------------------------------------------------

def coherent_limit(a0, g, nbar, q_net):
    """Long-time emission probability with Poisson weights from scipy."""
    c = W0_RYD / q_net
    n = np.arange(200)
    p = stats.poisson.pmf(n, nbar)
    wn = 2 * g * np.sqrt(n + 1.0)
    return math.fsum(a0 * p * (n + 1) * c / (wn * (c + 2 * wn)))


def test_renorm_coherent_hits_one_half():
    sol = renorm_coherent(A_BRUNE, 0.4, QNET_BRUNE, W0_RYD)
    assert coherent_limit(A_BRUNE, sol.g_prime, 0.4, QNET_BRUNE) == pytest.approx(0.5, abs=1e-8)
    assert sol.omega_rabi == pytest.approx(2 * sol.g_prime * math.sqrt(1.4), rel=1e-15)
    assert sol.scenario is Scenario.LOSSY_COHERENT


def test_renorm_coherent_vacuum_limit():
    ref = lossy_fixed_point(A_BRUNE, 0.0, QNET_BRUNE, W0_RYD).g_prime
    assert renorm_coherent(A_BRUNE, 0.0, QNET_BRUNE, W0_RYD).g_prime == pytest.approx(ref, rel=1e-6)
    assert renorm_coherent(A_BRUNE, 1e-9, QNET_BRUNE, W0_RYD).g_prime == pytest.approx(ref, rel=1e-6)


def test_renorm_coherent_mean_method():
    sol = renorm_coherent(A_BRUNE, 0.4, QNET_BRUNE, W0_RYD, method="mean")
    ref = lossy_fixed_point(A_BRUNE, 0.4, QNET_BRUNE, W0_RYD)
    assert sol.g_prime == ref.g_prime
    with pytest.raises(DomainError):
        renorm_coherent(A_BRUNE, 0.4, QNET_BRUNE, W0_RYD, method="second-order")


def test_term_limits_closed_form():
    field = PhotonField.coherent(W0_RYD, 0.4)
    n, p = photon_distribution(field)
    g = 1.4e5
    lim = lossy_term_limits(A_BRUNE, g, n, p, QNET_BRUNE, W0_RYD)
    c = W0_RYD / QNET_BRUNE
    wn = 2 * g * np.sqrt(n + 1.0)
    assert np.allclose(lim, A_BRUNE * p * (n + 1) * c / (wn * (c + 2 * wn)), rtol=1e-15)
