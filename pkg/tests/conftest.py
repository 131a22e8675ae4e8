from pathlib import Path

import pytest

from einsteinrabi.constants import dipole_from_a0e, hz_to_rad_s, omega_from_wavelength
from einsteinrabi.coupling import CavityGeometry, TwoLevelSystem, solve_cavity_coupled
from einsteinrabi.dynamics import RateParams
from einsteinrabi.photons import PhotonField
from einsteinrabi.transition import CavityMode, TransitionModel

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

# Rydberg microwave cavity experiment
W0_RYD = hz_to_rad_s(51.099e9)
T_RYD = 0.8
NBAR_RYD = 0.0489
OMEGA_R_RYD = 0.295310e6
GEOMETRY_RYD = (7e7, 0.025, 0.027)

# sodium D line
W0_NA = omega_from_wavelength(589.0e-9)
T_NA = 2700.0
A_OVER_NA = 0.499941
R_OVER_NA = 0.000059409


@pytest.fixture(scope="session")
def w0():
    return W0_RYD


@pytest.fixture(scope="session")
def geometry():
    return CavityGeometry(*GEOMETRY_RYD)


@pytest.fixture(scope="session")
def brune(geometry):
    """Coupled A(0), Q' solution for the measured vacuum Rabi frequency."""
    return solve_cavity_coupled(OMEGA_R_RYD, NBAR_RYD, geometry, W0_RYD)


@pytest.fixture(scope="session")
def lossy_model(brune):
    system = TwoLevelSystem(W0_RYD, dipole_from_a0e(1250))
    field = PhotonField.thermal_with_nbar(W0_RYD, NBAR_RYD)
    return TransitionModel(system, field, brune, CavityMode.LOSSY)


@pytest.fixture(scope="session")
def na_params():
    return RateParams.from_ratios(A_OVER_NA, R_OVER_NA, 1.0)


def rel(a, b):
    return abs(a - b) / abs(b)
