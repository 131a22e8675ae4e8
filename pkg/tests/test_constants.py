import math

import pytest

from einsteinrabi import constants as const
from einsteinrabi.errors import DomainError


def test_codata_2018_values():
    assert const.hbar == 1.054571817e-34
    assert const.kB == 1.380649e-23
    assert const.c == 299792458.0
    assert const.epsilon0 == 8.8541878128e-12
    assert const.a0 == 5.29177210903e-11
    assert const.e == 1.602176634e-19


def test_constants_positive_and_frozen():
    values = const.CODATA2018
    for name in ("hbar", "kB", "c", "epsilon0", "a0", "e"):
        assert getattr(values, name) > 0
    with pytest.raises(AttributeError):
        values.hbar = 1.0


def test_dipole_rydberg_value():
    assert const.dipole_from_a0e(1250) == pytest.approx(1.0599e-26, rel=1e-4)


def test_dipole_sodium_value():
    assert const.dipole_from_a0e(2.5) == pytest.approx(2.1196e-29, rel=1e-4)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_dipole_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        const.dipole_from_a0e(bad)


@pytest.mark.parametrize("x", [0.1, 2.5, 1250.0, 7.3e4])
def test_dipole_is_linear(x):
    assert const.dipole_from_a0e(2 * x) == 2 * const.dipole_from_a0e(x)


def test_frequency_conversions_round_trip():
    f = 51.099e9
    assert const.rad_s_to_hz(const.hz_to_rad_s(f)) == pytest.approx(f, rel=1e-15)
    assert const.hz_to_rad_s(1.0) == 2 * math.pi


def test_omega_from_wavelength():
    w = const.omega_from_wavelength(589.0e-9)
    assert w == pytest.approx(3.198e15, rel=1e-3)
    with pytest.raises(DomainError):
        const.omega_from_wavelength(0.0)
