import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ndekit.curves import HarmonicWell, MultipoleTail, build_piecewise, choose_cutoff


def test_multipole_tail_values_and_sorting():
    tail = MultipoleTail(0.5, ((6, 100.0), (3, -10.0)))
    assert tail.powers == [3, 6]
    R = 7.0
    assert tail(R) == pytest.approx(0.5 - 10.0 / R**3 + 100.0 / R**6, rel=1e-15)
    assert np.allclose(tail(np.array([R, 2 * R])), [tail(R), tail(2 * R)], rtol=1e-15)
    assert tail.dissociation == 0.5
    with pytest.raises(KeyError):
        tail.coefficient(8)


def test_multipole_tail_rejects_bad_powers():
    with pytest.raises(ValueError):
        MultipoleTail(0.0, ((3, 1.0), (3, 2.0)))
    with pytest.raises(ValueError):
        MultipoleTail(0.0, ((0, 1.0),))


@given(st.floats(min_value=1e-4, max_value=1.0), st.floats(min_value=0.1, max_value=10.0))
def test_harmonic_well_symmetric(omega, offset):
    well = HarmonicWell(100.0, omega, 20.0, half_width=15.0)
    assert well(20.0 + offset) == pytest.approx(well(20.0 - offset), rel=1e-12)
    assert math.isinf(well.dissociation)


def test_piecewise_is_continuous():
    tail = MultipoleTail(0.0, ((3, -10.0), (6, 2000.0)))
    curve = build_piecewise(-0.01, 0.02, 10.0, 30.0, tail, [15.0, 20.0, 25.0], [-3e-3, -2.5e-3, -1e-3])
    for edge in (10.0, 30.0):
        assert curve(edge - 1e-9) == pytest.approx(curve(edge + 1e-9), abs=1e-9)
    assert curve(5.0) == pytest.approx(-0.01 + 0.02 * 5.0)
    assert curve(100.0) == pytest.approx(tail(100.0), rel=1e-15)
    assert curve.bridge_integral() > 0


def test_piecewise_rejects_bad_geometry():
    tail = MultipoleTail(0.0, ((3, -10.0),))
    with pytest.raises(ValueError):
        build_piecewise(-0.01, 0.02, 30.0, 10.0, tail)
    with pytest.raises(ValueError):
        build_piecewise(-0.01, -1.0, 10.0, 30.0, tail)
    with pytest.raises(ValueError):
        build_piecewise(-0.01, 0.02, 10.0, 30.0, MultipoleTail(0.0, ((3, 10.0),)))


def test_choose_cutoff_ratio():
    tail = MultipoleTail(0.0, ((3, -10.0), (6, 1000.0)))
    R = choose_cutoff(tail, 3, 6, 0.01)
    assert abs(1000.0 / R**6) == pytest.approx(0.01 * 10.0 / R**3, rel=1e-12)
    with pytest.raises(ValueError):
        choose_cutoff(tail, 6, 3)
