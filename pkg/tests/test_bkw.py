import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ndekit import units
from ndekit.bkw import (
    LevelSeries,
    dissociation_index,
    integral_I_l,
    kinetic_energy,
    level_energies,
    nonasymptotic_integral,
    asymptotic_integral,
    rotational_constant,
    turning_points,
    vibrational_index,
)
from ndekit.curves import HarmonicWell, MultipoleTail, PotentialCurve, build_piecewise
from ndekit.errors import NonSingleWellError

HC = units.constant("hartree_wavenumber")


@pytest.fixture(scope="module")
def piecewise():
    tail = MultipoleTail(0.0, ((6, -2.0e3), (8, -5.0e4)))
    return build_piecewise(-2e-3, 0.05, 7.0, 12.0, tail)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=1e-4, max_value=1e-2),
    st.floats(min_value=500.0, max_value=1e5),
    st.floats(min_value=0.0, max_value=30.0),
)
def test_harmonic_observables_exact(omega, mu, v):
    well = HarmonicWell(mu, omega, 40.0, half_width=39.0)
    E = omega * (v + 0.5)
    a = math.sqrt(2.0 * E / well.force_constant)
    if a > 35.0:
        return
    tp = turning_points(well, E)
    assert tp.R_minus == pytest.approx(40.0 - a, rel=1e-10)
    assert tp.R_plus == pytest.approx(40.0 + a, rel=1e-10)
    assert vibrational_index(well, E, mu) == pytest.approx(v, rel=1e-9, abs=1e-9)
    assert integral_I_l(well, E, 0) == pytest.approx(math.pi * math.sqrt(2.0 / well.force_constant), rel=1e-9)
    B = 40.0 / (2.0 * mu * (1600.0 - a * a) ** 1.5)
    assert rotational_constant(well, E, mu) == pytest.approx(B, rel=1e-9)


def test_harmonic_levels_equally_spaced():
    well = HarmonicWell(1000.0, 0.01, 20.0, half_width=19.0)
    levels = level_energies(well, 1000.0, 0, 12)
    assert np.allclose(levels.E_array, 0.01 * (levels.v_array + 0.5), rtol=1e-10)
    assert np.allclose(np.diff(levels.E_array), 0.01, rtol=1e-9)
    for v in (0, 7):
        assert kinetic_energy(well, levels.E[v], v, 1000.0) == pytest.approx(levels.E[v] / 2, rel=1e-9)
    with pytest.raises(ValueError):
        level_energies(well, 1000.0)


def test_narrow_harmonic_rotational_constant():
    mu, r_e = 1000.0, 20.0
    well = HarmonicWell(mu, 0.05, r_e, half_width=10.0)
    assert rotational_constant(well, 0.025, mu) == pytest.approx(1.0 / (2 * mu * r_e**2), rel=0.01)


@pytest.mark.parametrize("which", ["cs", "piecewise"])
def test_vibrational_index_monotone(which, cs_curve, piecewise):
    curve = cs_curve if which == "cs" else piecewise
    from ndekit.bkw import analyze_well

    info = analyze_well(curve)
    E = info.v_min + info.depth * np.linspace(0.001, 0.999, 50)
    v = [vibrational_index(curve, e, 1e5) for e in E]
    assert np.all(np.diff(v) > 0)


@pytest.mark.parametrize("de_cm", [50.0, 20.0, 5.0, 0.5])
def test_derivative_consistency(de_cm, cs_curve, cs_mu):
    E = -de_cm / HC
    h = 1e-5 * abs(E)
    fd = (vibrational_index(cs_curve, E + h, cs_mu) - vibrational_index(cs_curve, E - h, cs_mu)) / (2 * h)
    exact = math.sqrt(2 * cs_mu) / (2 * math.pi) * integral_I_l(cs_curve, E, 0)
    assert fd == pytest.approx(exact, rel=1e-6)


def test_derivative_consistency_piecewise(piecewise):
    mu = 5e4
    E = -3e-4
    h = 1e-5 * abs(E)
    fd = (vibrational_index(piecewise, E + h, mu) - vibrational_index(piecewise, E - h, mu)) / (2 * h)
    assert fd == pytest.approx(math.sqrt(2 * mu) / (2 * math.pi) * integral_I_l(piecewise, E, 0), rel=1e-6)


def test_levels_quantise_to_integers(cs_levels, cs_curve, cs_mu):
    for v in (0, 50, 133, 180):
        assert vibrational_index(cs_curve, cs_levels.E[v], cs_mu) == pytest.approx(v, abs=1e-8)
    assert cs_levels.v == tuple(range(len(cs_levels)))
    assert all(e < 0 for e in cs_levels.E)


def test_levels_above_last_bound_rejected(cs_curve, cs_mu, cs_v_D):
    with pytest.raises(ValueError, match="maximum supported v"):
        level_energies(cs_curve, cs_mu, 0, math.floor(cs_v_D) + 1)


def test_flambaum_shift(cs_curve, cs_mu, cs_v_D):
    shifted = dissociation_index(cs_curve, cs_mu, flambaum=True, n=3)
    assert shifted - cs_v_D == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        dissociation_index(cs_curve, cs_mu, flambaum=True)


def test_split_integral_sums(cs_curve):
    E = -10.0 / HC
    whole = integral_I_l(cs_curve, E, 0)
    split = integral_I_l(cs_curve, E, 0, split_at=35.0)
    assert split.total == pytest.approx(whole, rel=1e-9)
    assert split.asymptotic + split.non_asymptotic == pytest.approx(whole, rel=1e-9)
    assert nonasymptotic_integral(cs_curve, E, 35.0) == pytest.approx(split.non_asymptotic, rel=1e-9)
    assert asymptotic_integral(cs_curve, E, 35.0) == pytest.approx(split.asymptotic, rel=1e-9)


def test_energy_outside_well_rejected(cs_curve):
    with pytest.raises(ValueError):
        turning_points(cs_curve, 1e-6)
    with pytest.raises(ValueError):
        integral_I_l(cs_curve, -10.0 / HC, l=3)


@dataclass(frozen=True)
class _DoubleWell(PotentialCurve):
    r_min: float = 5.0
    r_max: float = 25.0
    dissociation: float = math.inf

    def evaluate(self, R):
        R = np.asarray(R, dtype=float)
        return 1e-4 * (R - 10.0) ** 2 * (R - 20.0) ** 2 + 1e-4 * (R - 15.0)


def test_double_well_rejected():
    with pytest.raises(NonSingleWellError):
        turning_points(_DoubleWell(), 0.01)


def test_level_csv_round_trip(cs_levels, tmp_path):
    path = tmp_path / "levels.csv"
    cs_levels.write_csv(path, ["test"])
    back = LevelSeries.read_csv(path)
    assert back.v == cs_levels.v
    assert back.E == cs_levels.E
    assert back.to_unit("cm-1").to_unit("hartree").E == pytest.approx(cs_levels.E, rel=1e-14)


@pytest.mark.parametrize(
    "text, match",
    [
        ("x,y\n0,1\n", "line 1"),
        ("v,E[cm-1]\n0,-5\n1\n", "line 3"),
        ("v,E[cm-1]\n0,abc\n", "line 2"),
        ("v,E[cm-1]\n0,-5\n1,-6\n", "increasing"),
        ("# only a comment\n", "no header"),
    ],
)
def test_level_csv_errors(text, match):
    with pytest.raises(ValueError, match=match):
        LevelSeries.from_csv(text)


def test_level_window_and_weights():
    s = LevelSeries([0, 1, 2], [-10.0, -4.0, -1.0], "cm-1", weights=[1.0, 2.0, 3.0])
    w = s.window(5.0, 0.0)
    assert w.v == (1, 2) and w.weights == (2.0, 3.0)
    assert LevelSeries.from_csv(s.to_csv()).weights == s.weights
    with pytest.raises(ValueError):
        LevelSeries([0, 1], [-1.0], "cm-1")
