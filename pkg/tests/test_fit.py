import csv
import io
import math

import numpy as np
import pytest

from ndekit import units
from ndekit.bkw import LevelSeries
from ndekit.errors import NumericalError
from ndekit.fit import (
    COLUMNS,
    FitSpec,
    fit_nde,
    initial_guess,
    model_ladder,
    reports_to_csv,
    reports_to_text,
    sigma_fit,
    write_reports,
)
from ndekit.nde import classic_lrb_energy, nde_inverse_energy, NdeModel

HC = units.constant("hartree_wavenumber")
MU = 1.2e5


def _synthetic(model: NdeModel, variant: str, v) -> LevelSeries:
    E = nde_inverse_energy(np.asarray(v, dtype=float), model, variant)
    return LevelSeries(list(v), list(E), "hartree")


def test_sigma_fit_definition():
    r = np.array([3.0, -4.0, 0.0, 0.0])
    sig, rmse = sigma_fit(r, k=2)
    assert sig == pytest.approx(5.0 / 2.0)
    assert rmse == pytest.approx(math.sqrt(25.0 / 2.0))
    with pytest.raises(ValueError):
        sigma_fit(r, k=4)


def test_classic_fit_recovers_exact_parameters():
    v = np.arange(20, 60)
    E = classic_lrb_energy(v, 3, -10.0, MU, 0.0, 62.3)
    levels = LevelSeries(list(v), list(E), "hartree")
    rep = fit_nde(levels, FitSpec("classic_k3", 3, None, MU))
    assert rep.converged
    assert rep.estimates["C_n"] == pytest.approx(-10.0, rel=1e-8)
    assert rep.estimates["v_D"] == pytest.approx(62.3, abs=1e-8)
    assert rep.estimates["D"] == pytest.approx(0.0, abs=1e-14)
    assert rep.sigma_fit_mhz < 1e-3


def test_full_fit_recovers_synthetic_model():
    truth = NdeModel(3, 6, 0, 0.0, -10.0, 6.4e4, 207.4, 700.0, MU)
    levels = _synthetic(truth, "full", range(120, 205))
    rep = model_ladder(levels, FitSpec("classic_k3", 3, 6, MU))[-1]
    assert rep.variant == "full_k5"
    assert rep.estimates["C_n"] == pytest.approx(-10.0, rel=1e-6)
    assert rep.estimates["v_D"] == pytest.approx(207.4, abs=1e-6)


def test_fit_is_deterministic(cs_levels, cs_mu):
    spec = FitSpec("full_k5", 3, 6, cs_mu, window=10.0 / HC)
    a, b = fit_nde(cs_levels, spec), fit_nde(cs_levels, spec)
    assert a.estimates == b.estimates
    assert np.array_equal(a.residuals, b.residuals)
    assert reports_to_csv([a]) == reports_to_csv([b])


def test_ladder_is_nested(cs_ladders):
    for reps in cs_ladders.values():
        ss = [reps[v].sum_squares for v in ("classic_k3", "improved_k4", "full_k5")]
        assert ss[1] <= ss[0] * (1 + 1e-8) and ss[2] <= ss[1] * (1 + 1e-8)


def test_sparse_window_flags_cm(cs_levels, cs_mu):
    top = LevelSeries(cs_levels.v[-60:-55], cs_levels.E[-60:-55], "hartree")
    rep = fit_nde(top, FitSpec("full_k5", 3, 6, cs_mu))
    assert rep.n_levels == 5
    assert "wide_confidence_C_m" in rep.flags
    assert math.isnan(rep.sigma_fit_mhz) and math.isnan(rep.stderr["C_m"])


def test_unit_scale_invariance(cs_levels, cs_mu):
    spec = FitSpec("full_k5", 3, 6, cs_mu)
    window = cs_levels.window(5.0 / HC, 0.0)
    a = fit_nde(window.to_unit("cm-1"), spec)
    b = fit_nde(window.to_unit("MHz"), spec)
    assert a.estimates["v_D"] == pytest.approx(b.estimates["v_D"], abs=1e-10)
    assert a.sigma_fit_mhz == pytest.approx(b.sigma_fit_mhz, rel=1e-6)


def test_weighted_fit_matches_unweighted_for_unit_weights(cs_levels, cs_mu):
    window = cs_levels.window(5.0 / HC, 0.0)
    weighted = LevelSeries(window.v, window.E, "hartree", weights=[1.0] * len(window))
    spec = FitSpec("improved_k4", 3, 6, cs_mu)
    assert fit_nde(weighted, spec).estimates == pytest.approx(fit_nde(window, spec).estimates, rel=1e-12)


def test_bounds_use_trust_region(cs_levels, cs_mu):
    window = cs_levels.window(10.0 / HC, 0.0)
    spec = FitSpec("classic_k3", 3, 6, cs_mu, bounds={"C_n": (-10.5, -10.2)})
    rep = fit_nde(window, spec)
    assert -10.5 <= rep.estimates["C_n"] <= -10.2


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(variant="bogus"),
        dict(variant="full_k5", m=None),
        dict(initial={"Q": 1.0}),
        dict(window=-1.0),
        dict(max_iterations=0),
        dict(l=2),
    ],
)
def test_fit_spec_validation(kwargs):
    base = dict(variant="classic_k3", n=3, m=6, mu=MU)
    base.update(kwargs)
    with pytest.raises(ValueError):
        FitSpec(**base)


def test_too_few_levels_rejected():
    levels = LevelSeries([0, 1, 2], [-3e-5, -2e-5, -1e-5], "hartree")
    with pytest.raises(ValueError, match="levels"):
        fit_nde(levels, FitSpec("improved_k4", 3, 6, MU))


def test_initial_guess_needs_rising_levels():
    with pytest.raises(ValueError):
        initial_guess(np.array([0.0]), np.array([-1e-5]), 3, MU)
    with pytest.raises(ValueError):
        initial_guess(np.array([0.0, 1.0]), np.array([-1e-5, -2e-6]), 3, MU, D=-5e-6)


def test_report_exports(cs_ladders, tmp_path):
    reps = list(cs_ladders[10.0].values())
    text = reports_to_csv(reps)
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows[0]) == len(COLUMNS)
    assert all(len(r) == len(COLUMNS) for r in rows)
    assert rows[0][4] == "D[cm-1]"
    assert [r[1] for r in rows[1:]] == ["classic_k3", "improved_k4", "full_k5"]
    assert float(rows[1][0]) == pytest.approx(-10.0)
    assert "full_k5" in reports_to_text(reps)
    write_reports(reps, tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == text


def test_ladder_reports_nesting_violation(monkeypatch, cs_levels, cs_mu):
    import ndekit.fit as fit

    real = fit.fit_nde

    def worse(levels, spec):
        rep = real(levels, spec)
        if spec.variant == "full_k5":
            rep.sum_squares = 1.0
        return rep

    monkeypatch.setattr(fit, "fit_nde", worse)
    with pytest.raises(NumericalError):
        model_ladder(cs_levels, FitSpec("classic_k3", 3, 6, cs_mu, window=10.0 / HC))
