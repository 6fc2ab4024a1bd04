from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from ndekit.config import RunConfig, load_config, parse_config, resolve_species
from ndekit.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.parametrize("name", ["cs2_0g_minus.ini", "cs2_all_branches.ini"])
def test_shipped_configs_load(name):
    cfg = load_config(CONFIG_DIR / name)
    assert cfg.species_path.is_file()
    assert cfg.params().C3 > 0


def test_shipped_0g_config_values():
    cfg = load_config(CONFIG_DIR / "cs2_0g_minus.ini")
    assert cfg.labels == ("0g-",) and cfg.branch == 1
    assert not cfg.epsilon and not cfg.c8
    assert cfg.R_plus_c == 35.0 and cfg.r_min == 15.0
    assert cfg.windows == (30.0, 10.0, 5.0, 2.0)


def test_all_labels_expand():
    cfg = load_config(CONFIG_DIR / "cs2_all_branches.ini")
    assert len(cfg.symmetry_labels) == 8


def test_round_trip_default():
    cfg = RunConfig()
    assert parse_config(cfg.to_text()) == cfg


@settings(max_examples=40)
@given(
    st.floats(min_value=1.0, max_value=100.0),
    st.lists(st.floats(min_value=0.01, max_value=100.0), min_size=1, max_size=5).map(tuple),
    st.sampled_from(["0g-", "1u", "all", "2g"]),
    st.one_of(st.none(), st.integers(min_value=0, max_value=50)),
    st.booleans(),
)
def test_round_trip_random(r_plus_c, windows, label, v_max, eps):
    cfg = RunConfig(R_plus_c=r_plus_c, windows=windows, labels=(label,), v_max=v_max, epsilon=eps)
    assert parse_config(cfg.to_text()) == cfg


@pytest.mark.parametrize(
    "text, match",
    [
        ("[run]\nbogus = 1\n", "unknown key"),
        ("[run]\nlabels = 3g\n", "labels"),
        ("[run]\nepsilon = maybe\n", "on/off"),
        ("[run]\nR_plus_c = 1 2\n", "single value"),
        ("[run]\nwindows = a b\n", "numbers"),
        ("[other]\nx = 1\n", "no \\[run\\]"),
        ("[run]\n[extra]\n", "unexpected sections"),
        ("[run]\nasymptote = d5/2\n", "asymptote"),
        ("[run]\ngrid_start = 10\ngrid_stop = 5\n", "grid_start"),
        ("[run]\nwindows = -1\n", "positive"),
        ("not an ini", "cannot parse"),
    ],
)
def test_bad_configs_rejected(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_include_paths(tmp_path):
    assert resolve_species("package:cs133.ini", tmp_path).name == "cs133.ini"
    with pytest.raises(ConfigError):
        resolve_species("package:missing.ini", tmp_path)
    with pytest.raises(ConfigError):
        resolve_species("nowhere.ini", tmp_path)
    species = tmp_path / "sp.ini"
    species.write_text(resolve_species("package:cs133.ini", tmp_path).read_text())
    cfg = parse_config("[run]\ninclude = sp.ini\n", tmp_path)
    assert cfg.params().C3 == pytest.approx(9.997)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")
