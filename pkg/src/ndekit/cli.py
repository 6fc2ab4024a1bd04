"""Command-line front end.

Verbs: ``curve``, ``expand``, ``levels``, ``terms``, ``fit``, ``lifetime``
and ``retardation``.  Exit codes: 0 success, 2 usage error (argparse),
3 configuration error, 4 numerical failure, 5 invalid input values.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, units
from .bkw import (
    LevelSeries,
    analyze_well,
    dissociation_index,
    level_energies,
    nonasymptotic_integral,
    vibrational_index,
)
from .casec import (
    C3_from_reduced_dipole,
    adiabatic_branch,
    epsilon_from_lifetimes,
    expand_branch,
    lifetime_from_C3,
    reduced_wavelength,
    retardation_factors,
)
from .config import RunConfig, load_config
from .curves import HarmonicWell, MultipoleTail
from .errors import ConfigError, NumericalError
from .fit import FitReport, FitSpec, PARAMETERS, VARIANTS, fit_nde, model_ladder, reports_to_csv, reports_to_text
from .nde import NdeModel, SeriesValidityWarning, gamma_tilde_delta, term_budget

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_VALIDATION = 5


# ----------------------------------------------------------------------------
# helpers


class _Run:
    """Per-invocation state: config, flags and output handling."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        cfg = load_config(args.config) if args.config else RunConfig()
        changes = {}
        if args.units:
            units.convert_energy(1.0, "cm-1", args.units)  # validates the unit
            changes["units"] = args.units
        if args.flambaum:
            changes["flambaum"] = True
        if args.rotation_J is not None:
            changes["rotation_J"] = args.rotation_J
        if args.epsilon is not None:
            changes["epsilon"] = args.epsilon != 0.0
        if args.out:
            changes["output"] = args.out
        self.cfg = cfg.with_(**changes) if changes else cfg
        self.epsilon_value = args.epsilon
        self.out = Path(self.cfg.output)
        if args.config and not self.out.is_absolute() and not args.out:
            self.out = Path(args.config).parent / self.out

    def header(self, what: str) -> list[str]:
        lines = [f"ndekit {__version__} {what}"]
        if not self.args.no_timestamp:
            lines.append("generated " + _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat())
        return lines

    def write(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        return path

    def params(self):
        p = self.cfg.params()
        if self.epsilon_value is not None:
            p = p.with_epsilon(self.epsilon_value)
        return p

    def reference(self, params) -> float:
        if self.cfg.asymptote == "p3/2":
            return params.E_p + 0.5 * params.A
        return params.E_p - params.A

    def curve(self, label=None, branch=None):
        cfg = self.cfg
        params = self.params()
        if cfg.model == "harmonic":
            omega = units.energy_to_hartree(cfg.harmonic_omega, "cm-1")
            return HarmonicWell(params.reduced_mass, omega, cfg.harmonic_r_e, v_min=0.0, half_width=cfg.harmonic_r_e * 0.9), params
        label = label or cfg.symmetry_labels[0]
        branch = cfg.branch if branch is None else branch
        if not 0 <= branch < label.dimension:
            raise ValueError(f"branch {branch} does not exist for {label} (dimension {label.dimension})")
        c = adiabatic_branch(label, branch, params, cfg.curve_options(), reference=self.reference(params), r_min=cfg.r_min)
        return c, params


def _csv(header: Sequence[str], rows: Sequence[Sequence], comments: Sequence[str]) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _grid(cfg: RunConfig) -> np.ndarray:
    if cfg.grid_points == 1:
        return np.array([cfg.grid_start])
    if cfg.grid_spacing == "geometric":
        return np.geomspace(cfg.grid_start, cfg.grid_stop, cfg.grid_points)
    return np.linspace(cfg.grid_start, cfg.grid_stop, cfg.grid_points)


def _slug(label) -> str:
    return str(label).replace("+", "p").replace("-", "m")


# ----------------------------------------------------------------------------
# commands


def cmd_curve(run: _Run) -> int:
    cfg = run.cfg
    params = run.params()
    grid = _grid(cfg)
    ref = run.reference(params)
    written = []
    for label in cfg.symmetry_labels:
        for b in range(label.dimension):
            c = adiabatic_branch(label, b, params, cfg.curve_options(), reference=ref, r_min=min(cfg.r_min, grid[0]))
            V = units.hartree_to(c(grid), cfg.units)
            rows = [(float(r), float(e)) for r, e in zip(grid, np.atleast_1d(V))]
            text = _csv(["R[bohr]", f"V[{cfg.units}]"], rows, run.header(f"curve {label} branch {b} relative to {cfg.asymptote}"))
            written.append(run.write(f"curve_{_slug(label)}_{b}.csv", text))
    for p in written:
        print(p)
    return EXIT_OK


def cmd_expand(run: _Run) -> int:
    cfg = run.cfg
    params = run.params()
    ref = run.reference(params)
    powers = list(cfg.expand_powers)
    rows = []
    for label in cfg.symmetry_labels:
        for b in range(label.dimension):
            c = adiabatic_branch(label, b, params, cfg.curve_options(), reference=ref, r_min=cfg.r_min)
            res = expand_branch(c, powers, window=tuple(cfg.expand_window))
            rows.append(
                [str(label), str(b), units.hartree_to(res.tail.D, cfg.units)]
                + [res.tail.coefficient(k) for k in powers]
                + [res.residual_rms, res.residual_max, res.condition]
            )
    # self-test: a known tail must come back unchanged
    known = MultipoleTail(0.0, tuple((k, -10.0 * 10.0 ** (2 * i)) for i, k in enumerate(powers)), r_min=1.0)
    res = expand_branch(known, powers, window=tuple(cfg.expand_window))
    rows.append(["tail-selftest", "-", units.hartree_to(res.tail.D, cfg.units)] + [res.tail.coefficient(k) for k in powers]
                + [res.residual_rms, res.residual_max, res.condition])
    header = ["label", "branch", f"D[{cfg.units}]"] + [f"C{k}" for k in powers] + ["residual_rms[hartree]", "residual_max[hartree]", "condition"]
    text = _csv(header, rows, run.header(f"expand window {cfg.expand_window[0]:g}-{cfg.expand_window[1]:g} bohr"))
    path = run.write("expand.csv", text)
    sys.stdout.write(text)
    print(path)
    return EXIT_OK


def cmd_levels(run: _Run) -> int:
    cfg = run.cfg
    curve, params = run.curve()
    mu = params.reduced_mass
    kw = dict(flambaum=cfg.flambaum, n=cfg.tail_n if cfg.flambaum else None)
    v_max = cfg.v_max
    if v_max is not None and v_max < cfg.v_min:
        series = LevelSeries((), (), cfg.units, curve.label)
    else:
        series = level_energies(curve, mu, cfg.v_min, v_max, **kw).to_unit(cfg.units)
    extra = []
    if math.isfinite(curve.dissociation):
        extra.append(f"v_D {dissociation_index(curve, mu, **kw):.17g}")
    path = run.write("levels.csv", series.to_csv(run.header(f"levels {curve.label}") + extra))
    print(f"{len(series)} levels -> {path}")
    return EXIT_OK


def _tail_model(run: _Run):
    """Analytic curve, its fitted tail and the matching l = 0 expansion model."""
    cfg = run.cfg
    if cfg.model != "casec":
        raise ValueError("terms needs a case (c) curve")
    if cfg.tail_m is None:
        raise ValueError("terms needs the second tail power tail_m")
    curve, params = run.curve()
    mu = params.reduced_mass
    res = expand_branch(curve, list(cfg.expand_powers), window=tuple(cfg.expand_window))
    C_n = res.tail.coefficient(cfg.tail_n)
    C_m = res.tail.coefficient(cfg.tail_m)
    Rc = cfg.R_plus_c
    I_na_D = nonasymptotic_integral(curve, curve.dissociation, Rc)
    v_D = dissociation_index(curve, mu)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gt = gamma_tilde_delta(I_na_D, C_n, C_m, cfg.tail_n, cfg.tail_m, 0, Rc, mu)
    model = NdeModel(cfg.tail_n, cfg.tail_m, 0, curve.dissociation, C_n, C_m, v_D, gt, mu)
    return curve, model, I_na_D


def cmd_terms(run: _Run) -> int:
    cfg = run.cfg
    curve, model, I_na_D = _tail_model(run)
    info = analyze_well(curve)
    binding = [units.energy_to_hartree(b, cfg.units) for b in cfg.terms_binding]
    for b, raw in zip(binding, cfg.terms_binding):
        if not b < info.depth:
            raise ValueError(f"D-E = {raw:g} {cfg.units} exceeds the well depth {units.hartree_to(info.depth, cfg.units):.6g} {cfg.units}")
    I_na_E = [nonasymptotic_integral(curve, model.D - b, cfg.R_plus_c) for b in binding]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SeriesValidityWarning)
        tb = term_budget(model, cfg.R_plus_c, binding, I_na_D, I_na_E)
    for w in {str(c.message) for c in caught}:
        print(f"warning: {w}", file=sys.stderr)
    oracle = [model.v_D - vibrational_index(curve, model.D - b, model.mu) for b in binding]
    header = ["term"] + [f"D-E={b:g}" for b in cfg.terms_binding]
    rows = [[tb.labels[k]] + [("" if x is None else x) for x in vals] for k, vals in tb.rows.items()]
    rows.append(["sum of kept terms"] + tb.sum_implemented)
    rows.append(["semiclassical v_D-v"] + oracle)
    comments = run.header(f"terms {curve.label} R_plus_c={cfg.R_plus_c:g} bohr") + [
        f"C{model.n} {model.C_n:.17g}",
        f"C{model.m} {model.C_m:.17g}",
        f"v_D {model.v_D:.17g}",
        f"gamma_tilde[1/{cfg.units}] {model.gamma_tilde * units.energy_to_hartree(1.0, cfg.units):.17g}",
    ]
    text = _csv(header, rows, comments)
    path = run.write("terms.csv", text)
    width = max(len(r[0]) for r in rows)
    print(f"{'term':<{width}}  " + "  ".join(f"{h:>12}" for h in header[1:]))
    for r in rows:
        print(f"{r[0]:<{width}}  " + "  ".join(f"{x:>12.4g}" if isinstance(x, float) else f"{x:>12}" for x in r[1:]))
    print(path)
    return EXIT_OK


def _failed(variant: str, window: float | None, n: int, reason: str) -> FitReport:
    nan = float("nan")
    return FitReport(
        variant, {p: nan for p in PARAMETERS}, {}, nan, nan, np.zeros(n), np.zeros(n), 0, False, None, window, nan,
        [reason], reason,
    )


def _fit_each(levels: LevelSeries, base: FitSpec, n_in: int) -> list[FitReport]:
    out = []
    for variant in VARIANTS:
        try:
            out.append(fit_nde(levels, base.with_variant(variant)))
        except ValueError:
            out.append(_failed(variant, base.window, n_in, "too_few_levels"))
        except NumericalError:
            out.append(_failed(variant, base.window, n_in, "numerical_failure"))
    return out


def cmd_fit(run: _Run) -> int:
    cfg = run.cfg
    path = Path(run.args.levels)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read levels file {path}: {exc}") from None
    try:
        levels = LevelSeries.from_csv(text, label=path.stem)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    params = run.params()
    mu = params.reduced_mass
    E_h = np.asarray(levels.to_unit("hartree").E, dtype=float)
    windows: list[float | None] = ([None] if cfg.fit_all else []) + [units.energy_to_hartree(w, cfg.units) for w in cfg.windows]
    reports: list[FitReport] = []
    for w in windows:
        base = FitSpec("classic_k3", cfg.tail_n, cfg.tail_m, mu, window=w)
        n_in = int(np.count_nonzero(base.select(E_h)))
        try:
            reports.extend(model_ladder(levels, base))
        except ValueError as exc:
            # some rungs lack levels; fit the others one by one
            print(f"warning: window {w}: {exc}", file=sys.stderr)
            reports.extend(_fit_each(levels, base, n_in))
        except NumericalError as exc:
            for variant in VARIANTS:
                reports.append(_failed(variant, w, n_in, "numerical_failure"))
            print(f"warning: window {w}: {exc}", file=sys.stderr)
    comments = run.header(f"fit {path.name} n={cfg.tail_n} m={cfg.tail_m}")
    csv_text = "".join(f"# {c}\n" for c in comments) + reports_to_csv(reports, cfg.units)
    table = reports_to_text(reports, cfg.units)
    p1 = run.write("fit_report.csv", csv_text)
    p2 = run.write("fit_report.txt", "".join(f"# {c}\n" for c in comments) + table)
    sys.stdout.write(table)
    print(p1)
    print(p2)
    return EXIT_OK


def cmd_lifetime(run: _Run) -> int:
    args = run.args
    table = None
    if args.C3 is None or (args.wavelength_nm is None and args.frequency_mhz is None):
        table = units.load_table(run.cfg.species_path)
    if args.C3 is not None:
        C3 = args.C3
    else:
        C3 = table["C3"].value if "C3" in table else C3_from_reduced_dipole(table["reduced_dipole_p32"].value)
    if args.wavelength_nm is not None:
        if not args.wavelength_nm > 0:
            raise ValueError("wavelength must be positive")
        omega = units.energy_to_hartree(1e7 / args.wavelength_nm, "cm-1")
    elif args.frequency_mhz is not None:
        if not args.frequency_mhz > 0:
            raise ValueError("frequency must be positive")
        omega = units.energy_to_hartree(args.frequency_mhz, "MHz")
    else:
        q = table["D2_line"]
        omega = units.to_atomic(q.value, q.unit)
    if not C3 > 0:
        raise ValueError(f"|C3| must be positive, got {C3}")
    tau = lifetime_from_C3(C3, omega) * units.constant("atomic_time") * 1e9
    print(f"C3 = {C3:.6g} hartree*bohr^3")
    print(f"transition = {units.hartree_to(omega, 'cm-1'):.8g} cm-1")
    print(f"lifetime = {tau:.6g} ns")
    if table is not None and all(k in table for k in ("tau_p32", "tau_p12", "D2_line", "D1_line")):
        eps = epsilon_from_lifetimes(
            table["tau_p32"].value, table["tau_p12"].value,
            units.to_atomic(table["D2_line"].value, table["D2_line"].unit),
            units.to_atomic(table["D1_line"].value, table["D1_line"].unit),
        )
        print(f"epsilon from lifetimes = {eps:.6g}")
    return EXIT_OK


def cmd_retardation(run: _Run) -> int:
    args = run.args
    if args.lambda_bar is not None:
        lam = args.lambda_bar
    else:
        lam = reduced_wavelength(run.params().E_s_to_p)
    R = np.asarray(args.R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("radii must be positive")
    f_sigma, f_pi = retardation_factors(R, lam)
    rows = [(float(r), float(a), float(b)) for r, a, b in zip(R, np.atleast_1d(f_sigma), np.atleast_1d(f_pi))]
    text = _csv(["R[bohr]", "f_sigma", "f_pi"], rows, run.header(f"retardation lambda_bar={lam:.17g} bohr"))
    sys.stdout.write(text)
    if args.out:
        print(run.write("retardation.csv", text))
    return EXIT_OK


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--units", help="energy unit for output: cm-1, MHz, GHz, K or hartree")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generation time from file headers")
    common.add_argument("--flambaum", action="store_true", help="add the 1/(2(n-2)) threshold correction to v")
    common.add_argument("--epsilon", type=float, help="relativistic dipole correction value (0 disables)")
    common.add_argument("--rotation-J", type=int, dest="rotation_J", help="total angular momentum J for the rotational term")

    parser = argparse.ArgumentParser(prog="ndekit", description="Long-range curves, semiclassical levels and NDE fits.")
    parser.add_argument("--version", action="version", version=f"ndekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("curve", parents=[common], help="sample case (c) branches to CSV")
    sub.add_parser("expand", parents=[common], help="fit 1/R^k tails to each branch")
    sub.add_parser("levels", parents=[common], help="semiclassical level energies")
    sub.add_parser("terms", parents=[common], help="term-by-term budget of v_D - v")
    p_fit = sub.add_parser("fit", parents=[common], help="fit the three expansion variants to a level CSV")
    p_fit.add_argument("levels", help="CSV with columns v,E[unit]")
    p_life = sub.add_parser("lifetime", parents=[common], help="radiative lifetime from C3")
    p_life.add_argument("--C3", type=float, help="|C3| in hartree*bohr^3 (default: species file)")
    g = p_life.add_mutually_exclusive_group()
    g.add_argument("--wavelength-nm", type=float, help="transition wavelength in nm")
    g.add_argument("--frequency-mhz", type=float, help="transition frequency in MHz")
    p_ret = sub.add_parser("retardation", parents=[common], help="retardation factors at given radii")
    p_ret.add_argument("--R", type=float, nargs="+", required=True, help="radii in bohr")
    p_ret.add_argument("--lambda-bar", type=float, help="reduced wavelength in bohr (default: from the species file)")
    return parser


_COMMANDS = {
    "curve": cmd_curve,
    "expand": cmd_expand,
    "levels": cmd_levels,
    "terms": cmd_terms,
    "fit": cmd_fit,
    "lifetime": cmd_lifetime,
    "retardation": cmd_retardation,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = _Run(args)
        return _COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, NotImplementedError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
