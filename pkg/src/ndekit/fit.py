"""Least-squares estimation of expansion parameters from a level series.

Three nested variants share one residual function, the level energy from
the inverted expansion:

* ``classic_k3``: ``D, C_n, v_D``
* ``improved_k4``: adds ``gamma_tilde``
* ``full_k5``: adds ``C_m``

Residuals are energies (data minus model).  The solver is SciPy's
Levenberg-Marquardt (MINPACK ``lmder`` with a forward-difference Jacobian),
or its trust-region reflective method when bounds are given.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from . import units
from .bkw import LevelSeries
from .errors import NumericalError
from .nde import NdeModel, exponents, H_n_inverse, nde_inverse_energy

__all__ = [
    "PARAMETERS",
    "VARIANTS",
    "FitSpec",
    "FitReport",
    "fit_nde",
    "sigma_fit",
    "model_ladder",
    "initial_guess",
    "reports_to_csv",
    "reports_to_text",
]

PARAMETERS = ("D", "C_n", "v_D", "gamma_tilde", "C_m")
VARIANTS = {"classic_k3": 3, "improved_k4": 4, "full_k5": 5}
_INVERSE_FOR = {"classic_k3": "classic", "improved_k4": "first_order_single", "full_k5": "full"}
_FEW_LEVELS = 6  # below this the C_m estimate is flagged as weakly determined
_NESTING_RTOL = 1e-8
_PENALTY = 1e12  # residual (MHz) returned for parameters outside the model's domain
_FD_STEP = 6e-6  # about eps^(1/3) in the scaled variables


@dataclass(frozen=True)
class FitSpec:
    """What to fit and how.

    Parameters
    ----------
    variant : {"classic_k3", "improved_k4", "full_k5"}
    n, m : int
        Tail powers; ``m`` is needed for ``full_k5`` only.
    mu : float
        Reduced mass (electron masses).
    initial : dict, optional
        Starting values by parameter name (atomic units); missing ones come
        from :func:`initial_guess`.
    bounds : dict, optional
        ``name -> (lo, hi)``; switches the solver to trust-region reflective.
    window : float, optional
        Keep levels with ``anchor - E < window`` (hartree).  ``None`` keeps all.
    window_anchor : float, optional
        Energy the window is measured from; defaults to the initial ``D``.
    max_iterations : int
        Iteration cap; the evaluation budget is ``max_iterations * (k + 1)``.
    """

    variant: str
    n: int
    m: int | None
    mu: float
    l: int = 0
    initial: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    window: float | None = None
    window_anchor: float | None = None
    max_iterations: int = 100

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {sorted(VARIANTS)}, got {self.variant!r}")
        if self.l != 0:
            raise ValueError("only vibrational (l = 0) fits are implemented")
        exponents(self.n, self.m if self.variant == "full_k5" else None, 0)
        if self.variant == "full_k5" and self.m is None:
            raise ValueError("full_k5 needs the second tail power m")
        unknown = (set(self.initial) | set(self.bounds)) - set(PARAMETERS)
        if unknown:
            raise ValueError(f"unknown parameter names {sorted(unknown)}; expected {PARAMETERS}")
        for name, val in self.initial.items():
            if not math.isfinite(val):
                raise ValueError(f"initial guess for {name} is not finite")
        if self.window is not None and not self.window > 0:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @property
    def k(self) -> int:
        return VARIANTS[self.variant]

    @property
    def free(self) -> tuple[str, ...]:
        return PARAMETERS[: self.k]

    def with_variant(self, variant: str, initial: dict | None = None) -> "FitSpec":
        return FitSpec(
            variant, self.n, self.m, self.mu, self.l, dict(self.initial if initial is None else initial),
            dict(self.bounds), self.window, self.window_anchor, self.max_iterations,
        )

    def select(self, E: np.ndarray) -> np.ndarray:
        """Boolean mask of the levels inside the window (energies in hartree)."""
        if self.window is None:
            return np.ones(len(E), dtype=bool)
        anchor = self.window_anchor
        if anchor is None:
            anchor = self.initial.get("D", _default_D(E))
        return (anchor - E) < self.window


@dataclass
class FitReport:
    """Outcome of one fit; energies are in hartree unless noted."""

    variant: str
    estimates: dict
    stderr: dict
    sigma_fit_mhz: float
    rmse_mhz: float
    residuals: np.ndarray
    v: np.ndarray
    iterations: int
    converged: bool
    covariance: np.ndarray | None
    window: float | None
    sum_squares: float
    flags: list = field(default_factory=list)
    message: str = ""

    @property
    def k(self) -> int:
        return VARIANTS[self.variant]

    @property
    def n_levels(self) -> int:
        return len(self.residuals)


def sigma_fit(residuals, N: int | None = None, k: int = 0) -> tuple[float, float]:
    """``(sqrt(sum r^2) / (N - k), sqrt(sum r^2 / (N - k)))``.

    The first value is the fit statistic used to compare variants, the
    second the usual root-mean-square error; both in the residuals' unit.
    """
    r = np.asarray(residuals, dtype=float)
    N = len(r) if N is None else N
    if not N > k:
        raise ValueError(f"need more levels than parameters, got N={N}, k={k}")
    ss = float(np.sum(r * r))
    return math.sqrt(ss) / (N - k), math.sqrt(ss / (N - k))


def _to_hartree(levels: LevelSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    h = levels.to_unit("hartree")
    w = None if h.weights is None else np.asarray(h.weights, dtype=float)
    return np.asarray(h.v, dtype=float), np.asarray(h.E, dtype=float), w


def _default_D(E: np.ndarray) -> float:
    order = np.argsort(E)
    top = E[order]
    spacing = top[-1] - top[-2] if len(top) > 1 else abs(top[-1]) * 1e-3
    return float(top[-1] + spacing)


def initial_guess(v: np.ndarray, E: np.ndarray, n: int, mu: float, D: float | None = None) -> dict:
    """Cold start: ``D`` one spacing above the top level, ``C_n`` and ``v_D``
    from the classic law through the two highest levels, the rest zero."""
    if len(v) < 2:
        raise ValueError("need at least two levels for a starting guess")
    order = np.argsort(E)
    v, E = v[order], E[order]
    D = _default_D(E) if D is None else D
    beta = (n + 2) / (2.0 * n)
    b1, b2 = D - E[-2], D - E[-1]
    if not (b1 > 0 and b2 > 0):
        raise ValueError("D guess must lie above the fitted levels")
    H = (v[-1] - v[-2]) / (b1 ** (1.0 - beta) - b2 ** (1.0 - beta))
    if not H > 0:
        raise ValueError("levels are not increasing with energy; cannot start the fit")
    # H scales as (-C_n)^(1/n); invert through the unit-C_n value
    C_n = -((H / H_n_inverse(n, -1.0, mu)) ** n)
    v_D = float(v[-1] + H * b2 ** (1.0 - beta))
    return {"D": D, "C_n": C_n, "v_D": v_D, "gamma_tilde": 0.0, "C_m": 0.0}


def _scales(guess: dict, n: int, m: int | None, binding_max: float, spacing: float) -> dict:
    """Typical magnitudes used to normalise the solver variables."""
    C_n = abs(guess["C_n"])
    scale_Cm = 1.0
    if m is not None:
        scale_Cm = C_n / (binding_max / C_n) ** ((m - n) / n)
    return {
        "D": max(abs(spacing), 1e-300),
        "C_n": C_n,
        "v_D": 1.0,
        "gamma_tilde": 1.0 / binding_max,
        "C_m": scale_Cm,
    }


def _polish(residual, jacobian, x, nfev: int, steps: int = 8) -> tuple[np.ndarray, int]:
    """Gauss-Newton steps from the LM optimum while the steps keep shrinking.

    Along strongly correlated directions the cost is flat to machine
    precision, so LM's acceptance test stops early; the step length still
    converges and tells when the optimum is reached.
    """
    r = residual(x)
    last = math.inf
    for _ in range(steps):
        step = np.linalg.lstsq(jacobian(x), r, rcond=None)[0]
        nfev += 2 * len(x)
        size = float(np.linalg.norm(step))
        if not size < 0.5 * last:
            break
        trial = x - step
        r_trial = residual(trial)
        nfev += 1
        if np.all(r_trial == _PENALTY) or not np.all(np.isfinite(r_trial)):
            break
        x, r, last = trial, r_trial, size
    return x, nfev


def fit_nde(levels: LevelSeries, spec: FitSpec) -> FitReport:
    """Fit one variant to the levels inside spec.window."""
    v_all, E_all, w_all = _to_hartree(levels)
    if len(v_all) < 2:
        raise ValueError("need at least two levels")
    sel = spec.select(E_all)
    v, E = v_all[sel], E_all[sel]
    w = None if w_all is None else w_all[sel]
    k = spec.k
    sparse = spec.variant == "full_k5" and len(v) < _FEW_LEVELS
    if len(v) < (3 if sparse else k + 1):
        raise ValueError(f"window holds {len(v)} levels; {spec.variant} needs at least {k + 1}")
    try:
        guess = initial_guess(v, E, spec.n, spec.mu, spec.initial.get("D"))
    except ValueError:
        # a warm-start D below the top level still leaves the cold start usable
        guess = initial_guess(v, E, spec.n, spec.mu)
    guess.update(spec.initial)
    free = spec.free
    spacing = float(np.median(np.abs(np.diff(np.sort(E))))) if len(E) > 1 else 1.0
    binding_max = float(np.max(guess["D"] - E))
    scale = _scales(guess, spec.n, spec.m, binding_max, spacing)
    s = np.array([scale[p] for p in free])
    x0 = np.array([guess[p] for p in free]) / s
    r_unit = units.energy_to_hartree(1.0, "MHz")
    sqrt_w = None if w is None else np.sqrt(w)
    v_top = float(np.max(v))
    invalid = np.full(len(v), _PENALTY)
    m_used = spec.m if spec.variant == "full_k5" else None

    def params(x) -> dict:
        p = dict(guess)
        p.update(zip(free, x * s))
        if spec.variant != "full_k5":
            p["C_m"] = 0.0
        if spec.variant == "classic_k3":
            p["gamma_tilde"] = 0.0
        return p

    def residual(x):
        p = params(x)
        if not (p["C_n"] < 0 and p["v_D"] > v_top):
            return invalid
        model = NdeModel(spec.n, m_used, 0, p["D"], p["C_n"], p["C_m"], p["v_D"], p["gamma_tilde"], spec.mu)
        try:
            with np.errstate(all="raise"):
                r = (E - nde_inverse_energy(v, model, _INVERSE_FOR[spec.variant])) / r_unit
        except (FloatingPointError, ValueError):
            return invalid
        if not np.all(np.isfinite(r)):
            return invalid
        return r if sqrt_w is None else r * sqrt_w

    def jacobian(x):
        # central differences: forward ones leave the optimum off by ~sqrt(eps)
        J = np.empty((len(v), len(x)))
        for i in range(len(x)):
            h = _FD_STEP * max(1.0, abs(x[i]))
            up, down = x.copy(), x.copy()
            up[i] += h
            down[i] -= h
            J[:, i] = (residual(up) - residual(down)) / (2.0 * h)
        return J

    budget = spec.max_iterations * (k + 1)
    tol = dict(xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if spec.bounds or sparse:
        lo = np.array([spec.bounds.get(p, (-np.inf, np.inf))[0] for p in free]) / s
        hi = np.array([spec.bounds.get(p, (-np.inf, np.inf))[1] for p in free]) / s
        x0 = np.clip(x0, lo, hi)
        res = least_squares(residual, x0, method="trf", bounds=(lo, hi), jac=jacobian, max_nfev=budget, **tol)
    else:
        res = least_squares(residual, x0, method="lm", jac=jacobian, max_nfev=budget, **tol)
        if res.status > 0:
            res.x, res.nfev = _polish(residual, jacobian, res.x, res.nfev)
    flags: list[str] = []
    if res.status <= 0:
        flags.append("not_converged")
    p_final = params(res.x)
    r = residual(res.x)
    if r is invalid:
        raise NumericalError(f"{spec.variant}: solver ended on invalid parameters ({res.message})")
    r_hartree = (r if sqrt_w is None else r / sqrt_w) * r_unit
    ss = float(np.sum(r_hartree**2))
    ss_weighted = float(np.sum((r * r_unit) ** 2))

    J = res.jac * (r_unit / s)[None, :]  # weighted residual (hartree) per parameter
    cov = None
    stderr = {}
    sv = np.linalg.svd(res.jac, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        flags.append("singular_jacobian")
    if not sparse:
        dof = len(v) - k
        with np.errstate(all="ignore"):
            cov = np.linalg.pinv(J.T @ J) * (ss_weighted / dof)
        stderr = {p: float(math.sqrt(max(cov[i, i], 0.0))) for i, p in enumerate(free)}
    if sparse:
        # as many or fewer levels than parameters: no error estimate, C_m is not identifiable
        flags.append("wide_confidence_C_m")
        stderr = dict.fromkeys(free, math.nan)
        sig = rmse = math.nan
    else:
        sig, rmse = sigma_fit(r_hartree / r_unit, len(v), k)
    return FitReport(
        variant=spec.variant,
        estimates={p: float(p_final[p]) for p in PARAMETERS},
        stderr=stderr,
        sigma_fit_mhz=sig,
        rmse_mhz=rmse,
        residuals=r_hartree,
        v=v,
        iterations=int(res.nfev),
        converged=res.status > 0,
        covariance=cov,
        window=spec.window,
        sum_squares=ss,
        flags=flags,
        message=str(res.message),
    )


def model_ladder(levels: LevelSeries, base: FitSpec) -> list[FitReport]:
    """Fit ``classic_k3``, ``improved_k4`` and ``full_k5`` on the same window.

    Each variant starts from the previous optimum with its extra parameter
    at zero, so the sum of squares cannot increase along the ladder; a
    violation beyond solver tolerance raises :class:`NumericalError`.
    """
    reports: list[FitReport] = []
    start = dict(base.initial)
    if base.window is not None and base.window_anchor is None:
        E_all = np.asarray(levels.to_unit("hartree").E, dtype=float)
        base = FitSpec(
            base.variant, base.n, base.m, base.mu, base.l, dict(base.initial), dict(base.bounds),
            base.window, base.initial.get("D", _default_D(E_all)), base.max_iterations,
        )
    for variant in VARIANTS:
        spec = base.with_variant(variant, start)
        if variant == "full_k5" and spec.m is None:
            break
        rep = fit_nde(levels, spec)
        if reports and rep.sum_squares > reports[-1].sum_squares * (1.0 + _NESTING_RTOL) + 1e-300:
            raise NumericalError(
                f"{variant} sum of squares {rep.sum_squares:.6e} exceeds {reports[-1].variant} {reports[-1].sum_squares:.6e}"
            )
        reports.append(rep)
        start = {p: rep.estimates[p] for p in PARAMETERS[: rep.k]}
    return reports


# ----------------------------------------------------------------------------
# export

COLUMNS = ("window", "variant", "N", "k", "D", "C_n", "v_D", "gamma_tilde", "C_m", "sigma_fit_MHz", "rmse_MHz", "converged", "flags")


def _row(rep: FitReport, unit: str) -> list[str]:
    e = rep.estimates
    window = "all" if rep.window is None else f"{-units.hartree_to(rep.window, unit):.17g}"
    return [
        window,
        rep.variant,
        str(rep.n_levels),
        str(rep.k),
        f"{units.hartree_to(e['D'], unit):.17g}",
        f"{e['C_n']:.17g}",
        f"{e['v_D']:.17g}",
        # gamma_tilde multiplies an energy; report it per output unit
        f"{e['gamma_tilde'] * units.energy_to_hartree(1.0, unit):.17g}",
        f"{e['C_m']:.17g}",
        f"{rep.sigma_fit_mhz:.17g}",
        f"{rep.rmse_mhz:.17g}",
        "yes" if rep.converged else "no",
        ";".join(rep.flags),
    ]


def reports_to_csv(reports: Sequence[FitReport], unit: str = "cm-1") -> str:
    """One row per variant and window; ``D`` and ``gamma_tilde`` in ``unit``, tail coefficients atomic."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow([f"{c}[{unit}]" if c == "D" else (f"gamma_tilde[1/{unit}]" if c == "gamma_tilde" else c) for c in COLUMNS])
    for rep in reports:
        wr.writerow(_row(rep, unit))
    return buf.getvalue()


def reports_to_text(reports: Sequence[FitReport], unit: str = "cm-1") -> str:
    """Fixed-width table of the same content for reading in a terminal."""
    header = ["window", "variant", "N", "D", "C_n", "v_D", "gamma_tilde", "C_m", "sigma_fit[MHz]", "flags"]
    lines = ["  ".join(f"{h:>14}" for h in header)]
    for rep in reports:
        e = rep.estimates
        window = "all" if rep.window is None else f"{-units.hartree_to(rep.window, unit):.4g}"
        cells = [
            window,
            rep.variant,
            str(rep.n_levels),
            f"{units.hartree_to(e['D'], unit):.6g}",
            f"{e['C_n']:.6g}",
            f"{e['v_D']:.6g}",
            f"{e['gamma_tilde'] * units.energy_to_hartree(1.0, unit):.6g}",
            f"{e['C_m']:.6g}",
            f"{rep.sigma_fit_mhz:.4g}",
            ",".join(rep.flags) or "-",
        ]
        lines.append("  ".join(f"{c:>14}" for c in cells))
    return "\n".join(lines) + "\n"


def write_reports(reports: Sequence[FitReport], path: str | Path, unit: str = "cm-1") -> None:
    Path(path).write_text(reports_to_csv(reports, unit), encoding="utf-8")
