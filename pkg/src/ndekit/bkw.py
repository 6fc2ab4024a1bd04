"""Semiclassical (WKB) observables by direct quadrature.

This is the brute-force reference that the closed-form expansions are
checked against.  Everything is in atomic units with hbar = 1:

* phase integral ``S(E) = int sqrt(E - V) dR`` between turning points,
* vibrational index ``v(E) = sqrt(2 mu) S(E) / pi - 1/2``,
* ``I_l(E) = int R^-l (E - V)^-1/2 dR`` so that ``dv/dE = sqrt(2 mu) I_0 / (2 pi)``,
* rotational constant ``I_2 / (2 mu I_0)`` and mean kinetic energy.

The inverse square-root endpoint behaviour is removed by the substitution
``R = a + (b - a) sin^2 t`` (both ends singular) or ``R = a + (b - a) s^2``
(one end singular) before handing the integrand to QUADPACK.
"""

from __future__ import annotations

import csv
import io
import math
import re
import warnings
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, minimize_scalar

from . import units
from .curves import PotentialCurve
from .errors import NonSingleWellError, NumericalError

__all__ = [
    "TurningPoints",
    "WellInfo",
    "LevelSeries",
    "SplitIntegral",
    "analyze_well",
    "turning_points",
    "phase_integral",
    "vibrational_index",
    "dissociation_index",
    "level_energies",
    "integral_I_l",
    "nonasymptotic_integral",
    "asymptotic_integral",
    "outer_integral",
    "rotational_constant",
    "kinetic_energy",
    "QUAD_RTOL",
]

QUAD_RTOL = 1e-11  # requested relative accuracy for every integral
QUAD_ACCEPT = 1e-9  # error estimate above this (relative) is a failure
_ROOT_TOL = 1e-12  # hartree, |V(R) - E| at a turning point
_LINEAR_EDGE = 1e-7  # fraction of the interval treated with a linearised V near a turning point


@dataclass(frozen=True)
class TurningPoints:
    R_minus: float
    R_plus: float

    def __post_init__(self):
        if not self.R_minus < self.R_plus:
            raise ValueError(f"turning points out of order: {self.R_minus} >= {self.R_plus}")

    @property
    def width(self) -> float:
        return self.R_plus - self.R_minus


@dataclass
class WellInfo:
    """Sampled curve and refined minimum, shared by all energies."""

    grid: np.ndarray
    values: np.ndarray
    r_eq: float
    v_min: float
    dissociation: float

    @property
    def depth(self) -> float:
        return self.dissociation - self.v_min


def _scan_grid(curve: PotentialCurve, points: int) -> np.ndarray:
    lo = curve.r_min
    hi = curve.r_max if math.isfinite(curve.r_max) else max(lo, 1.0) * 1e5
    if lo > 0:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


@lru_cache(maxsize=128)
def _cached_well(curve: PotentialCurve, points: int) -> WellInfo:
    grid = _scan_grid(curve, points)
    values = curve.sample(grid)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"curve {curve.label!r} is not finite on its validity range")
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        raise ValueError(f"curve {curve.label!r} has no interior minimum in [{grid[0]:.6g}, {grid[-1]:.6g}] bohr")
    res = minimize_scalar(curve, bounds=(grid[i - 1], grid[i + 1]), method="bounded", options={"xatol": 1e-12 * grid[i]})
    r_eq, v_min = float(res.x), float(res.fun)
    if values[i] < v_min:
        r_eq, v_min = float(grid[i]), float(values[i])
    return WellInfo(grid, values, r_eq, v_min, float(curve.dissociation))


def analyze_well(curve: PotentialCurve, points: int = 4001) -> WellInfo:
    """Locate the minimum of a single-well curve (cached per curve)."""
    return _cached_well(curve, points)


def _refine(curve: PotentialCurve, E: float, a: float, b: float) -> float:
    f = lambda r: curve(r) - E  # noqa: E731
    try:
        root = brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"turning point refinement failed in [{a}, {b}] at E={E}: {exc}") from exc
    # bracket endpoints are exact fallbacks; keep whichever side matches best
    resid = abs(f(root))
    if resid > _ROOT_TOL:
        raise NumericalError(f"turning point residual {resid:.3e} hartree exceeds {_ROOT_TOL} at R={root}")
    return root


def _outer_bracket(curve: PotentialCurve, E: float, start: float) -> float:
    r = start
    for _ in range(200):
        r *= 2.0
        if r > curve.r_max:
            raise ValueError(f"E={E} reaches beyond the validity range (r_max={curve.r_max})")
        if curve(r) > E:
            return r
    raise NumericalError(f"outer turning point not found below R={r} at E={E}")


def turning_points(curve: PotentialCurve, E: float, info: WellInfo | None = None) -> TurningPoints:
    """Inner and outer roots of ``V(R) = E``.

    Raises
    ------
    ValueError
        If ``E`` is not strictly between the well minimum and the limit.
    NonSingleWellError
        If more than two roots exist in the validity range.
    """
    info = info or analyze_well(curve)
    if not (info.v_min < E < info.dissociation):
        raise ValueError(f"E={E} outside the well range ({info.v_min}, {info.dissociation})")
    f = info.values - E
    if f[0] <= 0:
        raise ValueError(f"E={E} is above V(r_min={info.grid[0]}); the inner wall is outside the validity range")
    brackets = []
    neg = f < 0
    idx = np.nonzero(neg[1:] != neg[:-1])[0]
    for i in idx:
        brackets.append((info.grid[i], info.grid[i + 1]))
    if neg[-1]:
        brackets.append((info.grid[-1], _outer_bracket(curve, E, info.grid[-1])))
    if not brackets:
        # E lies within grid resolution of the bottom; use the refined minimum
        j = int(np.searchsorted(info.grid, info.r_eq))
        brackets = [(info.grid[max(j - 1, 0)], info.r_eq), (info.r_eq, info.grid[min(j + 1, len(info.grid) - 1)])]
    if len(brackets) > 2:
        roots = ", ".join(f"{0.5 * (a + b):.4g}" for a, b in brackets)
        raise NonSingleWellError(f"V(R)=E has {len(brackets)} roots near R = {roots} bohr; not a single well")
    if len(brackets) != 2:
        raise ValueError(f"E={E} does not give two turning points in the validity range")
    r_minus = _refine(curve, E, *brackets[0])
    r_plus = _refine(curve, E, *brackets[1])
    return TurningPoints(r_minus, r_plus)


def _quad(fun, a: float, b: float, what: str, atol: float = 0.0) -> float:
    """QUADPACK adaptive Gauss-Kronrod with an explicit acceptance test."""
    with warnings.catch_warnings():
        # convergence is judged below from the returned error estimate
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(fun, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=500)
    if not math.isfinite(val) or err > QUAD_ACCEPT * abs(val) + atol:
        raise NumericalError(f"{what}: quadrature did not converge (value={val:.6e}, error estimate={err:.2e})")
    return val


class _Edges:
    """``E - V(R)`` with a linearised form within a tiny distance of either turning point.

    Differencing two nearly equal energies right at a turning point loses all
    significant digits; the linear form keeps the integrand finite there.
    """

    def __init__(self, curve: PotentialCurve, E: float, lo: float | None, hi: float | None, span: float):
        self.curve, self.E = curve, E
        self.h = _LINEAR_EDGE * span
        self.lo = None if lo is None else (lo, self._slope(lo, +1.0))
        self.hi = None if hi is None else (hi, self._slope(hi, -1.0))

    def _slope(self, r0: float, inward: float) -> float:
        slope = (self.E - self.curve(r0 + inward * self.h)) / self.h
        if not slope > 0:
            raise NumericalError(f"curve is flat at the turning point R={r0}; cannot resolve the endpoint")
        return slope

    def gap(self, R: float, known: tuple = ()) -> float:
        """``E - V(R)``; ``known`` holds ``(endpoint, distance)`` pairs computed exactly by the caller."""
        for edge in (self.lo, self.hi):
            if edge is not None:
                d = abs(R - edge[0])
                for point, dist in known:
                    if point == edge[0]:
                        d = dist
                if d < self.h:
                    return edge[1] * d
        return self.E - self.curve(R)


def _segment(curve, E, a, b, *, power, l, sing_a, sing_b, edges, what, atol=0.0) -> float:
    """``int_a^b (E - V)^power R^-l dR`` with square-root endpoints removed.

    ``power`` is +1/2 (phase) or -1/2 (I_l integrals).  A singular upper end
    far from ``a`` is handled with ``R = a / u^2`` so the slow tail of a
    long-range well is sampled evenly.
    """
    kinks = [k for k in curve.breakpoints if a < k < b]
    if kinks:
        pts = [a, *kinks, b]
        last = len(pts) - 2
        return sum(
            _segment(curve, E, lo, hi, power=power, l=l, sing_a=sing_a and i == 0, sing_b=sing_b and i == last,
                     edges=edges, what=what, atol=atol)
            for i, (lo, hi) in enumerate(zip(pts, pts[1:]))
        )
    w = b - a

    def f(R, known=()):
        # R rounds onto an endpoint near it, so distances come from the substitution
        g = edges.gap(R, known)
        if power > 0:
            return math.sqrt(g) * R**-l if g > 0 else 0.0
        return R**-l / math.sqrt(g)

    if sing_a and sing_b:
        if b > 4.0 * a:
            m = math.sqrt(a * b)
            return _segment(curve, E, a, m, power=power, l=l, sing_a=True, sing_b=False, edges=edges, what=what, atol=atol) + _segment(
                curve, E, m, b, power=power, l=l, sing_a=False, sing_b=True, edges=edges, what=what, atol=atol
            )

        def h(t):
            lo, hi = w * math.sin(t) ** 2, w * math.cos(t) ** 2
            return f(a + lo, ((a, lo), (b, hi))) * w * math.sin(2.0 * t)

        return _quad(h, 0.0, 0.5 * math.pi, what, atol)
    if sing_a:
        return _quad(lambda s: f(a + w * s * s, ((a, w * s * s),)) * 2.0 * w * s, 0.0, 1.0, what, atol)
    if sing_b:
        if b > 2.0 * a:
            ub = math.sqrt(a / b)
            span = 1.0 - ub

            def g(s):
                u = ub + span * s * s
                d_b = a * span * s * s * (u + ub) / (u * u * ub * ub)
                return f(a / (u * u), ((b, d_b),)) * 4.0 * a * span * s / u**3

            return _quad(g, 0.0, 1.0, what, atol)
        return _quad(lambda s: f(b - w * s * s, ((b, w * s * s),)) * 2.0 * w * s, 0.0, 1.0, what, atol)
    return _quad(f, a, b, what, atol)


def phase_integral(curve: PotentialCurve, E: float, info: WellInfo | None = None) -> float:
    """``int sqrt(E - V) dR`` over the classically allowed region."""
    info = info or analyze_well(curve)
    if E == info.dissociation:
        return _phase_at_limit(curve, info)
    tp = turning_points(curve, E, info)
    edges = _Edges(curve, E, None, None, tp.width)  # sqrt(E - V) needs no endpoint help
    # absolute floor: 1e-14 in the phase is ~1e-12 in v for molecular masses
    return _segment(
        curve, E, tp.R_minus, tp.R_plus, power=0.5, l=0, sing_a=True, sing_b=True, edges=edges,
        what=f"phase integral at E={E}", atol=1e-14,
    )


def _inner_root_at_limit(curve: PotentialCurve, info: WellInfo) -> float:
    D = info.dissociation
    if not math.isfinite(D):
        raise ValueError("curve has no finite dissociation limit")
    f = info.values - D
    left = np.nonzero((info.grid < info.r_eq) & (f > 0))[0]
    if f[0] <= 0 or len(left) == 0:
        raise ValueError("inner wall does not reach the dissociation limit inside the validity range")
    i = left[-1]
    return _refine(curve, D, info.grid[i], info.grid[i + 1])


def _phase_at_limit(curve: PotentialCurve, info: WellInfo) -> float:
    D = info.dissociation
    r_in = _inner_root_at_limit(curve, info)
    r_x = 2.0 * info.r_eq
    if not curve(r_x) < D:
        r_x = info.r_eq
    edges = _Edges(curve, D, r_in, None, r_x - r_in)
    inner = _segment(curve, D, r_in, r_x, power=0.5, l=0, sing_a=True, sing_b=False, edges=edges,
                     what="phase integral (inner part) at the limit")
    # far cut where the remaining gap is a small fraction of the depth; beyond
    # it the tail follows a local power law K R^-p, integrated in closed form
    target = 1e-10 * info.depth
    r_far = r_x
    while D - curve(r_far) > target:
        r_far *= 1.5
        if r_far > 1e12:
            raise NumericalError("tail does not approach the limit fast enough")
    g1, g2 = D - curve(r_far), D - curve(2.0 * r_far)
    if not (g1 > 0 and g2 > 0):
        raise NumericalError(f"cannot resolve the tail beyond R={r_far}; gap below round-off")
    p = math.log(g1 / g2) / math.log(2.0)
    if not p > 2.0:
        raise ValueError(f"tail decays as R^-{p:.3f}; the phase integral diverges at the limit (need power > 2)")
    far = math.sqrt(g1) * r_far / (0.5 * p - 1.0)
    u_far = math.sqrt(r_x / r_far)

    def outer(u):
        g = D - curve(r_x / (u * u))
        return math.sqrt(g) * 2.0 * r_x / u**3 if g > 0 else 0.0

    mid = _quad(outer, u_far, 1.0, "phase integral (outer part) at the limit", atol=QUAD_ACCEPT * inner)
    return inner + mid + far


def vibrational_index(
    curve: PotentialCurve,
    E: float,
    mu: float,
    *,
    flambaum: bool = False,
    n: int | None = None,
    info: WellInfo | None = None,
) -> float:
    """Non-integer vibrational index from the Bohr quantisation condition.

    ``E`` may equal the dissociation limit for tails falling faster than
    ``1/R^2``.  With ``flambaum=True`` the threshold correction
    ``1 / (2 (n - 2))`` is added, which needs the leading power ``n``.
    """
    if not mu > 0:
        raise ValueError("reduced mass must be positive")
    val = math.sqrt(2.0 * mu) / math.pi * phase_integral(curve, E, info) - 0.5
    if flambaum:
        if n is None or n <= 2:
            raise ValueError("flambaum correction needs the leading tail power n > 2")
        val += 1.0 / (2.0 * (n - 2))
    return val


def dissociation_index(curve: PotentialCurve, mu: float, **kw) -> float:
    """``v_D``: the vibrational index at the dissociation limit."""
    return vibrational_index(curve, curve.dissociation, mu, **kw)


@dataclass(frozen=True)
class SplitIntegral:
    total: float
    asymptotic: float
    non_asymptotic: float


def _one_sided(curve, E, a, b, l, singular_at_a: bool, what: str) -> float:
    """``int_a^b R^-l (E - V)^-1/2 dR`` with one turning point at ``a`` or ``b``."""
    edges = _Edges(curve, E, a if singular_at_a else None, None if singular_at_a else b, b - a)
    return _segment(curve, E, a, b, power=-0.5, l=l, sing_a=singular_at_a, sing_b=not singular_at_a, edges=edges, what=what)


def integral_I_l(
    curve: PotentialCurve,
    E: float,
    l: int = 0,
    split_at: float | None = None,
    info: WellInfo | None = None,
):
    """``I_l(E) = int R^-l (E - V)^-1/2 dR`` between the turning points.

    With ``split_at`` a :class:`SplitIntegral` is returned whose parts are
    the integrals below and above that radius.
    """
    if l not in (0, 1, 2):
        raise ValueError(f"l must be 0, 1 or 2, got {l}")
    info = info or analyze_well(curve)
    tp = turning_points(curve, E, info)
    if split_at is not None:
        if not tp.R_minus < split_at < tp.R_plus:
            raise ValueError(f"split radius {split_at} not inside ({tp.R_minus}, {tp.R_plus})")
        na = _one_sided(curve, E, tp.R_minus, split_at, l, True, "non-asymptotic integral")
        asy = _one_sided(curve, E, split_at, tp.R_plus, l, False, "asymptotic integral")
        return SplitIntegral(na + asy, asy, na)
    edges = _Edges(curve, E, tp.R_minus, tp.R_plus, tp.width)
    return _segment(
        curve, E, tp.R_minus, tp.R_plus, power=-0.5, l=l, sing_a=True, sing_b=True, edges=edges, what=f"I_{l} at E={E}"
    )


def nonasymptotic_integral(curve: PotentialCurve, energy: float, R_c: float, l: int = 0, info: WellInfo | None = None) -> float:
    """``int_{R_-}^{R_c} R^-l (energy - V)^-1/2 dR``; ``energy`` may equal the limit."""
    info = info or analyze_well(curve)
    if energy == info.dissociation:
        r_in = _inner_root_at_limit(curve, info)
    else:
        r_in = turning_points(curve, energy, info).R_minus
    if not r_in < R_c:
        raise ValueError(f"R_c={R_c} is inside the inner turning point {r_in}")
    if not curve(R_c) < energy:
        raise ValueError(f"R_c={R_c} is outside the classically allowed region at this energy")
    return _one_sided(curve, energy, r_in, R_c, l, True, "non-asymptotic integral")


def asymptotic_integral(curve: PotentialCurve, E: float, R_c: float, l: int = 0, info: WellInfo | None = None) -> float:
    """``int_{R_c}^{R_+} R^-l (E - V)^-1/2 dR``."""
    tp = turning_points(curve, E, info)
    if not tp.R_minus < R_c < tp.R_plus:
        raise ValueError(f"R_c={R_c} not inside ({tp.R_minus}, {tp.R_plus})")
    return _one_sided(curve, E, R_c, tp.R_plus, l, False, "asymptotic integral")


def outer_integral(curve: PotentialCurve, E: float, R_c: float, l: int = 0) -> float:
    """``int_{R_c}^{R_+} R^-l (E - V)^-1/2 dR`` with ``R_+`` the first root beyond ``R_c``.

    Needs no inner wall, so it works on a bare multipole tail.
    """
    if not curve(R_c) < E:
        raise ValueError(f"R_c={R_c} is not classically allowed at E={E}")
    if not E < curve.dissociation:
        raise ValueError(f"E={E} is not below the limit {curve.dissociation}")
    r_plus = _refine(curve, E, R_c, _outer_bracket(curve, E, R_c))
    return _one_sided(curve, E, R_c, r_plus, l, False, "outer integral")


def rotational_constant(curve: PotentialCurve, E: float, mu: float, info: WellInfo | None = None) -> float:
    """Semiclassical ``B_v = I_2 / (2 mu I_0)`` in hartree."""
    info = info or analyze_well(curve)
    return integral_I_l(curve, E, 2, info=info) / (2.0 * mu * integral_I_l(curve, E, 0, info=info))


def kinetic_energy(curve: PotentialCurve, E: float, v: int, mu: float, info: WellInfo | None = None) -> float:
    """Mean kinetic energy ``pi (v + 1/2) / (sqrt(2 mu) I_0)``.

    ``v`` must be the level number that ``E`` quantises to (within 0.5).
    """
    info = info or analyze_well(curve)
    v_e = vibrational_index(curve, E, mu, info=info)
    if abs(v_e - v) > 0.5:
        raise ValueError(f"E={E} corresponds to v={v_e:.3f}, not v={v}")
    return math.pi * (v + 0.5) / (math.sqrt(2.0 * mu) * integral_I_l(curve, E, 0, info=info))


@dataclass(frozen=True)
class LevelSeries:
    """Ordered vibrational levels ``(v, E)`` with an energy unit tag."""

    v: tuple
    E: tuple
    unit: str = "hartree"
    label: str = ""
    dissociation: float | None = None
    weights: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        object.__setattr__(self, "E", tuple(float(x) for x in self.E))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(x) for x in self.weights))
            if len(self.weights) != len(self.v):
                raise ValueError("weights must match the number of levels")
        if len(self.v) != len(self.E):
            raise ValueError("v and E must have equal length")
        units._energy_unit(self.unit)
        if any(b <= a for a, b in zip(self.v, self.v[1:])):
            raise ValueError("v must be strictly increasing")
        if any(b <= a for a, b in zip(self.E, self.E[1:])):
            raise ValueError("E must be strictly increasing with v")
        if self.dissociation is not None and any(e >= self.dissociation for e in self.E):
            raise ValueError("all levels must lie below the dissociation limit")

    def __len__(self) -> int:
        return len(self.v)

    @property
    def v_array(self) -> np.ndarray:
        return np.asarray(self.v, dtype=float)

    @property
    def E_array(self) -> np.ndarray:
        return np.asarray(self.E, dtype=float)

    def to_unit(self, unit: str) -> "LevelSeries":
        conv = lambda x: units.convert_energy(x, self.unit, unit)  # noqa: E731
        return LevelSeries(
            self.v,
            tuple(conv(e) for e in self.E),
            unit,
            self.label,
            None if self.dissociation is None else conv(self.dissociation),
            self.weights,
        )

    def window(self, below: float, limit: float) -> "LevelSeries":
        """Levels with ``limit - E < below`` (same unit as the series)."""
        keep = [i for i, e in enumerate(self.E) if limit - e < below]
        return LevelSeries(
            [self.v[i] for i in keep],
            [self.E[i] for i in keep],
            self.unit,
            self.label,
            self.dissociation,
            None if self.weights is None else [self.weights[i] for i in keep],
        )

    def to_csv(self, header_lines: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        cols = ["v", f"E[{self.unit}]"] + (["weight"] if self.weights is not None else [])
        w.writerow(cols)
        for i, (v, e) in enumerate(zip(self.v, self.E)):
            row = [str(v), f"{e:.17g}"]
            if self.weights is not None:
                row.append(f"{self.weights[i]:.17g}")
            w.writerow(row)
        return buf.getvalue()

    def write_csv(self, path: str | Path, header_lines: Sequence[str] = ()) -> None:
        Path(path).write_text(self.to_csv(header_lines), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "LevelSeries":
        """Parse CSV text; errors name the offending line number."""
        header = None
        vs, es, ws = [], [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c.strip() for c in next(csv.reader([line]))]
            if header is None:
                header = cells
                m = re.fullmatch(r"E\[(.+)\]", header[1]) if len(header) >= 2 else None
                if header[0] != "v" or m is None:
                    raise ValueError(f"line {lineno}: expected header 'v,E[unit]', got {line!r}")
                unit = m.group(1)
                has_w = len(header) >= 3 and header[2] == "weight"
                continue
            if len(cells) != len(header):
                raise ValueError(f"line {lineno}: expected {len(header)} columns, got {len(cells)}: {line!r}")
            try:
                vs.append(int(cells[0]))
                es.append(float(cells[1]))
                if has_w:
                    ws.append(float(cells[2]))
            except ValueError:
                raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
        if header is None:
            raise ValueError("no header line 'v,E[unit]' found")
        try:
            return cls(vs, es, unit, label, None, ws if has_w else None)
        except ValueError as exc:
            raise ValueError(f"invalid level series: {exc}") from None

    @classmethod
    def read_csv(cls, path: str | Path) -> "LevelSeries":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"), label=Path(path).stem)


def _level_below_limit(f, v: int, lo: float, D: float, depth: float, energy_tol: float) -> float:
    """Solve ``f(E, v) = 0`` above ``lo`` in the variable ``x = ln(D - E)``.

    Working with the binding energy keeps full relative precision for the
    last levels, which can sit far below any absolute energy tolerance.
    """
    g = lambda x: f(D - math.exp(x), v)  # noqa: E731
    x_lo = math.log(D - lo)
    x_hi = x_lo
    floor = math.log(depth) - 100.0
    while True:
        x_hi -= math.log(10.0)
        if x_hi < floor:
            raise NumericalError(f"level v={v} not found within {math.exp(floor):.1e} hartree of the limit")
        if g(x_hi) > 0:
            break
        x_lo = x_hi
    xtol = min(1e-10, energy_tol / (D - lo))
    try:
        x = brentq(g, x_hi, x_lo, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    except ValueError as exc:
        raise NumericalError(f"could not bracket level v={v} below the limit: {exc}") from exc
    return D - math.exp(x)


def level_energies(
    curve: PotentialCurve,
    mu: float,
    v_min: int = 0,
    v_max: int | None = None,
    *,
    flambaum: bool = False,
    n: int | None = None,
    energy_tol: float = 1e-14,
) -> LevelSeries:
    """Energies of integer levels ``v_min..v_max`` (hartree).

    ``v_max`` defaults to ``floor(v_D)``.  Each level is bracketed above the
    previous one and refined with Brent's method to ``energy_tol`` hartree
    (1e-14 hartree is about 66 Hz) or 1e-10 relative in the binding energy,
    whichever is tighter.
    """
    info = analyze_well(curve)
    kw = dict(flambaum=flambaum, n=n, info=info)
    D = info.dissociation
    if math.isfinite(D):
        v_D = vibrational_index(curve, D, mu, **kw)
        v_top = math.floor(v_D)
    else:
        v_D, v_top = math.inf, None
    if v_max is None:
        if v_top is None:
            raise ValueError("v_max is required for curves without a dissociation limit")
        v_max = v_top
    if v_min < 0:
        raise ValueError("v_min must be >= 0")
    if v_top is not None and v_max > v_top:
        raise ValueError(f"v={v_max} is above the last bound level; the maximum supported v is {v_top} (v_D={v_D:.4f})")
    f = lambda e, v: vibrational_index(curve, e, mu, **kw) - v  # noqa: E731
    lo = info.v_min + 1e-12 * (info.depth if math.isfinite(info.depth) else 1.0)
    energies, levels = [], []
    for v in range(v_min, v_max + 1):
        if math.isfinite(D):
            e = _level_below_limit(f, v, lo, D, info.depth, energy_tol)
        else:
            hi, step = lo, max(abs(lo - info.v_min), 1e-6)
            while f(hi, v) < 0:
                step *= 2.0
                hi = lo + step
            try:
                e = brentq(f, lo, hi, args=(v,), xtol=energy_tol, rtol=4 * np.finfo(float).eps, maxiter=200)
            except ValueError as exc:
                raise NumericalError(f"could not bracket level v={v} in [{lo}, {hi}]: {exc}") from exc
        energies.append(e)
        levels.append(v)
        lo = e
    return LevelSeries(levels, energies, "hartree", curve.label, D if math.isfinite(D) else None)
