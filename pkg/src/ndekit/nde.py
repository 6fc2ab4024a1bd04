"""Closed-form near-dissociation expansions (NDE).

For a tail ``V(R) = D + C_n/R^n + C_m/R^m`` beyond a cut-off radius
``R_plus_c`` the semiclassical integrals

    I_l(E) = int R^-l (E - V)^-1/2 dR

have closed first-order forms in ``alpha_c = (C_m/C_n) / R_plus_c^(m-n)``.
This module holds the exponents, the special-function helpers, the classic
single-term law, the improved one-parameter law, the two-coefficient law in
both directions (``v`` from ``E`` and ``E`` from ``v``) and the term budget
used to check which pieces matter at a given binding energy.

All quantities are in atomic units (hbar = 1).  ``gamma_tilde`` is the
coefficient of ``(D - E)`` in ``v_D - v`` and so has units of 1/hartree.
"""

from __future__ import annotations

import configparser
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad

__all__ = [
    "Exponents",
    "exponents",
    "gamma_function",
    "beta_function",
    "H_n_inverse",
    "lrb_energy_constant",
    "classic_lrb_energy",
    "classic_lrb_index",
    "gamma_coefficient",
    "gamma_delta",
    "gamma_tilde_delta",
    "T_integral",
    "NdeModel",
    "ExpansionPoint",
    "expansion_point",
    "nde_I_l",
    "full_I_l",
    "nde_vibrational",
    "nde_inverse_energy",
    "nde_rotational_and_kinetic",
    "TermBudget",
    "term_budget",
    "SeriesValidityWarning",
    "LogBranchWarning",
    "INVERSE_VARIANTS",
]

INVERSE_VARIANTS = ("classic", "first_order_single", "full")


class SeriesValidityWarning(UserWarning):
    """``|alpha_c|`` is large enough that dropped second-order terms may matter."""


class LogBranchWarning(UserWarning):
    """``delta = 0``: the constant term uses the logarithmic grouping."""


# ----------------------------------------------------------------------------
# exponents and special functions


@dataclass(frozen=True)
class Exponents:
    """Exact exponents of a tail ``(n, m)`` for the weight ``R^-l``."""

    n: int
    m: int | None
    l: int
    beta: Fraction
    delta: Fraction | None

    @property
    def branch(self) -> str | None:
        """``"neg"``, ``"zero"`` or ``"pos"`` by the exact sign of ``delta``."""
        if self.delta is None:
            return None
        if self.delta < 0:
            return "neg"
        return "zero" if self.delta == 0 else "pos"


def exponents(n: int, m: int | None, l: int = 0) -> Exponents:
    """``beta = (n + 2 - 2l) / 2n`` and ``delta = beta - (m - n)/n`` as fractions.

    Parameters
    ----------
    n, m : int
        Leading and next tail powers, ``2 < n < m``.  ``m=None`` means no
        second term; ``delta`` is then ``None``.
    l : {0, 1, 2}
        Power of the ``1/R^l`` weight.
    """
    if int(n) != n or n <= 2:
        raise ValueError(f"leading power n must be an integer > 2, got {n}")
    if l not in (0, 1, 2):
        raise ValueError(f"l must be 0, 1 or 2, got {l}")
    n = int(n)
    beta = Fraction(n + 2 - 2 * l, 2 * n)
    if m is None:
        return Exponents(n, None, l, beta, None)
    if int(m) != m or m <= n:
        raise ValueError(f"second power m must be an integer > n={n}, got {m}")
    m = int(m)
    return Exponents(n, m, l, beta, beta - Fraction(m - n, n))


def gamma_function(x: float) -> float:
    """Euler Gamma; thin wrapper kept so callers share one implementation."""
    return math.gamma(x)


def beta_function(a: float, b: float) -> float:
    """Euler Beta ``B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)`` for ``a, b > 0``."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ValueError(f"Beta function needs positive arguments, got ({a}, {b})")
    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def _prefactor(mu: float) -> float:
    """``sqrt(2 mu) / (2 pi)``: converts ``I_0`` into ``dv/dE``."""
    if not mu > 0:
        raise ValueError(f"reduced mass must be positive, got {mu}")
    return math.sqrt(2.0 * mu) / (2.0 * math.pi)


def _check_Cn(C_n: float) -> None:
    if not C_n < 0:
        raise ValueError(f"leading coefficient C_n must be negative (attractive), got {C_n}")


def H_n_inverse(n: int, C_n: float, mu: float) -> float:
    """Coefficient of ``(D - E)^((n-2)/2n)`` in ``v_D - v`` for a pure ``C_n`` tail.

    ``sqrt(2 mu / pi) (-C_n)^(1/n) / (n - 2) * Gamma((n+2)/2n) / Gamma((n+1)/n)``.
    """
    _check_Cn(C_n)
    if n <= 2:
        raise ValueError(f"need n > 2, got {n}")
    if not mu > 0:
        raise ValueError(f"reduced mass must be positive, got {mu}")
    return (
        math.sqrt(2.0 * mu / math.pi)
        * (-C_n) ** (1.0 / n)
        / (n - 2)
        * math.gamma((n + 2) / (2.0 * n))
        / math.gamma((n + 1.0) / n)
    )


def lrb_energy_constant(n: int, C_n: float, mu: float) -> float:
    """The factor multiplying ``(v_D - v)`` inside the classic energy law.

    ``sqrt(pi / 2 mu) Gamma(1 + 1/n) / Gamma(1/2 + 1/n) (n - 2) / (-C_n)^(1/n)``;
    it is the reciprocal of :func:`H_n_inverse`.
    """
    _check_Cn(C_n)
    if n <= 2:
        raise ValueError(f"need n > 2, got {n}")
    if not mu > 0:
        raise ValueError(f"reduced mass must be positive, got {mu}")
    return (
        math.sqrt(math.pi / (2.0 * mu))
        * math.gamma(1.0 + 1.0 / n)
        / math.gamma(0.5 + 1.0 / n)
        * (n - 2)
        / (-C_n) ** (1.0 / n)
    )


def _leading_coefficient(n: int, C_n: float, mu: float, beta: float) -> float:
    """``P (-C_n)^(beta - 1/2) B(beta, 1/2) / (n (1 - beta))``; equals ``H_n_inverse`` for l=0."""
    return _prefactor(mu) * (-C_n) ** (beta - 0.5) * beta_function(beta, 0.5) / (n * (1.0 - beta))


# ----------------------------------------------------------------------------
# classic law


def classic_lrb_energy(v, n: int, C_n: float, mu: float, D: float, v_D: float):
    """``E = D - ((v_D - v) / H_n_inverse)^(2n/(n-2))``."""
    x = v_D - np.asarray(v, dtype=float)
    if np.any(x < 0):
        raise ValueError(f"v must not exceed v_D={v_D}")
    H = H_n_inverse(n, C_n, mu)
    out = D - (x / H) ** (2.0 * n / (n - 2))
    return float(out) if np.ndim(out) == 0 else out


def classic_lrb_index(E, n: int, C_n: float, mu: float, D: float, v_D: float):
    """Inverse of :func:`classic_lrb_energy`: ``v = v_D - H (D - E)^((n-2)/2n)``."""
    de = D - np.asarray(E, dtype=float)
    if np.any(de < 0):
        raise ValueError(f"E must not exceed D={D}")
    out = v_D - H_n_inverse(n, C_n, mu) * de ** ((n - 2) / (2.0 * n))
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# constants collecting the cut-off and inner-region contributions


def gamma_coefficient(
    D: float,
    D_tilde: float,
    C_tilde: float,
    bridge_integral: float,
    C_n: float,
    n: int,
    mu: float,
    R_plus_c: float,
) -> float:
    """Single constant of the improved law ``v_D - v = H (D-E)^(1-beta) + gamma (D-E)``.

    Three pieces: the cut-off correction of the asymptotic integral, the
    straight inner wall ``2 sqrt(D - D_tilde) / C_tilde`` and the bridge
    integral ``int (D - V)^-1/2 dR`` between the wall and ``R_plus_c``.
    A ``C_tilde`` of ``inf`` drops the wall term.
    """
    _check_Cn(C_n)
    vals = (D, D_tilde, bridge_integral, R_plus_c)
    if not all(math.isfinite(x) for x in vals):
        raise ValueError("gamma_coefficient inputs must be finite")
    if D_tilde > D:
        raise ValueError(f"wall top D_tilde={D_tilde} lies above the limit D={D}")
    if not C_tilde > 0:
        raise ValueError(f"wall slope must be positive, got {C_tilde}")
    P = _prefactor(mu)
    cutoff = -math.sqrt(2.0 * mu) / ((n + 2) * math.pi) * (-C_n) ** -0.5 * R_plus_c ** ((n + 2) / 2.0)
    wall = 0.0 if math.isinf(C_tilde) else 2.0 * math.sqrt(D - D_tilde) / C_tilde
    return cutoff + P * (wall + bridge_integral)


def gamma_delta(
    I_na_at_D: float,
    C_n: float,
    C_m: float,
    n: int,
    m: int,
    l: int,
    R_plus_c: float,
) -> float:
    """Constant term of the compact ``I_l`` form (units of ``I_l``).

    Groups the inner integral at the limit, the cut-off term and, for
    ``delta != 0``, the cut-off piece of the ``C_m`` correction.  For
    ``delta = 0`` the logarithmic constant ``beta B(beta,1/2) +
    ln(R_plus_c^n / -C_n) / 2`` of the ``C_m`` term is folded in instead.
    """
    _check_Cn(C_n)
    ex = exponents(n, m, l)
    beta, delta = float(ex.beta), float(ex.delta)
    pre = (-C_n) ** -0.5
    value = I_na_at_D - pre * R_plus_c ** (n * beta) / (n * beta)
    if ex.branch == "neg":
        value += 0.5 * pre * (C_m / C_n) * R_plus_c ** (n * delta) / (n * delta)
    elif ex.branch == "zero":
        value += pre / n * (C_m / C_n) * (beta * beta_function(beta, 0.5) + 0.5 * math.log(R_plus_c**n / -C_n))
    return value


def gamma_tilde_delta(
    I_na_at_D: float,
    C_n: float,
    C_m: float,
    n: int,
    m: int,
    l: int,
    R_plus_c: float,
    mu: float,
) -> float:
    """``sqrt(2 mu)/(2 pi)`` times :func:`gamma_delta`: the fitted ``(D - E)`` coefficient.

    Warns with :class:`LogBranchWarning` when ``delta = 0``, where the
    constant uses the logarithmic grouping.
    """
    if exponents(n, m, l).branch == "zero":
        warnings.warn(
            f"delta = 0 for (n, m, l) = ({n}, {m}, {l}); using the logarithmic constant grouping",
            LogBranchWarning,
            stacklevel=2,
        )
    return _prefactor(mu) * gamma_delta(I_na_at_D, C_n, C_m, n, m, l, R_plus_c)


# ----------------------------------------------------------------------------
# T integrals


def _ratio_power(u: float, q: float) -> float:
    """``(1 - u^q) / (1 - u)`` without cancellation near ``u = 1``."""
    if u == 1.0:
        return q
    if u == 0.0:
        return 1.0
    lu = math.log(u)
    return math.expm1(q * lu) / math.expm1(lu)


def T_integral(l: int, k: int, n: int, m: int | None, y_to_n: float, mode: str = "series") -> float:
    """``T_{l,k}(y^n) = (1/n) int_{y^n}^1 u^(beta-1-k(m-n)/n) (1-u)^-1/2 ((1-u^(m/n))/(1-u))^k du``.

    ``mode="series"`` returns the leading terms of the expansion about
    ``y^n = 0``; ``mode="quadrature"`` integrates the definition directly.
    Only ``k`` in {0, 1} is supported.  A value that diverges at ``y^n = 0``
    is returned as ``inf`` in series mode and rejected in quadrature mode.
    """
    if k not in (0, 1):
        raise ValueError(f"only k = 0 and k = 1 are supported, got {k}")
    if not 0.0 <= y_to_n < 1.0:
        raise ValueError(f"y^n must lie in [0, 1), got {y_to_n}")
    if k == 1 and m is None:
        raise ValueError("k = 1 needs the second power m")
    ex = exponents(n, m if k == 1 else None, l)
    beta = float(ex.beta)
    if mode == "series":
        if k == 0:
            return beta_function(beta, 0.5) / n - y_to_n**beta / (n * beta)
        delta = float(ex.delta)
        if ex.branch == "neg":
            return math.inf if y_to_n == 0 else -(y_to_n**delta) / (delta * n)
        if ex.branch == "zero":
            return math.inf if y_to_n == 0 else -math.log(y_to_n) / n
        return ((1.0 - 2.0 * delta) * beta_function(delta, 0.5) + 2.0 * beta * beta_function(beta, 0.5)) / n
    if mode != "quadrature":
        raise ValueError(f"mode must be 'series' or 'quadrature', got {mode!r}")
    power = beta - 1.0 - (k * (m - n) / n if k else 0.0)
    if y_to_n == 0.0 and power <= -1.0:
        raise ValueError(f"T_{{{l},{k}}}(0) diverges for (n, m) = ({n}, {m})")
    q = (m / n) if k else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if y_to_n == 0.0:
            # both endpoint singularities go into the QUADPACK algebraic weight
            f = (lambda u: _ratio_power(u, q)) if k else (lambda u: 1.0)
            val, err = quad(f, 0.0, 1.0, weight="alg", wvar=(power, -0.5), epsabs=0.0, epsrel=1e-12, limit=400)
        else:
            f = (lambda u: u**power * _ratio_power(u, q)) if k else (lambda u: u**power)
            val, err = quad(f, y_to_n, 1.0, weight="alg", wvar=(0.0, -0.5), epsabs=0.0, epsrel=1e-12, limit=400)
    if err > 1e-9 * abs(val) + 1e-15:
        from .errors import NumericalError

        raise NumericalError(f"T integral quadrature did not converge (value={val:.6e}, error estimate={err:.2e})")
    return val / n


# ----------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class NdeModel:
    """Parameters of the two-coefficient expansion (atomic units).

    Parameters
    ----------
    n, m : int
        Tail powers; ``m=None`` (or ``C_m=0``) disables the second term.
    l : int
        Weight power; 0 for vibration, 2 for the rotational constant.
    D : float
        Dissociation limit (hartree).
    C_n, C_m : float
        Tail coefficients in ``hartree * bohr^n`` and ``hartree * bohr^m``.
    v_D : float
        Vibrational index at the limit.
    gamma_tilde : float
        Coefficient of ``(D - E)`` in ``v_D - v`` (1/hartree).
    mu : float
        Reduced mass (electron masses).
    """

    n: int
    m: int | None
    l: int
    D: float
    C_n: float
    C_m: float
    v_D: float
    gamma_tilde: float
    mu: float

    def __post_init__(self):
        _check_Cn(self.C_n)
        if not self.mu > 0:
            raise ValueError(f"reduced mass must be positive, got {self.mu}")
        if self.m is None and self.C_m != 0.0:
            raise ValueError("C_m given without its power m")
        ex = exponents(self.n, self.m, self.l)
        if not 0 < ex.beta < 1:
            raise ValueError(f"beta={ex.beta} must lie in (0, 1)")
        for name in ("D", "C_n", "C_m", "v_D", "gamma_tilde", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def exps(self) -> Exponents:
        return exponents(self.n, self.m, self.l)

    @property
    def beta(self) -> float:
        return float(self.exps.beta)

    @property
    def delta(self) -> float | None:
        d = self.exps.delta
        return None if d is None else float(d)

    @property
    def has_second_term(self) -> bool:
        return self.m is not None and self.C_m != 0.0

    @property
    def leading_coefficient(self) -> float:
        """Coefficient ``H`` of ``(D - E)^(1 - beta)`` in ``v_D - v`` (l = 0 models)."""
        return _leading_coefficient(self.n, self.C_n, self.mu, self.beta)

    def with_(self, **changes) -> "NdeModel":
        return replace(self, **changes)

    def classic(self) -> "NdeModel":
        """Same model with ``gamma_tilde = C_m = 0``."""
        return replace(self, gamma_tilde=0.0, C_m=0.0)

    # serialization ---------------------------------------------------------

    _SECTION = "nde_model"

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str  # type: ignore[assignment]
        cp[self._SECTION] = {
            "n": str(self.n),
            "m": "none" if self.m is None else str(self.m),
            "l": str(self.l),
            "D": repr(float(self.D)),
            "C_n": repr(float(self.C_n)),
            "C_m": repr(float(self.C_m)),
            "v_D": repr(float(self.v_D)),
            "gamma_tilde": repr(float(self.gamma_tilde)),
            "mu": repr(float(self.mu)),
            "units": "atomic",
        }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "NdeModel":
        cp = configparser.ConfigParser()
        cp.optionxform = str  # type: ignore[assignment]
        cp.read_string(text)
        if cls._SECTION not in cp:
            raise ValueError(f"missing [{cls._SECTION}] section")
        s = cp[cls._SECTION]
        if s.get("units", "atomic") != "atomic":
            raise ValueError(f"unsupported units {s.get('units')!r}; models are stored in atomic units")
        try:
            m_raw = s["m"].strip().lower()
            return cls(
                n=int(s["n"]),
                m=None if m_raw == "none" else int(m_raw),
                l=int(s["l"]),
                D=float(s["D"]),
                C_n=float(s["C_n"]),
                C_m=float(s["C_m"]),
                v_D=float(s["v_D"]),
                gamma_tilde=float(s["gamma_tilde"]),
                mu=float(s["mu"]),
            )
        except KeyError as exc:
            raise ValueError(f"missing model field {exc.args[0]!r}") from None

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_ini(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NdeModel":
        return cls.from_ini(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ExpansionPoint:
    """Zero-order outer-turning-point variables at one energy."""

    y0_to_n: float
    alpha_0: float
    alpha_c: float


def expansion_point(E: float, model: NdeModel, R_plus_c: float) -> ExpansionPoint:
    """``y0^n = (D - E) R_plus_c^n / (-C_n)``, ``alpha_0`` and ``alpha_c``.

    Raises for ``|alpha_c| >= 1`` (series diverges) and warns with
    :class:`SeriesValidityWarning` above 0.1.
    """
    if not R_plus_c > 0:
        raise ValueError(f"cut-off radius must be positive, got {R_plus_c}")
    de = model.D - E
    if not de > 0:
        raise ValueError(f"need E < D, got D - E = {de}")
    n = model.n
    if model.has_second_term:
        ratio = model.C_m / model.C_n
        k = model.m - n
        alpha_c = ratio / R_plus_c**k
        alpha_0 = ratio * (de / -model.C_n) ** (k / n)
    else:
        alpha_c = alpha_0 = 0.0
    if abs(alpha_c) >= 1.0:
        raise ValueError(f"|alpha_c| = {abs(alpha_c):.3g} >= 1: expansion about alpha_c = 0 is invalid; raise R_plus_c")
    if abs(alpha_c) > 0.1:
        warnings.warn(f"|alpha_c| = {abs(alpha_c):.3g} > 0.1; first-order terms may not suffice", SeriesValidityWarning, stacklevel=2)
    return ExpansionPoint(de * R_plus_c**n / -model.C_n, alpha_0, alpha_c)


# ----------------------------------------------------------------------------
# forward forms


def _second_term_bracket(ex: Exponents, de: float, *, full_R_plus_c: float | None = None, C_n: float = -1.0) -> float:
    """Delta-branched factor multiplying the ``C_m`` term of ``I_l``."""
    beta, delta = float(ex.beta), float(ex.delta)
    bb = beta * beta_function(beta, 0.5)
    if full_R_plus_c is None:
        if ex.branch == "neg":
            return bb
        if ex.branch == "zero":
            return 0.5 * math.log(de)
        return (delta - 0.5) * beta_function(delta, 0.5)
    x_rc = de * full_R_plus_c**ex.n / -C_n
    if ex.branch == "neg":
        return bb + x_rc**delta / (2.0 * delta)
    if ex.branch == "zero":
        return bb + 0.5 * math.log(x_rc)
    return (delta - 0.5) * beta_function(delta, 0.5)


def _energy_gap(E, D) -> float:
    de = D - E
    if not de > 0:
        raise ValueError(f"need E < D strictly, got D - E = {de}")
    return de


def nde_I_l(E: float, model: NdeModel, R_plus_c: float | None = None) -> float:
    """Compact first-order ``I_l(E)``: leading term, constant and ``C_m`` term.

    The constant is ``model.gamma_tilde / (sqrt(2 mu)/(2 pi))``.  With
    ``R_plus_c`` given, the expansion variable is validated first.
    """
    de = _energy_gap(E, model.D)
    if R_plus_c is not None:
        expansion_point(E, model, R_plus_c)
    ex = model.exps
    beta = float(ex.beta)
    pre = (-model.C_n) ** -0.5
    X = de / -model.C_n
    value = pre * beta_function(beta, 0.5) / model.n * X**-beta + model.gamma_tilde / _prefactor(model.mu)
    if model.has_second_term:
        value += pre / model.n * (model.C_m / model.C_n) * X ** -float(ex.delta) * _second_term_bracket(ex, de)
    return value


def full_I_l(E: float, model: NdeModel, R_plus_c: float, I_na_at_D: float = 0.0) -> float:
    """First-order ``I_l(E)`` with every cut-off dependent constant written out.

    ``I_na_at_D`` is the inner integral from the inner turning point to
    ``R_plus_c`` at the limit; 0 gives the asymptotic part alone, which is
    what a pure two-term tail starting at ``R_plus_c`` produces.
    ``model.gamma_tilde`` is ignored.
    """
    de = _energy_gap(E, model.D)
    expansion_point(E, model, R_plus_c)
    ex = model.exps
    beta = float(ex.beta)
    n = model.n
    pre = (-model.C_n) ** -0.5
    X = de / -model.C_n
    value = pre * beta_function(beta, 0.5) / n * X**-beta + I_na_at_D - pre * R_plus_c ** (n * beta) / (n * beta)
    if model.has_second_term:
        br = _second_term_bracket(ex, de, full_R_plus_c=R_plus_c, C_n=model.C_n)
        value += pre / n * (model.C_m / model.C_n) * X ** -float(ex.delta) * br
    return value


def _vib_second_term(model: NdeModel, de: float) -> float:
    if not model.has_second_term or de == 0.0:
        return 0.0
    ex = model.exps
    delta = float(ex.delta)
    K = _prefactor(model.mu) * (-model.C_n) ** (delta - 0.5) / model.n * (model.C_m / model.C_n)
    return K * de ** (1.0 - delta) / (1.0 - delta) * _second_term_bracket(ex, de)


def _require_vibrational(model: NdeModel) -> None:
    if model.l != 0:
        raise ValueError(f"vibrational formulas need an l = 0 model, got l = {model.l}")


def nde_vibrational(E, model: NdeModel):
    """``v_D - v`` as a function of energy.

    ``H (D-E)^(1-beta) + gamma_tilde (D-E) + K (D-E)^(1-delta)/(1-delta) * bracket``;
    ``E = D`` gives 0.  Accepts scalars or arrays.
    """
    _require_vibrational(model)
    arr = np.asarray(E, dtype=float)
    de_arr = model.D - arr
    if np.any(de_arr < 0):
        raise ValueError("E must not exceed D")
    H = model.leading_coefficient
    beta = model.beta

    def one(de: float) -> float:
        if de == 0.0:
            return 0.0
        return H * de ** (1.0 - beta) + model.gamma_tilde * de + _vib_second_term(model, de)

    if arr.ndim == 0:
        return one(float(de_arr))
    return np.array([one(float(d)) for d in de_arr.ravel()]).reshape(arr.shape)


def nde_inverse_energy(v, model: NdeModel, variant: str = "full"):
    """Energy of level ``v`` from the first-order inverted expansion.

    Parameters
    ----------
    variant : {"classic", "first_order_single", "full"}
        ``classic`` uses only the leading term; ``first_order_single`` adds
        the ``gamma_tilde`` correction; ``full`` also the ``C_m`` correction.
    """
    _require_vibrational(model)
    if variant not in INVERSE_VARIANTS:
        raise ValueError(f"variant must be one of {INVERSE_VARIANTS}, got {variant!r}")
    arr = np.asarray(v, dtype=float)
    x_arr = model.v_D - arr
    if np.any(x_arr < 0):
        raise ValueError(f"v must not exceed v_D={model.v_D}")
    H = model.leading_coefficient
    beta = model.beta
    ex = model.exps
    use_gamma = variant != "classic"
    use_cm = variant == "full" and model.has_second_term
    if use_cm:
        delta = float(ex.delta)
        K = _prefactor(model.mu) * (-model.C_n) ** (delta - 0.5) / model.n * (model.C_m / model.C_n) / (1.0 - delta)

    def one(x: float) -> float:
        if x == 0.0:
            return model.D
        L = (x / H) ** (1.0 / (1.0 - beta))
        corr = 0.0
        if use_gamma:
            corr += model.gamma_tilde * L
        if use_cm:
            corr += K * L ** (1.0 - delta) * _second_term_bracket(ex, L)
        return model.D - L * (1.0 - corr / ((1.0 - beta) * x))

    if arr.ndim == 0:
        return one(float(x_arr))
    return np.array([one(float(x)) for x in x_arr.ravel()]).reshape(arr.shape)


def nde_rotational_and_kinetic(E: float, v: float, model_l0: NdeModel, model_l2: NdeModel) -> tuple[float, float]:
    """Rotational constant ``I_2 / (2 mu I_0)`` and mean kinetic energy.

    ``model_l0`` and ``model_l2`` share the tail and differ in ``l`` and in
    their constants.  Returns ``(B_v, <T>)`` in hartree.
    """
    if model_l0.l != 0 or model_l2.l != 2:
        raise ValueError("need one l = 0 and one l = 2 model")
    if (model_l0.n, model_l0.m, model_l0.C_n, model_l0.C_m, model_l0.mu) != (
        model_l2.n,
        model_l2.m,
        model_l2.C_n,
        model_l2.C_m,
        model_l2.mu,
    ):
        raise ValueError("l = 0 and l = 2 models must share n, m, C_n, C_m and mu")
    I0 = nde_I_l(E, model_l0)
    I2 = nde_I_l(E, model_l2)
    if not I0 > 0:
        raise ValueError(f"I_0 = {I0} is not positive at E = {E}; outside the expansion's range")
    mu = model_l0.mu
    return I2 / (2.0 * mu * I0), math.pi * (v + 0.5) / (math.sqrt(2.0 * mu) * I0)


# ----------------------------------------------------------------------------
# term budget


TERM_ROWS = (
    ("leading", "(D-E)^(1-beta)"),
    ("gamma_na_D", "gamma^na(D)"),
    ("gamma_na_E", "gamma^na(E)"),
    ("gamma_beta", "gamma_beta"),
    ("gamma_delta", "gamma_delta"),
    ("second_term", "(D-E)^(1-delta)"),
    ("series_tail", "O(y^n)"),
)


@dataclass
class TermBudget:
    """Contributions to ``v_D - v`` at several binding energies.

    ``rows`` maps a row key to one value per column of ``binding``
    (hartree).  ``sum_implemented`` adds the terms the expansion keeps.
    """

    binding: list[float]
    rows: dict[str, list[float]]
    R_plus_c: float
    labels: dict[str, str] = field(default_factory=lambda: dict(TERM_ROWS))

    IMPLEMENTED = ("leading", "gamma_na_D", "gamma_beta", "gamma_delta", "second_term")

    @property
    def sum_implemented(self) -> list[float]:
        return [sum(self.rows[k][j] for k in self.IMPLEMENTED if self.rows[k][j] is not None) for j in range(len(self.binding))]


def term_budget(
    model: NdeModel,
    R_plus_c: float,
    binding: Sequence[float],
    I_na_at_D: float,
    I_na_at_E: Sequence[float] | None = None,
) -> TermBudget:
    """Split ``v_D - v`` into its individual first-order pieces.

    Parameters
    ----------
    model : NdeModel
        ``l = 0`` model; its ``gamma_tilde`` is not used, the constant is
        rebuilt from ``I_na_at_D`` and ``R_plus_c`` and split in three.
    binding : sequence of float
        ``D - E`` values (hartree), all positive.
    I_na_at_D : float
        Inner integral from the inner turning point to ``R_plus_c`` at the limit.
    I_na_at_E : sequence of float, optional
        The same integral at each energy, for the diagnostic row.
    """
    _require_vibrational(model)
    binding = [float(b) for b in binding]
    if any(not b > 0 for b in binding):
        raise ValueError("binding energies D - E must be positive")
    if I_na_at_E is not None and len(I_na_at_E) != len(binding):
        raise ValueError("I_na_at_E needs one value per binding energy")
    P = _prefactor(model.mu)
    n, beta = model.n, model.beta
    pre = (-model.C_n) ** -0.5
    H = model.leading_coefficient
    rows: dict[str, list] = {k: [] for k, _ in TERM_ROWS}
    ex = model.exps
    for j, de in enumerate(binding):
        expansion_point(model.D - de, model, R_plus_c)
        rows["leading"].append(H * de ** (1.0 - beta))
        rows["gamma_na_D"].append(P * I_na_at_D * de)
        rows["gamma_na_E"].append(None if I_na_at_E is None else P * I_na_at_E[j] * de)
        rows["gamma_beta"].append(-P * pre * R_plus_c ** (n * beta) / (n * beta) * de)
        if model.has_second_term:
            delta = float(ex.delta)
            ratio = model.C_m / model.C_n
            if ex.branch == "neg" or ex.branch == "pos":
                gd = 0.5 * pre * ratio * R_plus_c ** (n * delta) / (n * delta) if ex.branch == "neg" else 0.0
            else:
                gd = pre / n * ratio * (beta * beta_function(beta, 0.5) + 0.5 * math.log(R_plus_c**n / -model.C_n))
            rows["gamma_delta"].append(P * gd * de)
        else:
            rows["gamma_delta"].append(0.0)
        rows["second_term"].append(_vib_second_term(model, de))
        # next term of the leading-order series, integrated over energy
        rows["series_tail"].append(-P * (-model.C_n) ** -1.5 * R_plus_c ** (n * (beta + 1.0)) * de**2 / (4.0 * n * (beta + 1.0)))
    return TermBudget(binding, rows, R_plus_c)
