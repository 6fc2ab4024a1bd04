"""Evaluable potential curves.

All curves are callables ``V(R)`` in hartree, accept scalars or arrays and
carry a validity interval ``[r_min, r_max]`` plus the dissociation energy.
Curves are frozen after construction and can be shared between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "PotentialCurve",
    "MultipoleTail",
    "HarmonicWell",
    "PiecewisePotential",
    "build_piecewise",
    "choose_cutoff",
    "CONTINUITY_TOL",
]

CONTINUITY_TOL = 1e-10  # hartree


class PotentialCurve:
    """Base class for one-dimensional potentials.

    Subclasses implement :meth:`evaluate`.  ``dissociation`` may be ``inf``
    for confining model potentials such as the harmonic well.
    """

    r_min: float = 0.0
    r_max: float = math.inf
    dissociation: float = 0.0
    label: str = ""

    @property
    def breakpoints(self) -> tuple:
        """Radii where the first derivative may jump; integrals split there."""
        return ()

    def evaluate(self, R):
        raise NotImplementedError

    def evaluate_scalar(self, R: float) -> float:
        return float(self.evaluate(np.asarray(R, dtype=float)))

    def __call__(self, R):
        if np.ndim(R) == 0:
            return self.evaluate_scalar(float(R))
        return self.evaluate(np.asarray(R, dtype=float))

    def sample(self, grid) -> np.ndarray:
        return np.asarray(self.evaluate(np.asarray(grid, dtype=float)), dtype=float)


@dataclass(frozen=True)
class MultipoleTail(PotentialCurve):
    """``V(R) = D + sum_k C_k / R**k``.

    Parameters
    ----------
    D : float
        Asymptotic energy (hartree).
    terms : sequence of (int, float)
        Pairs ``(k, C_k)``; stored sorted by power.
    """

    D: float
    terms: tuple = ()
    r_min: float = 1e-3
    r_max: float = math.inf
    label: str = "tail"

    def __post_init__(self):
        cleaned = tuple(sorted((int(k), float(c)) for k, c in self.terms))
        powers = [k for k, _ in cleaned]
        if len(set(powers)) != len(powers):
            raise ValueError(f"duplicate powers in tail: {powers}")
        if any(k <= 0 for k in powers):
            raise ValueError("tail powers must be positive integers")
        object.__setattr__(self, "terms", cleaned)

    @property
    def dissociation(self) -> float:  # type: ignore[override]
        return self.D

    def coefficient(self, power: int) -> float:
        for k, c in self.terms:
            if k == power:
                return c
        raise KeyError(f"tail has no 1/R^{power} term (powers: {self.powers})")

    @property
    def powers(self) -> list[int]:
        return [k for k, _ in self.terms]

    def evaluate_scalar(self, R: float) -> float:
        total = self.D
        for k, c in self.terms:
            total += c * R**-k
        return total

    def evaluate(self, R):
        R = np.asarray(R, dtype=float)
        total = np.full_like(R, self.D, dtype=float)
        for k, c in self.terms:
            total = total + c / R**k
        return total


@dataclass(frozen=True)
class HarmonicWell(PotentialCurve):
    """``V(R) = V_min + 0.5 * k * (R - R_e)**2`` with ``k = mu * omega**2``.

    Used as an exactly solvable test case for the semiclassical engine.
    ``half_width`` bounds the sampled domain.
    """

    mu: float
    omega: float
    r_e: float
    v_min: float = 0.0
    half_width: float = 50.0
    label: str = "harmonic"

    @property
    def r_min(self) -> float:  # type: ignore[override]
        return self.r_e - self.half_width

    @property
    def r_max(self) -> float:  # type: ignore[override]
        return self.r_e + self.half_width

    @property
    def dissociation(self) -> float:  # type: ignore[override]
        return math.inf

    @property
    def force_constant(self) -> float:
        return self.mu * self.omega**2

    def evaluate(self, R):
        return self.v_min + 0.5 * self.force_constant * (np.asarray(R, dtype=float) - self.r_e) ** 2


@dataclass(frozen=True)
class PiecewisePotential(PotentialCurve):
    """Linear inner wall, monotone cubic bridge and multipole tail.

    ``V = D_tilde + C_tilde * (R_minus_c - R)`` for ``R < R_minus_c``, a PCHIP
    interpolant of ``bridge_R, bridge_V`` on ``[R_minus_c, R_plus_c]`` and
    ``tail(R)`` beyond ``R_plus_c``.  Build it with :func:`build_piecewise`,
    which pins the bridge end values to the neighbouring pieces.
    """

    D_tilde: float
    C_tilde: float
    R_minus_c: float
    R_plus_c: float
    bridge_R: tuple
    bridge_V: tuple
    tail: MultipoleTail
    label: str = "piecewise"
    _interp: PchipInterpolator = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    @property
    def dissociation(self) -> float:  # type: ignore[override]
        return self.tail.D

    @property
    def r_min(self) -> float:  # type: ignore[override]
        return self.R_minus_c * 1e-3

    @property
    def breakpoints(self) -> tuple:
        # the cubic bridge has a curvature jump at every knot
        return tuple(self.bridge_R)

    def evaluate(self, R):
        R = np.asarray(R, dtype=float)
        wall = self.D_tilde + self.C_tilde * (self.R_minus_c - R)
        safe = np.clip(R, self.R_minus_c, self.R_plus_c)
        bridge = self._interp(safe)
        tail = self.tail.evaluate(np.maximum(R, self.R_plus_c))
        return np.where(R < self.R_minus_c, wall, np.where(R <= self.R_plus_c, bridge, tail))

    def evaluate_scalar(self, R: float) -> float:
        if R < self.R_minus_c:
            return self.D_tilde + self.C_tilde * (self.R_minus_c - R)
        if R <= self.R_plus_c:
            return float(self._interp(R))
        return self.tail.evaluate_scalar(R)

    def bridge_integral(self, energy: float | None = None) -> float:
        """``int (E - V)^(-1/2) dR`` over the bridge, ``E`` defaulting to the tail limit."""
        from scipy.integrate import quad

        E = self.tail.D if energy is None else energy
        val, _ = quad(
            lambda r: 1.0 / math.sqrt(E - float(self._interp(r))),
            self.R_minus_c,
            self.R_plus_c,
            epsabs=0.0,
            epsrel=1e-11,
            limit=400,
        )
        return val


def build_piecewise(
    D_tilde: float,
    C_tilde: float,
    R_minus_c: float,
    R_plus_c: float,
    tail: MultipoleTail,
    bridge_R: Sequence[float] | None = None,
    bridge_V: Sequence[float] | None = None,
    label: str = "piecewise",
) -> PiecewisePotential:
    """Assemble a continuous wall + bridge + tail curve.

    Without bridge samples the tail itself is sampled on ``[R_minus_c,
    R_plus_c]`` and ``D_tilde`` is then ignored in favour of the tail value at
    ``R_minus_c`` (a tail truncated by a straight wall).  Bridge end values are
    overwritten so the pieces meet exactly.
    """
    if not (0.0 < R_minus_c < R_plus_c):
        raise ValueError(f"need 0 < R_minus_c < R_plus_c, got {R_minus_c}, {R_plus_c}")
    if not C_tilde > 0.0:
        raise ValueError(f"wall slope C_tilde must be positive, got {C_tilde}")
    v_tail_c = float(tail(R_plus_c))
    if not v_tail_c < tail.D:
        raise ValueError(f"tail is not attractive at R_plus_c={R_plus_c}: V={v_tail_c} >= D={tail.D}")

    if bridge_R is None:
        grid = np.geomspace(R_minus_c, R_plus_c, 64)
        values = tail.sample(grid)
        D_tilde = float(values[0])
    else:
        if bridge_V is None or len(bridge_R) != len(bridge_V):
            raise ValueError("bridge_R and bridge_V must be given together with equal length")
        grid = np.asarray(bridge_R, dtype=float)
        values = np.asarray(bridge_V, dtype=float).copy()
        if np.any(np.diff(grid) <= 0):
            raise ValueError("bridge_R must be strictly increasing")
        keep = (grid > R_minus_c) & (grid < R_plus_c)
        grid = np.concatenate(([R_minus_c], grid[keep], [R_plus_c]))
        values = np.concatenate(([D_tilde], values[keep], [v_tail_c]))
    values[0] = D_tilde
    values[-1] = v_tail_c
    interp = PchipInterpolator(grid, values, extrapolate=False)
    curve = PiecewisePotential(
        D_tilde=float(D_tilde),
        C_tilde=float(C_tilde),
        R_minus_c=float(R_minus_c),
        R_plus_c=float(R_plus_c),
        bridge_R=tuple(grid.tolist()),
        bridge_V=tuple(values.tolist()),
        tail=tail,
        label=label,
        _interp=interp,
    )
    gap_in = abs(float(interp(R_minus_c)) - D_tilde)
    gap_out = abs(float(interp(R_plus_c)) - v_tail_c)
    if max(gap_in, gap_out) > CONTINUITY_TOL:
        raise ValueError(f"continuity gap {max(gap_in, gap_out):.3e} hartree exceeds {CONTINUITY_TOL}")
    return curve


def choose_cutoff(tail: MultipoleTail, n: int, m: int, ratio: float = 0.01) -> float:
    """Radius where ``|C_m|/R^m`` equals ``ratio * |C_n|/R^n``.

    ``ratio=0.01`` is a strict choice; ``0.1`` is typical for a 10% level.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    if m <= n:
        raise ValueError(f"need m > n, got n={n}, m={m}")
    c_n = tail.coefficient(n)
    c_m = tail.coefficient(m)
    if c_n == 0.0:
        raise ValueError("leading coefficient C_n is zero")
    return (abs(c_m) / (ratio * abs(c_n))) ** (1.0 / (m - n))
