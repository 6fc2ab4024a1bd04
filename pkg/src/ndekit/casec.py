"""Long-range Hund's case (c) curves for an ns + n'p alkali pair.

Builds the spin-orbit coupled blocks over Hund's case (a) multipole curves,
adds the relativistic dipole-ratio correction and optional spin-spin,
rotation and retardation terms, then diagonalises them in closed form.
Energies are hartree, lengths bohr.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import units
from .curves import MultipoleTail, PotentialCurve
from .eigen import eigvalsh_3x3

__all__ = [
    "CaseCParams",
    "SymmetryLabel",
    "CurveOptions",
    "AdiabaticCurve",
    "ExpansionResult",
    "all_labels",
    "build_case_c_matrix",
    "asymptotic_matrix",
    "adiabatic_branch",
    "expand_branch",
    "hund_a_curves",
    "relativistic_correction",
    "leroy_radius",
    "retardation_factors",
    "reduced_wavelength",
    "epsilon_from_lifetimes",
    "lifetime_from_C3",
    "C3_from_reduced_dipole",
    "case_e_transition_0g_minus",
    "case_e_matrix_0g_minus",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CaseCParams:
    """Species inputs for the case (c) blocks (atomic units).

    ``C3`` is positive by convention; the sign of each case (a) curve comes
    from the block structure.  ``A`` is two thirds of the fine-structure
    splitting.
    """

    C3: float
    C6_sigma: float
    C6_pi: float
    A: float
    C8_sigma_s: float = 0.0
    C8_sigma_a: float = 0.0
    C8_pi_s: float = 0.0
    C8_pi_a: float = 0.0
    epsilon: float = 0.0
    E_p: float = 0.0
    mass_a: float = 0.0
    mass_b: float = 0.0
    E_s_to_p: float = 0.0  # excitation energy of the p centroid, for retardation

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"spin-orbit constant A must be positive, got {self.A}")
        if abs(self.epsilon) >= 0.1:
            raise ValueError(f"|epsilon| must be < 0.1, got {self.epsilon}")

    @property
    def reduced_mass(self) -> float:
        return units.reduced_mass(self.mass_a, self.mass_b)

    @property
    def fine_structure(self) -> float:
        return 1.5 * self.A

    def without_c8(self) -> "CaseCParams":
        return replace(self, C8_sigma_s=0.0, C8_sigma_a=0.0, C8_pi_s=0.0, C8_pi_a=0.0)

    def with_epsilon(self, epsilon: float) -> "CaseCParams":
        return replace(self, epsilon=epsilon)

    @classmethod
    def from_species(cls, path: str | Path | None = None, *, include_c8: bool = True, include_epsilon: bool = True) -> "CaseCParams":
        """Load a species data file (defaults to the bundled Cs2 file)."""
        if path is None:
            from importlib import resources

            with resources.as_file(resources.files("ndekit") / "data" / "cs133.ini") as p:
                table = units.load_table(p)
        else:
            table = units.load_table(path)

        def get(key, default=None):
            if key not in table:
                if default is None:
                    raise KeyError(f"species file {path or 'cs133.ini'} lacks {key!r}")
                return default
            q = table[key]
            return units.to_atomic(q.value, q.unit)

        if "A" in table:
            A = get("A")
        elif "fine_structure" in table:
            A = get("fine_structure") * 2.0 / 3.0
        else:
            A = (get("D2_line") - get("D1_line")) * 2.0 / 3.0
        mass = get("mass", 0.0)
        mass_a = get("mass_a", mass)
        mass_b = get("mass_b", mass)
        if "D2_line" in table and "D1_line" in table:
            e_sp = (2.0 * get("D2_line") + get("D1_line")) / 3.0
        else:
            e_sp = get("E_s_to_p", 0.0)
        c8 = {k: get(k, 0.0) if include_c8 else 0.0 for k in ("C8_sigma_s", "C8_sigma_a", "C8_pi_s", "C8_pi_a")}
        return cls(
            C3=get("C3"),
            C6_sigma=get("C6_sigma"),
            C6_pi=get("C6_pi"),
            A=A,
            epsilon=get("epsilon", 0.0) if include_epsilon else 0.0,
            mass_a=mass_a,
            mass_b=mass_b,
            E_s_to_p=e_sp,
            **c8,
        )


_LABEL_RE = re.compile(r"^\s*([012])\s*([gu])\s*([+-]?)\s*$|^\s*([012])\s*([+-]?)\s*([gu])\s*$")


@dataclass(frozen=True, order=True)
class SymmetryLabel:
    """``|Omega|``, reflection symmetry (``Omega = 0`` only) and g/u parity."""

    omega_abs: int
    parity: str
    sigma: str = ""

    def __post_init__(self):
        if self.omega_abs not in (0, 1, 2):
            raise ValueError(f"|Omega| must be 0, 1 or 2, got {self.omega_abs}")
        if self.parity not in ("g", "u"):
            raise ValueError(f"parity must be 'g' or 'u', got {self.parity!r}")
        if self.omega_abs == 0 and self.sigma not in ("+", "-"):
            raise ValueError("Omega = 0 labels need a +/- reflection symmetry")
        if self.omega_abs != 0 and self.sigma:
            raise ValueError("reflection symmetry is only meaningful for Omega = 0")

    @classmethod
    def parse(cls, text: str) -> "SymmetryLabel":
        """Accept ``0g-``, ``0-g``, ``1u``, ``2g`` and similar spellings."""
        m = _LABEL_RE.match(text.replace("^", "").replace("_", ""))
        if not m:
            raise ValueError(f"unknown symmetry label {text!r}; valid: {', '.join(str(l) for l in all_labels())}")
        if m.group(1):
            omega, parity, sigma = m.group(1), m.group(2), m.group(3)
        else:
            omega, sigma, parity = m.group(4), m.group(5), m.group(6)
        try:
            return cls(int(omega), parity, sigma)
        except ValueError as exc:
            raise ValueError(f"unknown symmetry label {text!r}: {exc}; valid: {', '.join(str(l) for l in all_labels())}") from None

    @property
    def gerade(self) -> bool:
        return self.parity == "g"

    @property
    def dimension(self) -> int:
        return {2: 1, 1: 3, 0: 2}[self.omega_abs]

    def __str__(self) -> str:
        return f"{self.omega_abs}{self.parity}{self.sigma}"


def all_labels() -> list[SymmetryLabel]:
    """The eight label families; together they hold 16 distinct curves."""
    out = []
    for parity in ("g", "u"):
        out.append(SymmetryLabel(2, parity))
        out.append(SymmetryLabel(1, parity))
        out.append(SymmetryLabel(0, parity, "+"))
        out.append(SymmetryLabel(0, parity, "-"))
    return out


@dataclass(frozen=True)
class CurveOptions:
    include_epsilon: bool = True
    include_spin_spin: bool = False
    rotation_J: int | None = None
    include_retardation: bool = False
    lambda_bar: float | None = None  # bohr; derived from params when None


def retardation_factors(R, lambda_bar: float):
    """Multipliers of the resonant dipole term for Sigma and Pi curves.

    Returns ``(f_sigma, f_pi)``; both tend to 1 as ``R -> 0``.
    """
    if not lambda_bar > 0:
        raise ValueError(f"lambda_bar must be positive, got {lambda_bar}")
    x = np.asarray(R, dtype=float) / lambda_bar
    c, s = np.cos(x), np.sin(x)
    f_sigma = c + x * s
    f_pi = -(x**2) * c + x * s + c
    if np.ndim(f_sigma) == 0:
        return float(f_sigma), float(f_pi)
    return f_sigma, f_pi


def reduced_wavelength(excitation_energy: float) -> float:
    """``c / omega`` in bohr for a transition energy in hartree."""
    if not excitation_energy > 0:
        raise ValueError("excitation energy must be positive")
    return units.speed_of_light() / excitation_energy


def hund_a_curves(R, params: CaseCParams, lambda_bar: float | None = None) -> dict:
    """Hund's case (a) multipole curves relative to ``E_p``.

    Keys name the symmetric/antisymmetric combinations: ``sigma_s`` is the
    3Sigma_u+ / 1Sigma_g+ curve, ``sigma_a`` the 3Sigma_g+ / 1Sigma_u+ one,
    ``pi_a`` the 3Pi_g / 1Pi_u one and ``pi_s`` the 3Pi_u / 1Pi_g one.
    Works elementwise on floats or arrays.
    """
    c3 = params.C3 / R**3
    if lambda_bar is None:
        c3_sig = c3_pi = c3
    else:
        f_sig, f_pi = retardation_factors(R, lambda_bar)
        c3_sig, c3_pi = c3 * f_sig, c3 * f_pi
    r6 = R**-6
    r8 = R**-8
    return {
        "sigma_s": 2.0 * c3_sig + params.C6_sigma * r6 + params.C8_sigma_s * r8,
        "pi_a": c3_pi + params.C6_pi * r6 + params.C8_pi_a * r8,
        "pi_s": -c3_pi + params.C6_pi * r6 + params.C8_pi_s * r8,
        "sigma_a": -2.0 * c3_sig + params.C6_sigma * r6 + params.C8_sigma_a * r8,
    }


def _parity_sign(label: SymmetryLabel) -> float:
    # sign of the dipole-ratio correction: -1 for g, +1 for u
    return -1.0 if label.gerade else 1.0


def _relativistic_pattern(label: SymmetryLabel, e: float) -> list[list[float]]:
    if label.omega_abs == 2:
        return [[0.0]]
    if label.omega_abs == 1:
        return [
            [2 * (e - 3) / 9, 2 * e / 9, -(3 + 2 * e) / 9],
            [2 * e / 9, 2 * (3 + e) / 9, -(9 + 2 * e) / 9],
            [-(3 + 2 * e) / 9, -(9 + 2 * e) / 9, 2 * (6 + e) / 9],
        ]
    if label.sigma == "+":
        return [[-4 * (3 + 2 * e) / 9, -SQRT2 * (9 + 4 * e) / 9], [-SQRT2 * (9 + 4 * e) / 9, -4 * (3 + e) / 9]]
    return [[-4.0 / 3, -SQRT2 / 3], [-SQRT2 / 3, 4.0 / 3]]


def relativistic_correction(label: SymmetryLabel, R, C3: float, epsilon: float) -> np.ndarray:
    """Correction block from the deviation of the D1/D2 dipole ratio.

    Every entry scales as ``epsilon * C3 / R**3`` and flips sign between g
    and u.  Returned with a trailing ``(d, d)`` shape, broadcast over ``R``.
    """
    scale = _parity_sign(label) * epsilon * C3 / np.asarray(R, dtype=float) ** 3
    return np.multiply.outer(scale, np.array(_relativistic_pattern(label, epsilon)))


def _block_entries(label: SymmetryLabel, h: dict, A: float) -> list[list]:
    g = label.gerade
    if label.omega_abs == 2:
        pi3 = h["pi_a"] if g else h["pi_s"]
        return [[pi3 + A / 2]]
    if label.omega_abs == 1:
        pi3 = h["pi_a"] if g else h["pi_s"]
        pi1 = h["pi_s"] if g else h["pi_a"]
        sig3 = h["sigma_a"] if g else h["sigma_s"]
        return [[pi3, -A / 2, A / 2], [-A / 2, pi1, A / 2], [A / 2, A / 2, sig3]]
    pi3 = h["pi_a"] if g else h["pi_s"]
    if label.sigma == "+":
        other = h["sigma_s"] if g else h["sigma_a"]
        off = -A / SQRT2
    else:
        other = h["sigma_a"] if g else h["sigma_s"]
        off = A / SQRT2
    return [[pi3 - A / 2, off], [off, other]]


def _lambda_bar(params: CaseCParams, options: CurveOptions) -> float:
    if options.lambda_bar is not None:
        return options.lambda_bar
    if not params.E_s_to_p > 0:
        raise ValueError("retardation needs lambda_bar or the s-p excitation energy in the species data")
    return reduced_wavelength(params.E_s_to_p)


def _matrix_entries(label: SymmetryLabel, R, params: CaseCParams, options: CurveOptions, constant: bool = True) -> list[list]:
    """Entries of the block as nested lists of floats or arrays.

    With ``constant=False`` the spin-orbit and ``E_p`` parts are left out,
    giving exactly the R-dependent part.
    """
    lam = _lambda_bar(params, options) if options.include_retardation else None
    ent = _block_entries(label, hund_a_curves(R, params, lam), params.A if constant else 0.0)
    d = label.dimension
    if options.include_epsilon and params.epsilon != 0.0 and label.omega_abs != 2:
        scale = _parity_sign(label) * params.epsilon * params.C3 / R**3
        pat = _relativistic_pattern(label, params.epsilon)
        ent = [[ent[i][j] + scale * pat[i][j] for j in range(d)] for i in range(d)]
    if options.include_spin_spin or options.rotation_J is not None:
        if not (label.omega_abs == 0 and label.sigma == "-" and label.gerade):
            raise NotImplementedError(f"spin-spin and rotation corrections are only available for 0g-, not {label}")
        if options.include_spin_spin:
            ss = units.speed_of_light() ** -2 / R**3
            ent = [[ent[0][0] - 0.5 * ss, ent[0][1]], [ent[1][0], ent[1][1] + ss]]
        if options.rotation_J is not None:
            J = options.rotation_J
            if int(J) != J or J < label.omega_abs:
                raise ValueError(f"rotation_J must be an integer >= |Omega|, got {J}")
            if not params.mass_a > 0:
                raise ValueError("rotation needs atomic masses in the species data")
            jj = J * (J + 1)
            b = 1.0 / (2.0 * params.reduced_mass * R**2)
            off = 2.0 * SQRT2 * b
            ent = [[ent[0][0] + (jj + 2.0) * b, ent[0][1] + off], [ent[1][0] + off, ent[1][1] + (jj + 4.0) * b]]
    if constant and params.E_p != 0.0:
        ent = [[ent[i][j] + (params.E_p if i == j else 0.0) for j in range(d)] for i in range(d)]
    return ent


def _stack(entries: list[list], shape: tuple) -> np.ndarray:
    d = len(entries)
    m = np.empty(shape + (d, d))
    for i in range(d):
        for j in range(d):
            m[..., i, j] = entries[i][j]
    return m


def build_case_c_matrix(label: SymmetryLabel | str, R, params: CaseCParams, options: CurveOptions | None = None) -> np.ndarray:
    """Case (c) matrix at one or many radii.

    Parameters
    ----------
    label : SymmetryLabel or str
    R : float or array
        Internuclear distance(s) in bohr, all positive.
    params : CaseCParams
    options : CurveOptions, optional

    Returns
    -------
    ndarray
        Shape ``(d, d)`` for scalar ``R`` or ``R.shape + (d, d)``.
    """
    if isinstance(label, str):
        label = SymmetryLabel.parse(label)
    options = options or CurveOptions()
    R_arr = np.asarray(R, dtype=float)
    if np.any(~(R_arr > 0)):
        raise ValueError("internuclear distance must be positive")
    return _stack(_matrix_entries(label, R_arr, params, options), R_arr.shape)


def asymptotic_matrix(label: SymmetryLabel | str, params: CaseCParams) -> np.ndarray:
    """The block with every R-dependent term removed (spin-orbit only)."""
    if isinstance(label, str):
        label = SymmetryLabel.parse(label)
    zero = dict.fromkeys(("sigma_s", "pi_a", "pi_s", "sigma_a"), 0.0)
    return _stack(_block_entries(label, zero, params.A), ()) + params.E_p * np.eye(label.dimension)


def _eigvals_batch(m: np.ndarray) -> np.ndarray:
    d = m.shape[-1]
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("case (c) matrix has non-finite entries")
    if d == 1:
        return m[..., 0, :].copy()
    if d == 2:
        a, b, off = m[..., 0, 0], m[..., 1, 1], m[..., 0, 1]
        mid = 0.5 * (a + b)
        half = np.hypot(0.5 * (a - b), off)
        return np.stack([mid - half, mid + half], axis=-1)
    flat = m.reshape(-1, 3, 3)
    out = np.array([eigvalsh_3x3(x) for x in flat])
    return out.reshape(m.shape[:-1])


@dataclass(frozen=True)
class AdiabaticCurve(PotentialCurve):
    """One eigenvalue branch of a case (c) block, shifted by ``reference``.

    Branches are numbered in ascending energy.  The blocks have no true
    crossings for alkali parameters, so eigenvalue order is continuous in R;
    :meth:`min_gap` reports the closest approach on a grid as a check.
    """

    symmetry: SymmetryLabel
    branch: int
    params: CaseCParams
    options: CurveOptions = field(default_factory=CurveOptions)
    reference: float = 0.0
    r_min: float = 1.0
    r_max: float = math.inf

    @property
    def label(self) -> str:  # type: ignore[override]
        return f"{self.symmetry}[{self.branch}]"

    @property
    def dissociation(self) -> float:  # type: ignore[override]
        return self._offset()

    def _offset(self) -> float:
        """Asymptote minus reference, snapped to 0 when equal up to round-off."""
        lam_inf = float(_eigvals_batch(asymptotic_matrix(self.symmetry, self.params)[None])[0][self.branch])
        c = lam_inf - self.reference
        if abs(c) <= 64 * np.finfo(float).eps * (abs(lam_inf) + abs(self.reference)):
            return 0.0
        return c

    def _shift_2x2(self, delta: list[list]):
        """Eigenvalue minus its R -> inf limit, formed without cancellation."""
        inf = _block_entries(self.symmetry, dict.fromkeys(("sigma_s", "pi_a", "pi_s", "sigma_a"), 0.0), self.params.A)
        d_inf = 0.5 * (inf[0][0] - inf[1][1])
        off_inf = inf[0][1]
        half_inf = math.hypot(d_inf, off_inf)
        dd = 0.5 * (delta[0][0] - delta[1][1])
        doff = delta[0][1]
        dmid = 0.5 * (delta[0][0] + delta[1][1])
        half_sq_diff = 2.0 * d_inf * dd + dd * dd + 2.0 * off_inf * doff + doff * doff
        half = np.hypot(d_inf + dd, off_inf + doff)
        dhalf = half_sq_diff / (half + half_inf)
        return dmid - dhalf if self.branch == 0 else dmid + dhalf

    def evaluate(self, R):
        R = np.asarray(R, dtype=float)
        if np.any(~(R > 0)):
            raise ValueError("internuclear distance must be positive")
        d = self.symmetry.dimension
        if d == 3:
            m = build_case_c_matrix(self.symmetry, R, self.params, self.options)
            return _eigvals_batch(m)[..., self.branch] - self.reference
        delta = _matrix_entries(self.symmetry, R, self.params, self.options, constant=False)
        if not all(np.all(np.isfinite(x)) for row in delta for x in row):
            raise FloatingPointError("case (c) matrix has non-finite entries")
        shift = delta[0][0] if d == 1 else self._shift_2x2(delta)
        return self._offset() + shift

    def evaluate_scalar(self, R: float) -> float:
        if not R > 0:
            raise ValueError("internuclear distance must be positive")
        d = self.symmetry.dimension
        if d == 3:
            m = np.array(_matrix_entries(self.symmetry, R, self.params, self.options), dtype=float)
            if not np.all(np.isfinite(m)):
                raise FloatingPointError("case (c) matrix has non-finite entries")
            return float(eigvalsh_3x3(m)[self.branch]) - self.reference
        delta = _matrix_entries(self.symmetry, R, self.params, self.options, constant=False)
        shift = delta[0][0] if d == 1 else self._shift_2x2(delta)
        val = self._offset() + float(shift)
        if not math.isfinite(val):
            raise FloatingPointError(f"non-finite curve value at R={R}")
        return val

    def min_gap(self, grid) -> float:
        m = build_case_c_matrix(self.symmetry, np.asarray(grid, dtype=float), self.params, self.options)
        ev = _eigvals_batch(m)
        if ev.shape[-1] == 1:
            return math.inf
        return float(np.min(np.diff(ev, axis=-1)))


def adiabatic_branch(
    label: SymmetryLabel | str,
    branch: int,
    params: CaseCParams,
    options: CurveOptions | None = None,
    reference: float | None = None,
    r_min: float = 1.0,
    r_max: float = math.inf,
) -> AdiabaticCurve:
    """Adiabatic curve of one branch.

    ``reference`` defaults to the ns + n'p3/2 limit (``E_p + A/2``) so that
    branches going to that limit dissociate at zero.
    """
    if isinstance(label, str):
        label = SymmetryLabel.parse(label)
    if not 0 <= branch < label.dimension:
        raise ValueError(f"{label} has {label.dimension} branch(es); got branch={branch}")
    if reference is None:
        reference = params.E_p + params.A / 2.0
    curve = AdiabaticCurve(label, branch, params, options or CurveOptions(), reference, r_min, r_max)
    curve(max(r_min, 1e-6) if math.isinf(r_max) else 0.5 * (r_min + r_max))  # fail fast on bad input
    return curve


@dataclass(frozen=True)
class ExpansionResult:
    tail: MultipoleTail
    residual_rms: float
    residual_max: float
    condition: float
    window: tuple

    def coefficient(self, power: int) -> float:
        return self.tail.coefficient(power)


def expand_branch(
    curve: PotentialCurve,
    powers: Sequence[int],
    window: tuple = (200.0, 2000.0),
    samples: int = 400,
    max_condition: float = 1e10,
    min_radius: float | None = None,
) -> ExpansionResult:
    """Least-squares ``sum C_k / R^k`` fit to ``V(R) - V(inf)`` over ``window``.

    Columns are scaled by ``window[0]**k`` before solving so the reported
    condition number measures the shape of the basis, not its units.

    Raises
    ------
    ValueError
        If powers are unsorted, the window is outside the curve's validity
        range or below ``min_radius`` (LeRoy radius), or the scaled design
        matrix is ill conditioned.
    """
    powers = [int(k) for k in powers]
    if powers != sorted(set(powers)):
        raise ValueError(f"powers must be ascending and distinct, got {powers}")
    lo, hi = float(window[0]), float(window[1])
    if not 0 < lo < hi:
        raise ValueError(f"bad fit window {window}")
    if lo < curve.r_min or hi > curve.r_max:
        raise ValueError(f"window {window} outside validity range [{curve.r_min}, {curve.r_max}]")
    if min_radius is not None and lo < min_radius:
        raise ValueError(f"window starts at {lo} bohr, inside the overlap region (< {min_radius} bohr)")
    R = np.geomspace(lo, hi, samples)
    y = curve.sample(R) - curve.dissociation
    X = np.stack([(lo / R) ** k for k in powers], axis=1)
    cond = float(np.linalg.cond(X))
    if cond > max_condition:
        raise ValueError(
            f"fit is ill conditioned (cond={cond:.3e} > {max_condition:.1e}); "
            "use fewer powers or widen the window"
        )
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    tail = MultipoleTail(curve.dissociation, tuple((k, c * lo**k) for k, c in zip(powers, coef)))
    return ExpansionResult(
        tail=tail,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        residual_max=float(np.max(np.abs(resid))),
        condition=cond,
        window=(lo, hi),
    )


def leroy_radius(r_a: float, r_b: float) -> float:
    """Distance beyond which exchange and overlap are negligible: ``2 (r_a + r_b)``."""
    if not (r_a > 0 and r_b > 0):
        raise ValueError("atomic radii must be positive")
    return 2.0 * (r_a + r_b)


def epsilon_from_lifetimes(tau_32: float, tau_12: float, E_32: float, E_12: float) -> float:
    """Relativistic deviation of the D1/D2 dipole ratio from ``1/sqrt(2)``.

    Uses ``(1 + eps)^2 = tau_32 E_32^3 / (tau_12 E_12^3)``; only ratios
    enter so any consistent time and energy units work.
    """
    if min(tau_32, tau_12, E_32, E_12) <= 0:
        raise ValueError("lifetimes and energies must be positive")
    ratio = tau_32 * E_32**3 / (tau_12 * E_12**3)
    if not ratio > 0 or not math.isfinite(ratio):
        raise ValueError(f"non-physical lifetime/energy ratio {ratio}")
    return math.sqrt(ratio) - 1.0


def lifetime_from_C3(C3_mag: float, omega: float) -> float:
    """Radiative lifetime ``3 c^3 / (4 |C3| omega^3)`` in atomic time units.

    ``omega`` is the transition angular frequency in hartree (hbar = 1).
    """
    if not (C3_mag > 0 and omega > 0):
        raise ValueError("C3 magnitude and omega must be positive")
    c = units.speed_of_light()
    return 3.0 * c**3 / (4.0 * C3_mag * omega**3)


def C3_from_reduced_dipole(d_32: float) -> float:
    """``C3 = |<ns1/2||d||np3/2>|^2 / 4`` with the matrix element in e*bohr."""
    return 0.25 * d_32**2


def case_e_transition_0g_minus() -> np.ndarray:
    """Orthogonal map from the 0g- case (a) basis to the fine-structure basis."""
    s3 = math.sqrt(3.0)
    return np.array([[1 / s3, math.sqrt(2.0 / 3.0)], [math.sqrt(2.0 / 3.0), -1 / s3]])


def case_e_matrix_0g_minus(R, params: CaseCParams, options: CurveOptions | None = None) -> np.ndarray:
    """0g- block rotated into the (np3/2, np1/2) fine-structure basis."""
    P = case_e_transition_0g_minus()
    m = build_case_c_matrix(SymmetryLabel(0, "g", "-"), R, params, options)
    return P @ m @ P.T


def iter_branches(labels: Iterable[SymmetryLabel] | None = None):
    """Yield ``(label, branch)`` for every curve; 16 for the full set."""
    for lab in labels or all_labels():
        for b in range(lab.dimension):
            yield lab, b
