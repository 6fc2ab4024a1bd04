"""Unit system and physical constants.

Everything inside the package is computed in atomic units (hartree, bohr,
electron mass, hbar = 1).  Spectroscopic units only appear at the I/O edges.
Constants come from ``data/constants.ini`` so there is exactly one table.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

__all__ = [
    "Quantity",
    "SpeciesMasses",
    "constant",
    "convert_energy",
    "energy_to_hartree",
    "hartree_to",
    "load_table",
    "reduced_mass",
    "speed_of_light",
    "to_atomic",
    "table_version",
]

# semantic aliases, values always in atomic units
Energy = float
Length = float
Mass = float


@dataclass(frozen=True)
class Quantity:
    """One entry of a structured data file."""

    value: float
    unit: str
    source: str = ""


def load_table(path: str | Path) -> dict[str, Quantity]:
    """Read a ``key -> (value, unit, source)`` file.

    Each section holds one symbol.  A section without ``value`` (such as
    ``[species]`` or ``[table]``) is skipped.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case sensitive (C6_sigma vs c6_sigma)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    table = {}
    for name in parser.sections():
        sec = parser[name]
        if "value" not in sec:
            continue
        table[name] = Quantity(float(sec["value"]), sec.get("unit", "1").strip(), sec.get("source", "").strip())
    return table


@lru_cache(maxsize=None)
def _constants() -> dict[str, Quantity]:
    ref = resources.files("ndekit") / "data" / "constants.ini"
    with resources.as_file(ref) as path:
        return load_table(path)


def table_version() -> str:
    parser = configparser.ConfigParser(interpolation=None)
    ref = resources.files("ndekit") / "data" / "constants.ini"
    parser.read_string(ref.read_text(encoding="utf-8"))
    return parser["table"]["version"]


def constant(name: str) -> float:
    try:
        return _constants()[name].value
    except KeyError:
        raise KeyError(f"unknown constant {name!r}; known: {sorted(_constants())}") from None


def speed_of_light() -> float:
    """c in atomic units (bohr per atomic time unit)."""
    return constant("inverse_fine_structure")


def _energy_factors() -> dict[str, float]:
    # value in unit X = hartree * factor[X]
    return {
        "hartree": 1.0,
        "cm-1": constant("hartree_wavenumber"),
        "MHz": constant("hartree_frequency") * 1e-6,
        "GHz": constant("hartree_frequency") * 1e-9,
        "K": constant("hartree_kelvin"),
    }


_ENERGY_ALIASES = {
    "hartree": "hartree",
    "Eh": "hartree",
    "au": "hartree",
    "cm-1": "cm-1",
    "cm^-1": "cm-1",
    "wavenumber": "cm-1",
    "MHz": "MHz",
    "GHz": "GHz",
    "K": "K",
    "kelvin": "K",
}


def _energy_unit(unit: str) -> str:
    try:
        return _ENERGY_ALIASES[unit.strip()]
    except KeyError:
        raise ValueError(f"unknown energy unit {unit!r}; supported: {sorted(set(_ENERGY_ALIASES))}") from None


def convert_energy(value, from_unit: str, to_unit: str):
    """Linear energy conversion between hartree, cm-1, MHz, GHz and kelvin (k_B T)."""
    f = _energy_factors()
    return value * (f[_energy_unit(to_unit)] / f[_energy_unit(from_unit)])


def energy_to_hartree(value, unit: str):
    return convert_energy(value, unit, "hartree")


def hartree_to(value, unit: str):
    return convert_energy(value, "hartree", unit)


def to_atomic(value: float, unit: str) -> float:
    """Convert a data-file quantity to atomic units.

    Handles energies, ``hartree*bohr^k`` coefficients, masses in u, lengths,
    times and dimensionless entries.
    """
    u = unit.strip()
    if u in ("1", "", "e*bohr") or u.startswith("hartree*bohr^"):
        return value
    if u in _ENERGY_ALIASES:
        return energy_to_hartree(value, u)
    if u == "u":
        return value / constant("electron_mass_u")
    if u == "me":
        return value
    if u == "bohr":
        return value
    if u == "angstrom":
        return value * 1e-10 / constant("bohr_radius")
    if u == "m":
        return value / constant("bohr_radius")
    if u == "s":
        return value / constant("atomic_time")
    if u == "ns":
        return value * 1e-9 / constant("atomic_time")
    raise ValueError(f"cannot convert unit {unit!r} to atomic units")


def reduced_mass(mass_a: Mass, mass_b: Mass) -> Mass:
    """mu = m_a m_b / (m_a + m_b); symmetric in its arguments."""
    if not (mass_a > 0 and mass_b > 0):
        raise ValueError(f"masses must be positive, got {mass_a!r}, {mass_b!r}")
    if math.isinf(mass_a):
        return float(mass_b)
    if math.isinf(mass_b):
        return float(mass_a)
    # written as a product of the two with a symmetric denominator so that
    # swapping arguments is bit-identical
    return (mass_a * mass_b) / (mass_a + mass_b)


@dataclass(frozen=True)
class SpeciesMasses:
    atom_a_mass: Mass
    atom_b_mass: Mass

    @property
    def reduced_mass(self) -> Mass:
        return reduced_mass(self.atom_a_mass, self.atom_b_mass)

    @classmethod
    def homonuclear(cls, mass: Mass) -> "SpeciesMasses":
        return cls(mass, mass)
