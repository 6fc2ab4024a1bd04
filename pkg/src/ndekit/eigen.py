"""Closed-form eigenvalues of small real symmetric matrices.

Dimensions 1 to 3 only.  No iterative solver is involved, so the results are
bit-reproducible.  The 3x3 path uses the trigonometric (Cardano) solution
to isolate one well separated eigenvalue, then deflates to a 2x2 problem;
plain trig loses about 1e-14 absolute accuracy on nearly degenerate pairs,
which matters when fitting 1/R^3 tails at R ~ 1000 bohr.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["eigvalsh_small", "eigvalsh_2x2", "eigvalsh_3x3"]


def eigvalsh_2x2(a: float, b: float, off: float) -> tuple[float, float]:
    """Eigenvalues of [[a, off], [off, b]] in ascending order."""
    mid = 0.5 * (a + b)
    half = math.hypot(0.5 * (a - b), off)
    return mid - half, mid + half


def _trig_3x3(m: np.ndarray) -> np.ndarray:
    a11, a22, a33 = m[0, 0], m[1, 1], m[2, 2]
    p1 = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
    q = (a11 + a22 + a33) / 3.0
    p2 = (a11 - q) ** 2 + (a22 - q) ** 2 + (a33 - q) ** 2 + 2.0 * p1
    if p2 == 0.0:
        return np.array([q, q, q])
    p = math.sqrt(p2 / 6.0)
    b = (m - q * np.eye(3)) / p
    det_b = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )
    r = min(1.0, max(-1.0, 0.5 * det_b))
    phi = math.acos(r) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.array([lo, 3.0 * q - hi - lo, hi])


def eigvalsh_3x3(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric 3x3 matrix.

    Parameters
    ----------
    m : ndarray, shape (3, 3)
        Symmetric input; only its values are read, it is not modified.
    """
    m = np.asarray(m, dtype=float)
    est = _trig_3x3(m)
    gaps = [min(abs(est[i] - est[j]) for j in range(3) if j != i) for i in range(3)]
    i = int(np.argmax(gaps))
    lam = est[i]
    shifted = m - lam * np.eye(3)
    crosses = [np.cross(shifted[0], shifted[1]), np.cross(shifted[0], shifted[2]), np.cross(shifted[1], shifted[2])]
    vec = max(crosses, key=lambda c: float(c @ c))
    norm2 = float(vec @ vec)
    if norm2 == 0.0:
        # lam is (numerically) triple; trig answer is already exact enough
        return np.sort(est)
    vec = vec / math.sqrt(norm2)
    trial = np.array([1.0, 0.0, 0.0]) if abs(vec[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(vec, trial)
    u /= math.sqrt(float(u @ u))
    w = np.cross(vec, u)
    # refine the isolated value with a Rayleigh quotient, then solve the complement
    lam = float(vec @ m @ vec)
    lo, hi = eigvalsh_2x2(float(u @ m @ u), float(w @ m @ w), float(u @ m @ w))
    return np.sort(np.array([lam, lo, hi]))


def eigvalsh_small(m) -> np.ndarray:
    """Ascending eigenvalues for a symmetric matrix of size 1, 2 or 3."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("matrix has non-finite entries")
    size = m.shape[0]
    if size == 1:
        return m[0].copy()
    if size == 2:
        return np.array(eigvalsh_2x2(m[0, 0], m[1, 1], 0.5 * (m[0, 1] + m[1, 0])))
    if size == 3:
        return eigvalsh_3x3(0.5 * (m + m.T))
    raise ValueError(f"only sizes 1-3 are supported, got {size}")
