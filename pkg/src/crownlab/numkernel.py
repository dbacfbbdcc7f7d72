"""Dense complex linear-algebra kernels for small matrices (n <= ~8).

All routines are pure, deterministic and dependency-light: leading principal
minors by a division-free subset recursion, symmetric (bilinear, not
hermitian) LDL^T without pivoting so the diagonal matches leading-minor
ratios exactly, hermitian eigenvalues by cyclic Jacobi sweeps, and matrix
exponentials along diagonalizable directions through the eigensystem.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NearSingularMinorError, SymmetryError


def as_square(a) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def _entry_scale(m: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def check_symmetric(s: np.ndarray, tol: float) -> None:
    gap = float(np.max(np.abs(s - s.T))) if s.size else 0.0
    if gap > tol * _entry_scale(s):
        raise SymmetryError("symmetric", gap)


def check_hermitian(s: np.ndarray, tol: float) -> None:
    gap = float(np.max(np.abs(s - s.conj().T))) if s.size else 0.0
    if gap > tol * _entry_scale(s):
        raise SymmetryError("hermitian", gap)


def check_real(s: np.ndarray, tol: float) -> None:
    gap = float(np.max(np.abs(s.imag))) if s.size else 0.0
    if gap > tol * _entry_scale(s):
        raise SymmetryError("real", gap)


def principal_minors(s, tol: Tolerances = DEFAULT_TOLERANCES) -> list[complex]:
    """All leading principal minors Delta_1, ..., Delta_n of a complex symmetric S.

    Division-free: D[mask] holds the determinant of the block formed by the
    first popcount(mask) rows and the column set encoded by mask; expanding
    along the last row fills every mask once, and Delta_k is read off at the
    contiguous mask (1 << k) - 1.  No pivoting, no divisions, deterministic.
    """
    S = as_square(s)
    check_symmetric(S, tol.symmetry)
    n = S.shape[0]
    dets = np.zeros(1 << n, dtype=complex)
    dets[0] = 1.0
    for mask in range(1, 1 << n):
        r = bin(mask).count("1") - 1
        sign = -1.0 if r % 2 else 1.0
        acc = 0.0 + 0.0j
        for j in range(n):
            bit = 1 << j
            if mask & bit:
                acc += sign * S[r, j] * dets[mask ^ bit]
                sign = -sign
        dets[mask] = acc
    return [complex(dets[(1 << k) - 1]) for k in range(1, n + 1)]


def sym_ldl(s, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Factor a complex symmetric S as N^T diag(D) N, N unit upper-triangular.

    Gaussian elimination without pivoting: pivoting is forbidden because the
    pivots must equal the leading-minor ratios Delta_k / Delta_{k-1} exactly.
    Raises NearSingularMinorError as soon as the running minor falls below
    the configured floor (relative to max(1, ||S||_F)).
    """
    S = as_square(s)
    check_symmetric(S, tol.symmetry)
    n = S.shape[0]
    work = S.copy()
    unit = np.eye(n, dtype=complex)
    diag = np.zeros(n, dtype=complex)
    floor = tol.minor_floor_rel * max(1.0, float(np.linalg.norm(S)))
    minor = 1.0 + 0.0j
    for k in range(n):
        d = work[k, k]
        minor = minor * d
        if abs(minor) < floor:
            raise NearSingularMinorError(index=k + 1, magnitude=abs(minor), floor=floor)
        diag[k] = d
        if k + 1 < n:
            row = work[k, k + 1 :] / d
            unit[k, k + 1 :] = row
            work[k + 1 :, k + 1 :] -= d * np.outer(row, row)
    return unit, diag


def _hermitian_eigensystem(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a hermitian matrix: eigenvalues ascending, unitary V.

    Satisfies x = V diag(w) V^H.  Each rotation phases the (p, q) entry real
    and applies the classical angle choice; off-diagonal mass converges
    quadratically, so a handful of sweeps suffices at these sizes.
    """
    a = np.array(x, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.ravel().copy(), v
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    skip = 1e-18 * scale
    for _ in range(60):
        off = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if off <= 3e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                phi = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - sn * np.conj(phi) * cq
                a[:, q] = sn * cp + c * np.conj(phi) * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * phi * rq
                a[q, :] = sn * rp + c * phi * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - sn * np.conj(phi) * vq
                v[:, q] = sn * vp + c * np.conj(phi) * vq
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def sym_eig(x, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Eigenvalues of a real symmetric or hermitian matrix, ascending."""
    X = as_square(x)
    check_hermitian(X, tol.symmetry)
    w, _ = _hermitian_eigensystem(0.5 * (X + X.conj().T))
    return w


def hermitian_eigensystem(x, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a hermitian x."""
    X = as_square(x)
    check_hermitian(X, tol.symmetry)
    return _hermitian_eigensystem(0.5 * (X + X.conj().T))


def group_exp(x, z: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """exp(z*x) for real symmetric x via the eigensystem x = Q diag(w) Q^T."""
    X = as_square(x)
    check_real(X, tol.symmetry)
    check_symmetric(X, tol.symmetry)
    w, q = _hermitian_eigensystem(0.5 * (X.real + X.real.T).astype(complex))
    return (q * np.exp(complex(z) * w)) @ q.conj().T


def singular_values(g, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Singular values of g, descending: square roots of eig(g^H g)."""
    G = as_square(g)
    w, _ = _hermitian_eigensystem(G.conj().T @ G)
    return np.sqrt(np.clip(w, 0.0, None))[::-1].copy()


def inv_unit_upper(u: np.ndarray) -> np.ndarray:
    """Inverse of a unit upper-triangular matrix by back substitution."""
    n = u.shape[0]
    inv = np.eye(n, dtype=complex)
    for j in range(n):
        for i in range(j - 1, -1, -1):
            inv[i, j] = -np.dot(u[i, i + 1 : j + 1], inv[i + 1 : j + 1, j])
    return inv
