"""Structure data for sl(n,R): the crown radius rho, crown membership,
boundary normalization, Haar sampling on SO(n) and the maximal scale
function on matrix groups.

Conventions: the Cartan subspace a is the traceless diagonal matrices, the
restricted roots are eps_i - eps_j on a-coordinates, and the K-invariant
norm on p is rho(x) = lambda_max(x) - lambda_min(x), the spectral radius of
ad(x) for symmetric x.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import SingularInputError
from .numkernel import as_square, check_real, check_symmetric, singular_values, sym_eig

WEYL_ENUMERATION_LIMIT = 5


@dataclass(frozen=True)
class LieStructure:
    """Restricted root data of sl(n,R).

    restricted_roots are the n(n-1) vectors eps_i - eps_j (i != j) acting on
    diagonal a-coordinates.  The Weyl group is the symmetric group realized
    as coordinate permutations; it is enumerated only for n <= 5 and left
    None beyond that (callers sample permutations instead).
    """

    n: int
    restricted_roots: list[np.ndarray] = field(repr=False)
    weyl_group: list[tuple[int, ...]] | None = field(repr=False)


def lie_structure(n: int) -> LieStructure:
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    roots = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = np.zeros(n)
                v[i] = 1.0
                v[j] = -1.0
                roots.append(v)
    weyl = None
    if n <= WEYL_ENUMERATION_LIMIT:
        weyl = [tuple(p) for p in itertools.permutations(range(n))]
    return LieStructure(n=n, restricted_roots=roots, weyl_group=weyl)


class PElement:
    """A point of p: real symmetric traceless matrix with cached eigenvalues."""

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOLERANCES):
        m = as_square(matrix)
        check_real(m, tol.symmetry)
        check_symmetric(m, tol.symmetry)
        m = 0.5 * (m.real + m.real.T)
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        tr = float(np.trace(m))
        if abs(tr) > tol.symmetry * scale * m.shape[0]:
            raise ValueError(f"matrix is not traceless: trace={tr:.3e}")
        self.matrix = m
        self.matrix.flags.writeable = False
        self.eigenvalues = sym_eig(m, tol)
        self.n = m.shape[0]

    def __repr__(self) -> str:  # pragma: no cover
        return f"PElement(n={self.n}, rho={rho(self):.6g})"


def rho(x: PElement) -> float:
    """Spectral radius of ad(x) for symmetric x: the eigenvalue spread.

    ad-eigenvalues of a symmetric matrix are the differences lambda_i -
    lambda_j, so r_spec(ad(x)) = lambda_max - lambda_min.
    """
    w = x.eigenvalues
    return float(w[-1] - w[0])


def crown_contains(x: PElement, margin: float = 0.0) -> bool:
    """Whether x lies in the crown parameter set, i.e. rho(x) < pi/2 - margin."""
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    return rho(x) < 0.5 * np.pi - margin


def boundary_direction(x_raw: PElement) -> PElement:
    """Rescale a nonzero direction onto the crown boundary rho = pi/2."""
    r = rho(x_raw)
    if r == 0.0:
        raise ValueError("cannot normalize the zero direction onto the boundary")
    return PElement((0.5 * np.pi / r) * x_raw.matrix)


def haar_so(n: int, seed) -> np.ndarray:
    """Haar-distributed element of SO(n), deterministic under the seed.

    Gaussian matrix, QR, sign convention making diag(R) positive (which
    makes the distribution exactly Haar on O(n)), then determinant fixed to
    +1 by flipping the last column.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    signs = np.sign(np.diagonal(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    if np.linalg.det(q) < 0.0:
        q[:, -1] = -q[:, -1]
    return q


def s_max(g, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Maximal scale of g in GL(n,C): the extreme singular-value ratio.

    For the Cartan decomposition g = u exp(iX) (u unitary, X hermitian) the
    spread of the eigenvalues of the positive polar log is
    log(sigma_max/sigma_min), so this ratio equals e^{rho(iX)} with the
    rho-norm; diagonal cases pin the identification (see tests).
    """
    sv = singular_values(g, tol)
    if sv[0] == 0.0 or sv[-1] <= tol.sv_floor_rel * sv[0]:
        raise SingularInputError(
            f"matrix is singular within tolerance (sigma_min={sv[-1]:.3e})"
        )
    return float(sv[0] / sv[-1])


def random_sl(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random element of SL(n,R): Gaussian matrix normalized to det +1."""
    while True:
        m = rng.standard_normal((n, n))
        d = np.linalg.det(m)
        if abs(d) > 1e-8:
            break
    if d < 0.0:
        m[:, 0] = -m[:, 0]
        d = -d
    return m / d ** (1.0 / n)


def random_p_element(n: int, rng: np.random.Generator) -> PElement:
    """Random symmetric traceless direction (Gaussian ensemble)."""
    a = rng.standard_normal((n, n))
    s = 0.5 * (a + a.T)
    s -= np.trace(s) / n * np.eye(n)
    return PElement(s)
