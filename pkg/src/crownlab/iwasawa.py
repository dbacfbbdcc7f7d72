"""Real KAN decomposition of SL(n,R), the complexified-Iwasawa domain test,
and branch-tracked holomorphic continuation of (kappa, H, eta) along crown
paths t -> exp(-i t x) k.

The factorization convention is g = kappa * exp(H) * eta with kappa complex
orthogonal (kappa^T kappa = 1), exp(H) diagonal and eta unit
upper-triangular, obtained by applying the pivot-free symmetric LDL to
g^T g (bilinear transpose, never conjugate).  Branches are fixed by
continuity from the real group: H(0) = 0 on paths starting at k in SO(n),
and each leading minor's argument is continued by nearest-argument steps
guarded by a maximum jump per step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import BranchAmbiguityError, DomainExitError
from .liegroup import PElement
from .numkernel import (
    as_square,
    check_real,
    hermitian_eigensystem,
    inv_unit_upper,
    principal_minors,
    sym_ldl,
)

MAGNITUDE_DROP_GUARD = 10.0


@dataclass
class IwasawaFactors:
    """The triple (kappa, H, eta) with continuation metadata.

    kappa is in K_C (complex orthogonal), H in a_C as a coordinate vector
    (so alpha = exp(H) entrywise), eta unit upper-triangular.  ``t`` is the
    path parameter the factors were continued to, ``steps_used`` the number
    of path points evaluated, and ``min_minor_magnitude`` the smallest
    leading-minor magnitude seen along the way.
    """

    kappa: np.ndarray
    H: np.ndarray
    eta: np.ndarray
    t: float
    steps_used: int
    min_minor_magnitude: float

    @property
    def alpha(self) -> np.ndarray:
        return np.exp(self.H)

    def reconstruct(self) -> np.ndarray:
        return (self.kappa * self.alpha) @ self.eta


@dataclass(frozen=True)
class PathConfig:
    """Continuation controls.

    max_arg_jump must stay below pi/2: a jump of pi in a minor's argument is
    exactly the sign ambiguity of its square root, which the guard exists to
    exclude.  minor_floor is relative to max(1, ||g^T g||_F).
    """

    initial_steps: int = 32
    max_refinement_depth: int = 40
    max_arg_jump: float = float(np.pi / 4)
    minor_floor: float = 1e-13

    def __post_init__(self):
        if self.initial_steps < 1:
            raise ValueError("initial_steps must be >= 1")
        if self.max_refinement_depth < 0:
            raise ValueError("max_refinement_depth must be >= 0")
        if not 0.0 < self.max_arg_jump < 0.5 * np.pi:
            raise ValueError("max_arg_jump must lie in (0, pi/2)")
        if self.minor_floor <= 0.0:
            raise ValueError("minor_floor must be positive")


DEFAULT_PATH_CONFIG = PathConfig()


def leading_minors_batch(s: np.ndarray) -> np.ndarray:
    """Leading principal minors of a stack of matrices (..., n, n) -> (..., n).

    Batched LAPACK determinants; the single-matrix reference route is
    numkernel.principal_minors and the two agree to roundoff (tested).
    """
    n = s.shape[-1]
    cols = [np.linalg.det(s[..., :k, :k]) for k in range(1, n + 1)]
    return np.stack(cols, axis=-1)


def decompose_real(g, tol: Tolerances = DEFAULT_TOLERANCES) -> IwasawaFactors:
    """KAN factors of a real g in SL(n,R): kappa orthogonal, H real, eta real.

    Always exists: g^T g is positive definite, so the pivot-free LDL cannot
    encounter a small minor for well-conditioned input.
    """
    G = as_square(g)
    check_real(G, tol.symmetry)
    G = G.real.astype(float)
    det = float(np.linalg.det(G))
    if abs(det - 1.0) > tol.determinant:
        raise ValueError(f"input is not in SL(n,R): det={det!r}")
    s = G.T @ G
    unit, diag = sym_ldl(s, tol)
    d = diag.real
    H = 0.5 * np.log(d)
    alpha = np.sqrt(d)
    eta = unit.real
    kappa = (G @ inv_unit_upper(unit.astype(complex)).real) / alpha[np.newaxis, :]
    minors = np.cumprod(d)
    return IwasawaFactors(
        kappa=kappa,
        H=H.astype(complex),
        eta=eta.astype(complex),
        t=0.0,
        steps_used=0,
        min_minor_magnitude=float(np.min(np.abs(minors))),
    )


def domain_test(g, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[bool, float]:
    """Whether g lies in K_C A_C N_C, plus the smallest minor magnitude.

    The domain is cut out by Delta_k(g^T g) != 0 for all k (bilinear
    transpose); numerically "!= 0" means above minor_floor_rel relative to
    max(1, ||g^T g||_F).
    """
    G = as_square(g)
    s = G.T @ G
    minors = principal_minors(s, tol)
    smallest = float(min(abs(m) for m in minors))
    floor = tol.minor_floor_rel * max(1.0, float(np.linalg.norm(s)))
    return smallest > floor, smallest


class _CrownPath:
    """Evaluator for tau -> exp(-i * tau * z * x) * k on tau in [0, 1]."""

    def __init__(self, x: PElement, k: np.ndarray, z: complex):
        w, q = hermitian_eigensystem(x.matrix)
        self.w = w
        self.q = q
        self.k = k.astype(complex)
        self.z = complex(z)
        self.n = x.n

    def group_points(self, taus: np.ndarray) -> np.ndarray:
        phases = np.exp((-1j * self.z) * np.outer(taus, self.w))
        # exp(-i tau z x) = Q diag(phases) Q^T, then right-multiply by k
        e = np.einsum("ij,tj,kj->tik", self.q, phases, self.q)
        return e @ self.k

    def minors_at(self, taus: np.ndarray) -> np.ndarray:
        g = self.group_points(np.atleast_1d(taus))
        s = np.einsum("tji,tjk->tik", g, g)
        return leading_minors_batch(s)


def _check_k_matrix(k, tol: Tolerances) -> np.ndarray:
    K = as_square(k)
    check_real(K, tol.symmetry)
    K = K.real
    gap = float(np.max(np.abs(K.T @ K - np.eye(K.shape[0]))))
    if gap > 1e-8:
        raise ValueError(f"k is not orthogonal: ||k^T k - 1|| = {gap:.3e}")
    if np.linalg.det(K) < 0.0:
        raise ValueError("k must lie in SO(n) (det +1)")
    return K


def _continued_path(
    x: PElement, k: np.ndarray, z_target: complex, cfg: PathConfig
) -> tuple[list[float], np.ndarray, _CrownPath, float]:
    """Refined path 0 = tau_0 < ... < tau_m = 1 with minors at every point.

    Refinement bisects any interval where some minor's argument jumps more
    than max_arg_jump or its magnitude drops more than 10x; only a
    persisting argument jump at max depth is fatal.  Returns the tau grid,
    the (m+1, n) minor array, the path evaluator and the scaled floor.
    """
    path = _CrownPath(x, k, z_target)
    taus = list(np.linspace(0.0, 1.0, cfg.initial_steps + 1))
    minors = list(path.minors_at(np.asarray(taus)))
    s_scale = max(1.0, float(np.exp(2.0 * abs(z_target) * max(abs(x.eigenvalues[0]), abs(x.eigenvalues[-1])))))
    floor = cfg.minor_floor * s_scale

    def t_of(tau: float) -> float:
        return tau * abs(z_target)

    # locate the first floor violation, tightening by bisection for reporting
    def raise_exit(i_good: int, tau_bad: float, m_bad: np.ndarray):
        lo = taus[i_good]
        hi, m_hi = tau_bad, m_bad
        for _ in range(12):
            mid = 0.5 * (lo + hi)
            m_mid = path.minors_at(np.array([mid]))[0]
            if np.min(np.abs(m_mid)) > floor:
                lo = mid
            else:
                hi, m_hi = mid, m_mid
        idx = int(np.argmin(np.abs(m_hi)))
        raise DomainExitError(
            last_good_t=t_of(lo),
            t_fail=t_of(hi),
            minor_index=idx + 1,
            magnitude=float(np.abs(m_hi)[idx]),
        )

    def violation(m0: np.ndarray, m1: np.ndarray) -> tuple[bool, bool, int, float]:
        ratio = m1 / m0
        jumps = np.abs(np.angle(ratio))
        drops = np.abs(m1) * MAGNITUDE_DROP_GUARD < np.abs(m0)
        idx = int(np.argmax(jumps))
        return bool(np.any(jumps > cfg.max_arg_jump)), bool(np.any(drops)), idx, float(jumps[idx])

    i = 0
    while i + 1 < len(taus):
        m0, m1 = minors[i], minors[i + 1]
        if np.min(np.abs(m1)) <= floor:
            raise_exit(i, taus[i + 1], m1)
        arg_bad, drop_bad, idx, jump = violation(m0, m1)
        if not (arg_bad or drop_bad):
            i += 1
            continue
        depth = 0
        # bisect this interval until both guards clear or depth runs out
        while depth < cfg.max_refinement_depth:
            mid = 0.5 * (taus[i] + taus[i + 1])
            if mid == taus[i] or mid == taus[i + 1]:
                break
            m_mid = path.minors_at(np.array([mid]))[0]
            if np.min(np.abs(m_mid)) <= floor:
                raise_exit(i, mid, m_mid)
            taus.insert(i + 1, mid)
            minors.insert(i + 1, m_mid)
            depth += 1
            arg_bad, drop_bad, idx, jump = violation(minors[i], minors[i + 1])
            if not (arg_bad or drop_bad):
                break
        arg_bad, drop_bad, idx, jump = violation(minors[i], minors[i + 1])
        if arg_bad:
            raise BranchAmbiguityError(
                t_lo=t_of(taus[i]), t_hi=t_of(taus[i + 1]), minor_index=idx + 1, arg_jump=jump
            )
        i += 1

    return taus, np.asarray(minors), path, floor


def _factors_from_path(
    taus: list[float],
    minors: np.ndarray,
    path: _CrownPath,
    t_label: float,
    tol: Tolerances,
) -> IwasawaFactors:
    n = path.n
    # continued logs of the minors: real part from the endpoint modulus,
    # argument accumulated by nearest-argument increments from Delta_k(0) = 1
    ratios = minors[1:] / minors[:-1]
    args = np.sum(np.angle(ratios), axis=0) + np.angle(minors[0])
    logs = np.log(np.abs(minors[-1])) + 1j * args
    prev = np.concatenate(([0.0 + 0.0j], logs[:-1]))
    H = 0.5 * (logs - prev)

    g_end = path.group_points(np.array([1.0]))[0]
    s_end = g_end.T @ g_end
    unit, _ = sym_ldl(s_end, tol)
    alpha = np.exp(H)
    kappa = (g_end @ inv_unit_upper(unit)) / alpha[np.newaxis, :]
    return IwasawaFactors(
        kappa=kappa,
        H=H,
        eta=unit,
        t=t_label,
        steps_used=len(taus),
        min_minor_magnitude=float(np.min(np.abs(minors))),
    )


def continue_factors(
    x: PElement,
    k,
    z_target: complex,
    cfg: PathConfig = DEFAULT_PATH_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> IwasawaFactors:
    """Branch-continued factors of exp(-i z x) k along the segment 0 -> z.

    General-z driver behind decompose_path; also used by the holomorphy
    probes, which perturb the path parameter off the real axis.
    """
    K = _check_k_matrix(k, tol)
    if z_target == 0:
        return IwasawaFactors(
            kappa=K.astype(complex),
            H=np.zeros(x.n, dtype=complex),
            eta=np.eye(x.n, dtype=complex),
            t=0.0,
            steps_used=1,
            min_minor_magnitude=1.0,
        )
    taus, minors, path, _ = _continued_path(x, K, z_target, cfg)
    label = z_target.real if z_target.imag == 0.0 else abs(z_target)
    return _factors_from_path(taus, minors, path, label, tol)


def decompose_path(
    x: PElement,
    k,
    t_target: float,
    cfg: PathConfig = DEFAULT_PATH_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> IwasawaFactors:
    """Holomorphically continued Iwasawa factors of exp(-i t x) k.

    H(t) is the continuous branch with H(0) = 0 (the real Iwasawa value of
    k in K); raises DomainExitError when a leading minor falls below the
    floor before t_target, and BranchAmbiguityError if refinement cannot
    bring a minor's argument step below the jump guard.
    """
    if t_target < 0.0:
        raise ValueError(f"t_target must be >= 0, got {t_target}")
    factors = continue_factors(x, k, complex(t_target), cfg, tol)
    factors.t = float(t_target)
    return factors


def check_H_range(
    factors: IwasawaFactors,
    x: PElement,
    t: float,
    tol: float = 1e-8,
) -> tuple[bool, float]:
    """Test Im H against the convex hull of Weyl-permuted copies of t*diag(x).

    x must be a diagonal a-representative (conjugate into a first; left
    K-multiplication does not change H).  The boundary-value containment is
    stated for the N*A*K-order component map, which is minus the KAN-order H
    of the inverse path point; in this KAN convention the hull is therefore
    the one spanned by permutations of -t*diag(x) (for n = 2 the two hulls
    coincide).  Membership in the permutation hull is Rado's majorization
    criterion: equal totals plus dominated partial sums of the decreasingly
    sorted vectors.  The returned violation is the largest partial-sum
    excess folded with the total-sum residual: <= 0 within rounding inside
    the hull, positive outside.
    """
    off = x.matrix - np.diag(np.diagonal(x.matrix))
    if float(np.max(np.abs(off))) > 1e-12 * max(1.0, float(np.max(np.abs(x.matrix)))):
        raise ValueError("x must be diagonal (conjugate into a first)")
    target = np.sort(-t * np.diagonal(x.matrix))[::-1]
    point = np.sort(np.imag(factors.H))[::-1]
    excess = np.cumsum(point)[:-1] - np.cumsum(target)[:-1]
    total = abs(float(np.sum(point) - np.sum(target)))
    violation = max(float(np.max(excess)) if excess.size else 0.0, total)
    return violation <= tol, violation
