"""Relaxation superoperator blocks per coherence order and their eigensystems.

The generator acts on density-matrix elements rho_{q+n, n} (coherence order
q >= 0, basis |q+n><n| ordered by n) as

    d rho / dt = C * J(q) * rho_vec,

where J(q) is the (8-q)-dimensional block assembled from the double
commutator -sum_p (-1)^p J_p [Q_p, [Q_{-p}, . ]] and rescaled by a single
global constant kappa, calibrated once so that the q = 7 block equals
-21 J1 - 7 J2 exactly.  Relaxation rates are R_p = -C * lambda_p.

A mode decomposition is stored as (w, w_bar) with J(q) = w_bar diag(lambda) w
and w w_bar = identity: the columns of w_bar are right eigenvectors, so that
element trajectories follow  rho(t) = w_bar exp(lambda C t) w rho(0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._tables import load_reference_tables
from .phys_params import QuadrupolarConstant, SpectralDensities
from .spin_algebra import QuadrupoleSet, SpinSystem, make_quadrupole_operators

#: relative threshold below which an eigenvalue is treated as the exact zero mode
_ZERO_MODE_RTOL = 1e-12


class DegenerateSpectrumError(ValueError):
    """Closed-form construction hit a (near-)degenerate denominator; use numeric_eigensystem."""


@dataclass(frozen=True)
class CoherenceBlock:
    """Evaluated relaxation matrix for one coherence order (dimension 8 - q)."""

    q: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BlockEigensystem:
    """Mode decomposition of a coherence block.

    eigenvalues are the dimensionless-in-C lambda_p (units of seconds, being
    linear in the spectral densities); rates = -C lambda_p in Hz when a
    quadrupolar constant was supplied, else -lambda_p.  Modes are ordered by
    ascending rate; numeric construction fixes each w_bar column's sign so its
    first component of significant magnitude is positive, analytic
    construction keeps the published closed-form signs.
    """

    q: int
    eigenvalues: np.ndarray
    w: np.ndarray
    w_bar: np.ndarray
    rates: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


@lru_cache(maxsize=None)
def _canonical_quads(two_i: int) -> QuadrupoleSet:
    return make_quadrupole_operators(SpinSystem(two_i))


def _double_commutator_block(q: int, quads: QuadrupoleSet, j: SpectralDensities) -> np.ndarray:
    d = quads.q_zero.shape[0]
    if not 0 <= q <= d - 1:
        raise ValueError(f"coherence order q={q} outside 0..{d - 1}")
    jp = {0: j.j0, 1: j.j1, 2: j.j2}
    n_dim = d - q
    out = np.zeros((n_dim, n_dim))
    for n in range(n_dim):
        basis = np.zeros((d, d), dtype=complex)
        basis[q + n, n] = 1.0
        acc = np.zeros((d, d), dtype=complex)
        for p in (-2, -1, 0, 1, 2):
            inner = quads[-p] @ basis - basis @ quads[-p]
            acc -= (-1) ** p * jp[abs(p)] * (quads[p] @ inner - inner @ quads[p])
        out[:, n] = [acc[q + n2, n2].real for n2 in range(n_dim)]
    return out


@lru_cache(maxsize=None)
def _normalization(two_i: int) -> float:
    """Global kappa fixing block(q=7) = -21 J1 - 7 J2 for spin 7/2."""
    quads = _canonical_quads(two_i)
    top = two_i  # highest coherence order, scalar block
    c1 = _double_commutator_block(top, quads, SpectralDensities(1e-30, 1.0, 1e-30))[0, 0]
    c2 = _double_commutator_block(top, quads, SpectralDensities(1e-30, 1e-30, 1.0))[0, 0]
    kappa = -21.0 / c1
    if abs(kappa * c2 + 7.0) > 1e-10:
        raise RuntimeError(f"normalization is inconsistent between J1 and J2: {kappa * c2}")
    return kappa


def assemble_block(q: int, quads: QuadrupoleSet, j: SpectralDensities) -> CoherenceBlock:
    """Assemble the order-q relaxation block at the given spectral densities."""
    kappa = _normalization(quads.q_zero.shape[0] - 1)
    return CoherenceBlock(q=q, matrix=kappa * _double_commutator_block(q, quads, j))


@lru_cache(maxsize=None)
def coefficient_matrices(q: int, two_i: int = 7) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-density coefficient matrices (A0, A1, A2) with block = sum_k J_k A_k.

    Useful wherever blocks are re-evaluated many times (fitting); the matrices
    are exact and cached.
    """
    quads = _canonical_quads(two_i)
    kappa = _normalization(two_i)
    eps = 1e-30
    picks = (SpectralDensities(1.0, eps, eps), SpectralDensities(eps, 1.0, eps),
             SpectralDensities(eps, eps, 1.0))
    mats = []
    for pick in picks:
        m = kappa * _double_commutator_block(q, quads, pick)
        m[np.abs(m) < 1e-9] = 0.0
        mats.append(m)
    return tuple(mats)


def evaluate_block(q: int, weights: tuple[float, float, float], two_i: int = 7) -> np.ndarray:
    """block-shaped matrix sum_k weights[k] * A_k; weights may be J's or B's."""
    a0, a1, a2 = coefficient_matrices(q, two_i)
    return weights[0] * a0 + weights[1] * a1 + weights[2] * a2


def liouville_superoperator(quads: QuadrupoleSet, j: SpectralDensities) -> np.ndarray:
    """Full d^2 x d^2 action on vectorized density matrices (basis |a><b|, index a*d+b).

    Intended for structural checks; the per-order blocks are what production
    paths use.
    """
    d = quads.q_zero.shape[0]
    kappa = _normalization(d - 1)
    jp = {0: j.j0, 1: j.j1, 2: j.j2}
    out = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            basis = np.zeros((d, d), dtype=complex)
            basis[a, b] = 1.0
            acc = np.zeros((d, d), dtype=complex)
            for p in (-2, -1, 0, 1, 2):
                inner = quads[-p] @ basis - basis @ quads[-p]
                acc -= (-1) ** p * jp[abs(p)] * (quads[p] @ inner - inner @ quads[p])
            out[:, a * d + b] = kappa * acc.real.reshape(-1)
    return out


def _fix_column_signs(w_bar: np.ndarray) -> np.ndarray:
    out = w_bar.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        lead = np.flatnonzero(np.abs(col) > 1e-8 * np.max(np.abs(col)))
        if lead.size and col[lead[0]] < 0:
            out[:, k] = -col
    return out


def _rates_from_eigenvalues(lam: np.ndarray, c: QuadrupolarConstant | None) -> np.ndarray:
    scale = c.c if c is not None else 1.0
    rates = -scale * lam
    near_zero = np.abs(lam) < _ZERO_MODE_RTOL * np.max(np.abs(lam))
    rates[near_zero] = 0.0
    return rates


def numeric_eigensystem(block: CoherenceBlock,
                        c: QuadrupolarConstant | None = None) -> BlockEigensystem:
    """Eigendecomposition of a block with the canonical ordering and signs.

    Ordering is by descending eigenvalue (ascending rate); degenerate pairs are
    ordered lexicographically by their sign-fixed eigenvectors.  Symmetric
    blocks (every assembled block is symmetric) use the symmetric solver;
    general real matrices fall back to np.linalg.eig and must be
    diagonalizable within conditioning tolerance.  Without a quadrupolar
    constant the rates are -lambda (the C = 1 convention, handy when the block
    was evaluated directly at the rate scales B_k = C J_k).
    """
    m = block.matrix
    symmetric = np.allclose(m, m.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(m))))
    if symmetric:
        lam, vec = np.linalg.eigh(m)
    else:
        lam_c, vec_c = np.linalg.eig(m)
        if np.max(np.abs(lam_c.imag)) > 1e-9 * max(1.0, np.max(np.abs(lam_c.real))):
            raise np.linalg.LinAlgError(f"complex spectrum for q={block.q}: {lam_c}")
        lam, vec = lam_c.real, vec_c.real
    vec = _fix_column_signs(vec)
    order = sorted(range(lam.size), key=lambda k: (-lam[k], tuple(vec[:, k])))
    lam = lam[np.array(order)]
    w_bar = vec[:, np.array(order)]
    cond = np.linalg.cond(w_bar)
    if cond > 1e12:
        raise np.linalg.LinAlgError(
            f"eigenvector matrix for q={block.q} is ill-conditioned (cond={cond:.2e})")
    w = w_bar.T if symmetric else np.linalg.inv(w_bar)
    return BlockEigensystem(q=block.q, eigenvalues=lam, w=w, w_bar=w_bar,
                            rates=_rates_from_eigenvalues(lam, c))


# ---------------------------------------------------------------------------
# closed forms (orders 2..7)
# ---------------------------------------------------------------------------

def _cubic_root(alpha: float, beta: float, gamma: float) -> float:
    """One real root of lambda^3 - alpha lambda^2 + beta lambda - gamma = 0.

    Cardano form as published; complex intermediates are required when all
    three roots are real (the generic case here).
    """
    disc = (alpha ** 3 * gamma / 27 - alpha ** 2 * beta ** 2 / 108
            - alpha * beta * gamma / 6 + beta ** 3 / 27 + gamma ** 2 / 4)
    base = -alpha ** 3 / 27 + beta * alpha / 6 - gamma / 2
    if disc >= 0:
        s = np.sqrt(disc)
        return alpha / 3 - np.cbrt(base + s) - np.cbrt(base - s)
    # three distinct real roots: the two cube roots are complex conjugates
    z = (base + np.sqrt(complex(disc))) ** (1 / 3.0)
    return alpha / 3 - 2 * z.real


def _companion_roots(alpha: float, beta: float, gamma: float, lam: float) -> tuple[float, float]:
    """The other two roots, given one root lam: iota (with +sqrt) and sigma (-sqrt)."""
    if lam == 0.0:
        raise DegenerateSpectrumError("zero cubic root; companion-root formula divides by it")
    half = -(lam - alpha) / 2
    rad = np.sqrt(complex(half * half - gamma / lam))
    if abs(rad.imag) > 1e-8 * max(1.0, abs(rad.real)):
        raise DegenerateSpectrumError(f"companion roots came out complex: {rad}")
    return half + rad.real, half - rad.real


def _q3_cubic_coefficients(j: SpectralDensities) -> tuple[float, float, float]:
    j0, j1, j2 = j.as_tuple()
    gamma = (-6804 * j0 ** 2 * j1 - 8748 * j0 ** 2 * j2 - 12573 * j0 * j1 ** 2
             - 35100 * j0 * j1 * j2 - 12303 * j0 * j2 ** 2 - 3653 * j1 ** 3
             - 16002 * j1 ** 2 * j2 - 13947 * j1 * j2 ** 2 - 2870 * j2 ** 3)
    beta = (324 * j0 ** 2 + 1818 * j0 * j1 + 1764 * j0 * j2 + 827 * j1 ** 2
            + 2140 * j1 * j2 + 767 * j2 ** 2)
    alpha = -45 * j0 - 55 * j1 - 58 * j2
    return alpha, beta, gamma


def _q2_cubic_coefficients(j: SpectralDensities) -> tuple[tuple, tuple]:
    j0, j1, j2 = j.as_tuple()
    gamma_a = (-225 * j0 ** 3 - 4764 * j0 ** 2 * j1 - 7753 * j0 ** 2 * j2
               - 13188 * j0 * j1 ** 2 - 37020 * j0 * j1 * j2 - 15783 * j0 * j2 ** 2
               - 6048 * j1 ** 3 - 26292 * j1 ** 2 * j2 - 21552 * j1 * j2 ** 2
               - 4575 * j2 ** 3)
    beta_a = (259 * j0 ** 2 + 1368 * j0 * j1 + 1874 * j0 * j2 + 1092 * j1 ** 2
              + 2940 * j1 * j2 + 1287 * j2 ** 2)
    alpha_a = -35 * j0 - 60 * j1 - 73 * j2
    gamma_b = (-225 * j0 ** 3 - 2514 * j0 ** 2 * j1 - 7753 * j0 ** 2 * j2
               - 6048 * j0 * j1 ** 2 - 29240 * j0 * j1 * j2 - 15783 * j0 * j2 ** 2
               - 2688 * j1 ** 3 - 17472 * j1 ** 2 * j2 - 25702 * j1 * j2 ** 2
               - 4575 * j2 ** 3)
    beta_b = (259 * j0 ** 2 + 1028 * j0 * j1 + 1874 * j0 * j2 + 672 * j1 ** 2
              + 2520 * j1 * j2 + 1287 * j2 ** 2)
    alpha_b = -35 * j0 - 50 * j1 - 73 * j2
    return (alpha_a, beta_a, gamma_a), (alpha_b, beta_b, gamma_b)


def analytic_eigenvalues(q: int, j: SpectralDensities) -> list[float]:
    """Closed-form eigenvalues for q in 2..7, in the published index order."""
    j0, j1, j2 = j.as_tuple()
    if q == 7:
        return [-(21 * j1 + 7 * j2)]
    if q == 6:
        return [-(9 * j0 + 8 * j1 + 11 * j2), -(9 * j0 + 50 * j1 + 11 * j2)]
    if q == 5:
        s = np.sqrt(625 * j0 ** 2 - 800 * j0 * j1 - 250 * j0 * j2
                    + 2944 * j1 ** 2 + 160 * j1 * j2 + 25 * j2 ** 2)
        mid = -12.5 * j0 - 29 * j1 - 12.5 * j2
        return [mid - s / 2, -25 * j0 - 21 * j1 - 24 * j2, mid + s / 2]
    if q == 4:
        sa = np.sqrt(256 * (j0 - j1) ** 2 + 105 * (j1 - j2) ** 2)
        sb = np.sqrt(256 * j0 ** 2 + 105 * (j1 + j2) ** 2)
        return [-20 * j0 - 29 * j1 - 21 * j2 - sa, -20 * j0 - 29 * j1 - 21 * j2 + sa,
                -20 * j0 - 13 * j1 - 21 * j2 - sb, -20 * j0 - 13 * j1 - 21 * j2 + sb]
    if q == 3:
        alpha, beta, gamma = _q3_cubic_coefficients(j)
        lam3 = _cubic_root(alpha, beta, gamma)
        iota, sigma = _companion_roots(alpha, beta, gamma, lam3)
        return [iota, -(9 * j0 + 21 * j1 + 40 * j2), lam3,
                -(36 * j0 + 13 * j1 + 21 * j2), sigma]
    if q == 2:
        set_a, set_b = _q2_cubic_coefficients(j)
        lam2 = _cubic_root(*set_a)
        iota_a, sigma_a = _companion_roots(*set_a, lam2)
        lam4 = _cubic_root(*set_b)
        iota_b, sigma_b = _companion_roots(*set_b, lam4)
        return [iota_a, lam2, iota_b, lam4, sigma_a, sigma_b]
    raise ValueError(f"no closed-form eigenvalues for q={q} (only 2..7)")


def _q5_pair(j: SpectralDensities) -> tuple[float, float]:
    j0, j1, j2 = j.as_tuple()
    s = np.sqrt(625 * j0 ** 2 - 800 * j0 * j1 - 250 * j0 * j2
                + 2944 * j1 ** 2 + 160 * j1 * j2 + 25 * j2 ** 2)
    den = 10 * np.sqrt(42) * (-5 * j0 + 4 * j1 + j2)
    _degenerate_guard(den, "q=5 a1/b1 denominator", scale=j0)
    num = 25 * j0 + 656 * j1 - 5 * j2
    return (num - 13 * s) / den, (num + 13 * s) / den


def _degenerate_guard(value: float, what: str, scale: float = 1.0) -> None:
    if abs(value) <= 1e-12 * abs(scale):
        raise DegenerateSpectrumError(f"{what} within 1e-12 of zero; fall back to numeric_eigensystem")


def _analytic_w_pair(q: int, j: SpectralDensities) -> tuple[np.ndarray, np.ndarray]:
    sq = np.sqrt
    j0, j1, j2 = j.as_tuple()
    if q == 7:
        return np.array([[1.0]]), np.array([[1.0]])
    if q == 6:
        w = np.array([[-1.0, 1.0], [1.0, 1.0]]) / sq(2)
        return w, w.copy()
    if q == 5:
        a1, b1 = _q5_pair(j)
        _degenerate_guard(a1 - b1, "q=5 (a1 - b1)")
        na, nb = sq(a1 ** 2 + 1), sq(b1 ** 2 + 1)
        w = np.array([
            [(sq(6) - sq(7) * b1) / (a1 - b1) * na, -(sq(12) * b1 + sq(14)) / (a1 - b1) * na,
             (sq(6) - sq(7) * b1) / (a1 - b1) * na],
            [-sq(13), 0.0, sq(13)],
            [-(sq(6) - sq(7) * a1) / (a1 - b1) * nb, (sq(12) * a1 + sq(14)) / (a1 - b1) * nb,
             -(sq(6) - sq(7) * a1) / (a1 - b1) * nb],
        ]) / sq(26)
        w_bar = np.array([
            [(sq(7) + sq(6) * a1) / na, -sq(13), (sq(7) + sq(6) * b1) / nb],
            [(sq(12) - sq(14) * a1) / na, 0.0, (sq(12) - sq(14) * b1) / nb],
            [(sq(7) + sq(6) * a1) / na, sq(13), (sq(7) + sq(6) * b1) / nb],
        ]) / sq(26)
        return w, w_bar
    if q == 4:
        sa = sq(256 * (j0 - j1) ** 2 + 105 * (j1 - j2) ** 2)
        sb = sq(256 * j0 ** 2 + 105 * (j1 + j2) ** 2)
        _degenerate_guard(j1 - j2, "q=4 (J1 - J2)", scale=j1)
        a1 = (16 * j0 - 16 * j1 + sa) / (sq(105) * (j1 - j2))
        b1 = (16 * j0 - 16 * j1 - sa) / (sq(105) * (j1 - j2))
        a2 = (-16 * j0 + sb) / (sq(105) * (j1 + j2))
        b2 = (-16 * j0 - sb) / (sq(105) * (j1 + j2))
        _degenerate_guard(a1 - b1, "q=4 (a1 - b1)")
        _degenerate_guard(a2 - b2, "q=4 (a2 - b2)")
        n1a, n1b = sq(a1 ** 2 + 1), sq(b1 ** 2 + 1)
        n2a, n2b = sq(a2 ** 2 + 1), sq(b2 ** 2 + 1)
        w = np.array([
            [n1a / (a1 - b1), -b1 * n1a / (a1 - b1), -b1 * n1a / (a1 - b1), n1a / (a1 - b1)],
            [-n1b / (a1 - b1), a1 * n1b / (a1 - b1), a1 * n1b / (a1 - b1), -n1b / (a1 - b1)],
            [b2 * n2a / (a2 - b2), -n2a / (a2 - b2), n2a / (a2 - b2), -b2 * n2a / (a2 - b2)],
            [-a2 * n2b / (a2 - b2), n2b / (a2 - b2), -n2b / (a2 - b2), a2 * n2b / (a2 - b2)],
        ]) / sq(2)
        w_bar = np.array([
            [a1 / n1a, b1 / n1b, -1 / n2a, -1 / n2b],
            [1 / n1a, 1 / n1b, -a2 / n2a, -b2 / n2b],
            [1 / n1a, 1 / n1b, a2 / n2a, b2 / n2b],
            [a1 / n1a, b1 / n1b, 1 / n2a, 1 / n2b],
        ]) / sq(2)
        return w, w_bar
    if q == 3:
        return _q3_w_pair(j)
    if q == 2:
        return _q2_w_pair(j)
    raise ValueError(f"no closed-form transformation for q={q} (only 2..7)")


def _cartesian_vector(lam: float, xi: dict, arrangement: str) -> np.ndarray:
    """Published eigenvector pattern of the symmetric-subspace 3x3 system."""
    mid = xi[3] if arrangement == "q3" else xi[2]
    if arrangement == "q3":
        v = np.array([xi[4] * (lam - mid), (lam - xi[1]) * (lam - mid), xi[5] * (lam - xi[1])])
    else:
        v = np.array([xi[4] * (lam - mid), xi[5] * (lam - xi[1]), (lam - xi[1]) * (lam - mid)])
    norm = np.linalg.norm(v)
    # components are products of two rate-scale quantities; guard relative to that
    magnitude = (abs(lam - xi[1]) + abs(lam - mid) + abs(xi[4]) + abs(xi[5])) ** 2
    _degenerate_guard(norm, "cartesian-parameter normalization", scale=magnitude)
    return v / norm


def _inv3_adjugate(r1: np.ndarray, r2: np.ndarray, r3: np.ndarray) -> np.ndarray:
    """Inverse of [r1 | r2 | r3] via cross products over the 3x3 determinant."""
    det = float(np.dot(r1, np.cross(r2, r3)))
    _degenerate_guard(det, "cartesian-parameter matrix determinant")
    return np.vstack([np.cross(r2, r3), np.cross(r3, r1), np.cross(r1, r2)]) / det


def _q3_w_pair(j: SpectralDensities) -> tuple[np.ndarray, np.ndarray]:
    sq = np.sqrt
    j0, j1, j2 = j.as_tuple()
    xi = {1: -12 * j0 - 29 * j1 - 9 * j2,
          3: (-90 * j0 - 113 * j1 - 161 * j2) / 13,
          4: sq(208 / 11) * (-3 * j0 + 2 * j1 + j2),
          5: -sq(210 / 1859) * (27 * j0 + 4 * j1 - 31 * j2)}
    alpha, beta, gamma = _q3_cubic_coefficients(j)
    lam3 = _cubic_root(alpha, beta, gamma)
    iota, sigma = _companion_roots(alpha, beta, gamma, lam3)
    r = {k: _cartesian_vector(lam, xi, "q3") for k, lam in ((1, iota), (3, lam3), (5, sigma))}
    # orthogonal constant basis: symmetric-subspace images of x, y, z plus the
    # two antisymmetric modes (columns 2 and 4)
    basis = np.zeros((5, 5))
    fx, fy, fz = sq(462) / 66, sq(546) / 39, sq(715) / 143
    gx, gy, gz = sq(264) / 33, -sq(78) / 78, -sq(5005) / 143
    hx, hy, hz = sq(330) / 33, -sq(390) / 39, sq(9009) / 143
    basis[:, 0] = (fx, gx, hx, gx, fx)
    basis[:, 2] = (fy, gy, hy, gy, fy)
    basis[:, 4] = (fz, gz, hz, gz, fz)
    basis[:, 1] = np.array([0, -1, 0, 1, 0]) / sq(2)
    basis[:, 3] = np.array([-1, 0, 0, 0, 1]) / sq(2)
    r_embed = np.zeros((5, 5))
    for col, k in ((0, 1), (2, 3), (4, 5)):
        r_embed[0, col], r_embed[2, col], r_embed[4, col] = r[k]
    r_embed[1, 1] = r_embed[3, 3] = 1.0
    w_bar = basis @ r_embed
    r_inv = np.eye(5)
    r_inv[np.ix_((0, 2, 4), (0, 2, 4))] = _inv3_adjugate(r[1], r[3], r[5])
    w = r_inv @ basis.T
    return w, w_bar


def _q2_w_pair(j: SpectralDensities) -> tuple[np.ndarray, np.ndarray]:
    sq = np.sqrt
    j0, j1, j2 = j.as_tuple()
    xi_a = {1: -(107 * j0 + 294 * j1 + 369 * j2) / 11,
            2: -(55 * j0 + 102 * j1 + 39 * j2) / 7,
            4: -56 / 11 * sq(2) * (j0 + j1 - 2 * j2),
            5: -4 / 7 * sq(55) * (2 * j0 - j1 - j2)}
    xi_b = {1: -(51 * j0 + 32 * j1 + 67 * j2) / 3,
            2: -(45 * j0 + 168 * j1 + 151 * j2) / 13,
            4: -4 / 33 * sq(143) * (6 * j0 + j1 - 7 * j2),
            5: -24 / 143 * sq(770) * (j0 + 2 * j1 - 3 * j2)}
    set_a, set_b = _q2_cubic_coefficients(j)
    lam2 = _cubic_root(*set_a)
    iota_a, sigma_a = _companion_roots(*set_a, lam2)
    lam4 = _cubic_root(*set_b)
    iota_b, sigma_b = _companion_roots(*set_b, lam4)
    lams = {1: iota_a, 2: lam2, 5: sigma_a, 3: iota_b, 4: lam4, 6: sigma_b}
    r = {k: _cartesian_vector(lams[k], xi_a, "q2") for k in (1, 2, 5)}
    r.update({k: _cartesian_vector(lams[k], xi_b, "q2") for k in (3, 4, 6)})
    c_bar = _q2_constant_basis()
    r_embed = np.zeros((6, 6))
    for k in (1, 2, 5):
        r_embed[0, k - 1], r_embed[1, k - 1], r_embed[4, k - 1] = r[k]
    for k in (3, 4, 6):
        r_embed[2, k - 1], r_embed[3, k - 1], r_embed[5, k - 1] = r[k]
    w_bar = c_bar @ r_embed
    inv_a = _inv3_adjugate(r[1], r[2], r[5])
    inv_b = _inv3_adjugate(r[3], r[4], r[6])
    r_inv = np.zeros((6, 6))
    r_inv[np.ix_((0, 1, 4), (0, 1, 4))] = inv_a
    r_inv[np.ix_((2, 3, 5), (2, 3, 5))] = inv_b
    w = r_inv @ c_bar.T
    return w, w_bar


@lru_cache(maxsize=1)
def _q2_constant_basis() -> np.ndarray:
    sq = np.sqrt
    return np.array([
        [sq(5 / 66), 1 / sq(12), -sq(35) / sq(132), -sq(3 / 286), sq(15) / sq(44), -sq(35) / sq(156)],
        [-sq(21 / 66), sq(15) / sq(84), -3 * sq(3) / sq(132), sq(35 / 286), 1 / sq(308), 3 * sq(3) / sq(156)],
        [sq(7 / 66), 2 * sq(5) / sq(84), -2 / sq(132), -sq(105 / 286), -4 * sq(3) / sq(308), 4 / sq(156)],
        [sq(7 / 66), 2 * sq(5) / sq(84), 2 / sq(132), sq(105 / 286), -4 * sq(3) / sq(308), -4 / sq(156)],
        [-sq(21 / 66), sq(15) / sq(84), 3 * sq(3) / sq(132), -sq(35 / 286), 1 / sq(308), -3 * sq(3) / sq(156)],
        [sq(5 / 66), 1 / sq(12), sq(35) / sq(132), sq(3 / 286), sq(15) / sq(44), sq(35) / sq(156)],
    ])


def analytic_eigensystem(q: int, j: SpectralDensities,
                         c: QuadrupolarConstant | None = None) -> BlockEigensystem:
    """Closed-form eigensystem for q in 2..7 with modes reordered by ascending rate.

    The transformation pair keeps the published signs; without a quadrupolar
    constant the rates are reported as -lambda (the C = 1 convention).
    """
    lam = np.array(analytic_eigenvalues(q, j), dtype=float)
    w, w_bar = _analytic_w_pair(q, j)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    w_bar = w_bar[:, order]
    w = w[order, :]
    return BlockEigensystem(q=q, eigenvalues=lam, w=w, w_bar=w_bar,
                            rates=_rates_from_eigenvalues(lam, c))


# ---------------------------------------------------------------------------
# conformance against the published tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableValidationReport:
    """Deviations between assembled blocks and the reference-table fixture at one J triple."""

    q0_max_abs: float
    q0_max_rel: float
    q1_max_abs: float
    q1_max_rel: float
    spectra_max_rel: tuple          # (q, rel_dev) pairs for q = 2..7
    printed_variant_max_abs: float  # distance of the five as-published q=1 cells

    @property
    def max_relative_deviation(self) -> float:
        return max(self.q0_max_rel, self.q1_max_rel, max(d for _, d in self.spectra_max_rel))


def validate_against_reference_tables(j: SpectralDensities, two_i: int = 7) -> TableValidationReport:
    """Compare assembled blocks with the fixture tables and closed-form spectra.

    The q = 0 and q = 1 blocks are conjugated into the published intermediate
    basis (the constant transformations U, U-bar) before entrywise comparison;
    orders 2..7 are compared through their sorted spectra.
    """
    tables = load_reference_tables()
    quads = _canonical_quads(two_i)

    b0 = assemble_block(0, quads, j).matrix
    t0 = tables.j0_block.evaluate(j)
    d0 = np.abs(tables.u0 @ b0 @ tables.u0_bar - t0)
    q0_scale = np.max(np.abs(t0))

    b1 = assemble_block(1, quads, j).matrix
    t1 = tables.j1_block.evaluate(j)
    basis1 = tables.u1 @ b1 @ tables.u1_bar
    d1 = np.abs(basis1 - t1)
    q1_scale = np.max(np.abs(t1))

    variants = tables.printed_j1_variants.evaluate(j)
    printed_dev = 0.0
    for (r, kk) in tables.printed_j1_variants.entries:
        printed_dev = max(printed_dev, abs(basis1[r - 1, kk - 1] - variants[r - 1, kk - 1]))

    spectra = []
    for q in range(2, two_i + 1):
        lam_num = np.sort(np.linalg.eigvalsh(assemble_block(q, quads, j).matrix))
        lam_ana = np.sort(np.array(analytic_eigenvalues(q, j)))
        spectra.append((q, float(np.max(np.abs(lam_num - lam_ana)) / np.max(np.abs(lam_num)))))

    return TableValidationReport(
        q0_max_abs=float(np.max(d0)), q0_max_rel=float(np.max(d0) / q0_scale),
        q1_max_abs=float(np.max(d1)), q1_max_rel=float(np.max(d1) / q1_scale),
        spectra_max_rel=tuple(spectra), printed_variant_max_abs=float(printed_dev),
    )
