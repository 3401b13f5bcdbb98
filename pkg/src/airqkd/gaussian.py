"""Finite-dimensional Gaussian-state algebra.

Conventions used throughout the package:

* Quadratures are ordered (q1, p1, ..., qN, pN).
* The vacuum quadrature variance is 1/4, i.e. the vacuum covariance is
  (1/4)*Identity.  Symplectic spectra are therefore computed on the
  rescaled matrix 4*V, whose vacuum eigenvalue is exactly 1.
* Entropies are in bits.

States are plain covariance-plus-mean containers; transforms are real
symplectic matrices with an affine displacement.  Everything here is a
pure function of its inputs, so values can be shared freely between
worker threads.
"""

import math
from dataclasses import dataclass

import numpy as np

LN2 = np.log(2.0)

# tolerances, matched to the accumulated rounding of repeated congruences
SYMMETRY_RTOL = 1e-12
SYMPLECTIC_ATOL = 1e-10
PHYSICALITY_TOL = 1e-9


class PhysicalityError(ValueError):
    """Raised when a covariance matrix has a symplectic eigenvalue < 1."""


def symplectic_form(n_modes):
    """The 2N x 2N block-diagonal form Omega with 2x2 blocks [[0,1],[-1,0]]."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), block)


@dataclass(frozen=True)
class GaussianState:
    """An N-mode Gaussian state: mean quadrature vector and covariance matrix.

    cov is symmetric with vacuum variance 1/4 on the diagonal; physicality
    (all symplectic eigenvalues of 4*cov >= 1 - tol, tol = 1e-9 scaled by
    the matrix magnitude to absorb cancellation in hot states) is checked
    on construction.
    """

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        d = 2 * self.n_modes
        if mean.shape != (d,) or cov.shape != (d, d):
            raise ValueError(
                f"shape mismatch: expected mean ({d},) and cov ({d},{d}), "
                f"got {mean.shape} and {cov.shape}")
        scale = max(np.abs(cov).max(), 1.0)
        if not np.allclose(cov, cov.T, rtol=SYMMETRY_RTOL, atol=SYMMETRY_RTOL * scale):
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        nu_min = symplectic_eigenvalues(cov).min()
        if nu_min < 1.0 - PHYSICALITY_TOL * scale:
            raise PhysicalityError(
                f"unphysical covariance: min symplectic eigenvalue {nu_min:.12g} < 1")


@dataclass(frozen=True)
class Transform:
    """A symplectic matrix plus displacement, acting as x -> S x + d."""

    matrix: np.ndarray
    displacement: np.ndarray = None

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=float)
        n2 = s.shape[0]
        if s.shape != (n2, n2) or n2 % 2:
            raise ValueError("transform matrix must be square with even dimension")
        disp = self.displacement
        disp = np.zeros(n2) if disp is None else np.asarray(disp, dtype=float)
        if disp.shape != (n2,):
            raise ValueError("displacement length must match the matrix dimension")
        omega = symplectic_form(n2 // 2)
        if np.abs(s @ omega @ s.T - omega).max() > SYMPLECTIC_ATOL:
            raise ValueError("matrix is not symplectic (S Omega S^T != Omega)")
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "displacement", disp)


def vacuum_state(n_modes):
    """The N-mode vacuum: zero mean, covariance (1/4)*I."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    d = 2 * n_modes
    return GaussianState(n_modes, np.zeros(d), 0.25 * np.eye(d))


def two_mode_squeezed_state(n_occ):
    """Two-mode squeezed vacuum with mean thermal occupation n_occ per marginal.

    Marginals are thermal with variance v = (1 + 2 n_occ)/4; the q-q cross
    covariance is +c and the p-p one is -c with c = sqrt(v^2 - 1/16), which
    makes the global state pure.
    """
    if n_occ < 0:
        raise ValueError("n_occ must be >= 0")
    v = (1.0 + 2.0 * n_occ) / 4.0
    c = np.sqrt(max(v * v - 1.0 / 16.0, 0.0))
    cov = np.array([
        [v, 0.0, c, 0.0],
        [0.0, v, 0.0, -c],
        [c, 0.0, v, 0.0],
        [0.0, -c, 0.0, v],
    ])
    return GaussianState(2, np.zeros(4), cov)


def tensor(*states):
    """Direct sum of Gaussian states (mode order follows the argument order)."""
    n = sum(s.n_modes for s in states)
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((2 * n, 2 * n))
    at = 0
    for s in states:
        d = 2 * s.n_modes
        cov[at:at + d, at:at + d] = s.cov
        at += d
    return GaussianState(n, mean, cov)


def _embed(block, mode_pairs, n_modes):
    """Place 2x2 blocks of a small matrix at the given mode indices."""
    s = np.eye(2 * n_modes)
    for (bi, mi) in enumerate(mode_pairs):
        for (bj, mj) in enumerate(mode_pairs):
            s[2 * mi:2 * mi + 2, 2 * mj:2 * mj + 2] = \
                block[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2]
    return s


def beam_splitter_transform(tau, mode_a, mode_b, n_modes):
    """Beam splitter of transmissivity tau coupling mode_a and mode_b.

    Acts as [[sqrt(tau) I, sqrt(1-tau) I], [-sqrt(1-tau) I, sqrt(tau) I]]
    on the (a, b) quadrature blocks and as the identity elsewhere.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {tau}")
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    if not (0 <= mode_a < n_modes and 0 <= mode_b < n_modes):
        raise ValueError("mode index out of range")
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    i2 = np.eye(2)
    block = np.block([[t * i2, r * i2], [-r * i2, t * i2]])
    return Transform(_embed(block, (mode_a, mode_b), n_modes))


def squeeze_rotate_transform(r, phi, target_mode, n_modes):
    """Single-mode squeezer diag(e^-r, e^+r) followed by a rotation by phi/2."""
    if r < 0:
        raise ValueError("squeeze factor must be >= 0")
    if not 0 <= target_mode < n_modes:
        raise ValueError("mode index out of range")
    half = 0.5 * phi
    rot = np.array([[np.cos(half), -np.sin(half)], [np.sin(half), np.cos(half)]])
    block = rot @ np.diag([np.exp(-r), np.exp(r)])
    return Transform(_embed(block, (target_mode,), n_modes))


def displacement_transform(displacement, n_modes):
    """Pure displacement (identity symplectic part)."""
    return Transform(np.eye(2 * n_modes), np.asarray(displacement, dtype=float))


def apply(state, t):
    """Apply a Transform: mean -> S mean + d, cov -> S cov S^T."""
    if t.matrix.shape[0] != 2 * state.n_modes:
        raise ValueError("transform dimension does not match the state")
    mean = t.matrix @ state.mean + t.displacement
    cov = t.matrix @ state.cov @ t.matrix.T
    cov = 0.5 * (cov + cov.T)
    return GaussianState(state.n_modes, mean, cov)


def reduce(state, keep):
    """Partial trace: keep only the listed modes (in the given order)."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one mode")
    if len(set(keep)) != len(keep):
        raise ValueError("keep contains repeated modes")
    if not all(0 <= m < state.n_modes for m in keep):
        raise ValueError("mode index out of range")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in keep])
    return GaussianState(len(keep), state.mean[idx], state.cov[np.ix_(idx, idx)])


def symplectic_eigenvalues(cov):
    """Symplectic spectrum of a covariance matrix, one entry per mode.

    Returns the N positive moduli of the eigenvalues of i*Omega*(4*cov)
    in ascending order (each doubly-degenerate pair collapsed).  A vacuum
    mode gives exactly 1.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    omega = symplectic_form(n)
    ev = np.linalg.eigvals(1j * omega @ (4.0 * cov))
    nu = np.sort(np.abs(ev))
    return nu[::2]


def _g(m):
    # entropy of a thermal state with mean occupation m, in bits
    if m <= 0.0:
        return 0.0
    return ((m + 1.0) * np.log1p(m) - m * np.log(m)) / LN2


def von_neumann_entropy(cov):
    """Entropy (bits) from the symplectic spectrum: sum of g((nu-1)/2).

    g(m) = (m+1) log2(m+1) - m log2(m), with g(0) = 0 by continuity; the
    small-m branch is evaluated through log1p so threshold scans that probe
    near-vacuum eigenvalues stay stable.
    """
    nu = symplectic_eigenvalues(cov)
    scale = max(np.abs(cov).max(), 1.0)
    if nu.min() < 1.0 - PHYSICALITY_TOL * scale:
        raise PhysicalityError(
            f"unphysical covariance: min symplectic eigenvalue {nu.min():.12g} < 1")
    return float(math.fsum(_g((v - 1.0) / 2.0) for v in nu))


def homodyne_condition(joint, measured_mode, quadrature="q", outcome=None):
    """Condition the remaining modes on a homodyne measurement of one mode.

    The covariance update is the Schur complement against the measured
    quadrature: V' = V_rest - (1/sigma^2) c c^T, outcome-independent.  The
    means follow the usual Gaussian conditional rule; when no outcome is
    given the measurement is taken at the marginal mean, leaving the means
    unchanged.
    """
    if quadrature not in ("q", "p"):
        raise ValueError("quadrature must be 'q' or 'p'")
    if not 0 <= measured_mode < joint.n_modes:
        raise ValueError("mode index out of range")
    if joint.n_modes < 2:
        raise ValueError("need at least one unmeasured mode")
    midx = 2 * measured_mode + (0 if quadrature == "q" else 1)
    var = joint.cov[midx, midx]
    if var <= 1e-15:
        raise ValueError("degenerate measurement: measured quadrature variance ~ 0")
    rest_modes = [m for m in range(joint.n_modes) if m != measured_mode]
    ridx = np.concatenate([[2 * m, 2 * m + 1] for m in rest_modes])
    c = joint.cov[ridx, midx]
    cov = joint.cov[np.ix_(ridx, ridx)] - np.outer(c, c) / var
    cov = 0.5 * (cov + cov.T)
    mean = joint.mean[ridx].copy()
    if outcome is not None:
        mean += c / var * (outcome - joint.mean[midx])
    return GaussianState(len(rest_modes), mean, cov)
