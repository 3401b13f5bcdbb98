"""Secret-key analysis: mutual information, eavesdropper bounds, solvers.

The secret key per symbol is K = beta * I(A:B) - chi, with chi the
eavesdropper's information about the reconciliation reference (Alice's
symbols for direct reconciliation, Bob's outcomes for reverse).  All
quantities derive from the Gaussian round states of `protocol.build_round`.

chi is evaluated as a Gaussian entropy defect between Eve's
ensemble-averaged and conditioned covariances in log-determinant form,

    chi = (1/2) log2( det V_ens / det V_cond ),

the additive differential-entropy constants cancelling between the two
same-sized matrices.  A symplectic-spectrum (thermal-occupation) variant
of the same defect is available via ``functional='symplectic'`` for
comparison; the two agree only in limits where Eve's states are far from
the vacuum manifold, and the log-determinant form is the one whose
direct-reconciliation key vanishes exactly at the 3 dB loss point
(tau = 1/2) for every squeezing level.

Key rates are reported unclamped: R = 2 * bandwidth * K may be negative,
which keeps sign changes visible to the bisection solvers.  Presentation
layers may clamp for display.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import gaussian, link, protocol as protocol_mod
from .protocol import QUAD_INDEX, build_round

LN2 = np.log(2.0)

# solver grids and tolerances
SCAN_POINTS = 256
SCAN_MIN_M = 0.1
SCAN_MAX_M = 1.0e6
DISTANCE_TOL_M = 0.1
NBAR_TOL = 1e-4
KEY_TOL_BITS = 1e-9


@dataclass(frozen=True)
class KeyReport:
    """One evaluated parameter point."""

    mutual_info: float
    holevo: float
    secret_key: float
    rate_upper: float
    protocol: object
    channel: object
    detector: object


@dataclass(frozen=True)
class SolverResult:
    """Solver output: the solved value plus machine-readable flags.

    flags tokens: 'insecure' (no positive key anywhere / already at zero
    noise), 'multi_root' (non-monotone sign pattern; brackets holds every
    sign-change interval found), 'unbounded' (condition satisfied through
    the end of the scan range).
    """

    value: float
    flags: tuple = ()
    brackets: tuple = ()


def _logdet(cov):
    sign, ld = np.linalg.slogdet(cov)
    if sign <= 0:
        raise gaussian.PhysicalityError("covariance with non-positive determinant")
    return ld


def _entropy_defect(cov_ens, cov_cond, functional="logdet"):
    """Entropy difference S(ens) - S(cond) between same-sized covariances."""
    if functional == "logdet":
        return 0.5 * (_logdet(cov_ens) - _logdet(cov_cond)) / LN2
    if functional == "symplectic":
        return (gaussian.von_neumann_entropy(cov_ens)
                - gaussian.von_neumann_entropy(cov_cond))
    raise ValueError("functional must be 'logdet' or 'symplectic'")


def mutual_information(round_states):
    """I(A:B) = (1/2) log2(sigma_B^2 / sigma_B|A^2) in bits per symbol."""
    qi = QUAD_INDEX[round_states.basis]
    cond = round_states.bob_conditional.cov[qi, qi]
    if cond <= 0:
        raise ValueError("conditional variance must be positive")
    return 0.5 * np.log2(round_states.sigma_b2 / cond)


def holevo_dr(round_states, functional="logdet"):
    """Eve's information about Alice's symbols (direct reconciliation).

    Entropy defect of Eve's ensemble state against her (symbol-independent)
    conditional state.
    """
    return _entropy_defect(round_states.eve_ensemble.cov,
                           round_states.eve_conditional.cov, functional)


def holevo_rr(round_states, functional="logdet"):
    """Eve's information about Bob's outcomes (reverse reconciliation).

    Eve's ensemble state is conditioned on Bob's homodyne outcome by the
    Schur complement against Bob's measured quadrature in the joint state
    (detector treatment included in Bob's block).
    """
    eve_given_bob = gaussian.homodyne_condition(
        round_states.joint_ensemble, 0, round_states.basis)
    return _entropy_defect(round_states.eve_ensemble.cov,
                           eve_given_bob.cov, functional)


def secret_key(protocol, channel, detector, functional="logdet"):
    """Full key report at one parameter point.

    K = beta * I - chi (exactly reconstructable from the reported parts);
    R = 2 * bandwidth * K, reported without clamping.
    """
    rs = build_round(protocol, channel, detector)
    info = mutual_information(rs)
    if protocol.reconciliation == "DR":
        chi = holevo_dr(rs, functional)
    else:
        chi = holevo_rr(rs, functional)
    key = protocol.beta * info - chi
    return KeyReport(
        mutual_info=info,
        holevo=chi,
        secret_key=key,
        rate_upper=2.0 * detector.bandwidth_hz * key,
        protocol=protocol,
        channel=channel,
        detector=detector,
    )


def key_at_distance(scenario, protocol, detector, distance_m, functional="logdet"):
    """KeyReport for a link scenario evaluated at a specific distance."""
    at = replace(scenario, distance_m=distance_m)
    return secret_key(protocol, link.channel_params(at), detector, functional)


# ---------------------------------------------------------------------------
# solvers

def _scan_brackets(predicate, grid):
    """All (lo, hi) grid intervals over which predicate changes truth value."""
    values = [bool(predicate(x)) for x in grid]
    return [(grid[i], grid[i + 1]) for i in range(len(grid) - 1)
            if values[i] != values[i + 1]], values


def _bisect_edge(predicate, lo, hi, tol):
    """Refine the true->false edge inside (lo, hi) to absolute tolerance tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _largest_true(predicate, grid, tol):
    """Largest x with predicate(x) true, assuming true at grid[0].

    Returns a SolverResult; flags 'unbounded' when true through the end of
    the grid and 'multi_root' when the truth pattern changes sign more
    than once (all change intervals reported as brackets).
    """
    brackets, values = _scan_brackets(predicate, grid)
    if values[-1]:
        flags = ("unbounded",) if len(brackets) <= 1 else ("unbounded", "multi_root")
        return SolverResult(float(grid[-1]), flags=flags, brackets=tuple(brackets))
    if len(brackets) > 1:
        warnings.warn(
            f"non-monotone sign pattern: {len(brackets)} candidate roots; "
            "returning the outermost", stacklevel=3)
        last_true = max(i for i, v in enumerate(values) if v)
        edge = _bisect_edge(predicate, grid[last_true], grid[last_true + 1], tol)
        return SolverResult(edge, flags=("multi_root",), brackets=tuple(brackets))
    edge = _bisect_edge(predicate, brackets[0][0], brackets[0][1], tol)
    return SolverResult(edge, brackets=tuple(brackets))


def secure_distance(scenario, protocol, detector,
                    scan_max_m=SCAN_MAX_M, functional="logdet"):
    """Largest distance with a positive secret key, to 0.1 m.

    Scans a 256-point geometric grid over [0.1 m, scan_max_m] and bisects
    the outermost sign change.  A link that is already insecure at the
    near end returns 0 with the 'insecure' flag; a non-monotone sign
    pattern is flagged 'multi_root' with every bracket reported.
    """
    def positive(d):
        return key_at_distance(scenario, protocol, detector, d,
                               functional).secret_key > 0.0

    grid = np.geomspace(SCAN_MIN_M, scan_max_m, SCAN_POINTS)
    if not positive(grid[0]):
        return SolverResult(0.0, flags=("insecure",))
    return _largest_true(positive, grid, DISTANCE_TOL_M)


def noise_threshold(tau, protocol, detector, functional="logdet"):
    """Channel noise nbar* where the secret key crosses zero at fixed tau.

    Bisection to 1e-4 photons (polished until |K| < 1e-9 bits within the
    bracket); returns 0 with the 'insecure' flag when the key is already
    non-positive at zero noise.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("noise threshold is defined for tau in (0, 1)")

    def key(nbar):
        chan = link.ChannelParams(tau=tau, nbar=nbar, nbar_th=0.0)
        return secret_key(protocol, chan, detector, functional).secret_key

    if key(0.0) <= 0.0:
        return SolverResult(0.0, flags=("insecure",))
    hi = 1e-3
    while key(hi) > 0.0:
        hi *= 2.0
        if hi > 1e9:
            return SolverResult(float("inf"), flags=("unbounded",))
    lo = 0.0
    while hi - lo > NBAR_TOL or abs(key(0.5 * (lo + hi))) > KEY_TOL_BITS:
        mid = 0.5 * (lo + hi)
        if key(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return SolverResult(0.5 * (lo + hi))


def crossover_distance(protocol, mw_scenario, mw_detector,
                       tel_scenario, tel_detector,
                       scan_max_m=SCAN_MAX_M, functional="logdet"):
    """Largest distance where the microwave rate is at least the telecom one.

    Rates are compared unclamped, restricted to distances where at least
    one of the links still has a positive rate (beyond both secure ranges
    the comparison is vacuous).  Returns 0 if the condition holds nowhere
    and the scan maximum with the 'unbounded' flag if it holds through the
    end of the range.
    """
    def mw_wins(d):
        r_mw = key_at_distance(mw_scenario, protocol, mw_detector, d,
                               functional).rate_upper
        r_tel = key_at_distance(tel_scenario, protocol, tel_detector, d,
                                functional).rate_upper
        return r_mw >= r_tel and (r_mw > 0.0 or r_tel > 0.0)

    grid = np.geomspace(SCAN_MIN_M, scan_max_m, SCAN_POINTS)
    wins = [mw_wins(d) for d in grid]
    if not any(wins):
        return SolverResult(0.0)
    if wins[-1]:
        return SolverResult(float(grid[-1]), flags=("unbounded",))
    last = max(i for i, w in enumerate(wins) if w)
    edge = _bisect_edge(mw_wins, grid[last], grid[last + 1], DISTANCE_TOL_M)
    return SolverResult(edge, brackets=((float(grid[last]), float(grid[last + 1])),))
