"""Built-in consistency checks, exposed as ``airqkd selftest``.

Each check is a small self-contained invariant of the implementation:
physicality floors, closed-form cross-checks, dual-route agreement of the
entropy defect, detector-model equivalence, and output determinism.  They
use no external data beyond the bundled coefficient tables and run in a
few seconds.
"""

import csv
import io

import numpy as np

from . import gaussian, link, protocol, security
from .link import ChannelParams, LinkScenario
from .protocol import DetectorModel, ProtocolParams
from .scenario import evaluate_sweep, validate_scenario

_SEED = 20260823


def _check_symplectic_floor():
    """Random physical covariances never dip below the vacuum eigenvalue."""
    rng = np.random.default_rng(_SEED)
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        a = rng.normal(scale=0.7, size=(2 * n, 2 * n))
        cov = a @ a.T + np.eye(2 * n) / 4.0
        nu = gaussian.symplectic_eigenvalues(cov)
        assert nu.min() >= 1.0 - 1e-10, f"symplectic eigenvalue {nu.min()}"


def _check_pure_state_entropy():
    """Pure states have (numerically) zero von Neumann entropy."""
    for state in (gaussian.vacuum_state(2),
                  gaussian.two_mode_squeezed_state(1.7)):
        s = gaussian.von_neumann_entropy(state.cov)
        assert abs(s) <= 1e-9, f"pure-state entropy {s}"
    squeezed = gaussian.apply(
        gaussian.vacuum_state(1),
        gaussian.squeeze_rotate_transform(0.8, 0.0, 0, 1))
    s = gaussian.von_neumann_entropy(squeezed.cov)
    assert abs(s) <= 1e-9, f"squeezed-vacuum entropy {s}"


def _check_bob_variance_closed_form():
    """Pipeline Bob variance matches the closed-form expression."""
    rng = np.random.default_rng(_SEED + 1)
    for _ in range(25):
        tau = float(rng.uniform(0.05, 0.999))
        nbar = float(rng.uniform(0.0, 2.0))
        s_db = float(rng.uniform(0.0, 10.0))
        n_amp = float(rng.uniform(0.0, 1.0))
        proto = ProtocolParams(squeezing_db=s_db)
        det = DetectorModel(bandwidth_hz=1.0, amplifier_noise=n_amp)
        rs = protocol.build_round(proto, ChannelParams(tau, nbar, 0.0), det)
        _, _, sas, _ = proto.variances
        expect = tau * sas + (1.0 - tau) / 4.0 + nbar + det.n_g
        got = rs.bob_ensemble.cov[0, 0]
        assert abs(got - expect) <= 1e-12, f"sigma_b2 {got} vs {expect}"
        assert abs(rs.sigma_b2 - expect) <= 1e-12


def _check_ensemble_psd():
    """Ensemble covariances dominate the conditional ones (PSD order)."""
    rng = np.random.default_rng(_SEED + 2)
    for _ in range(25):
        proto = ProtocolParams(squeezing_db=float(rng.uniform(0.0, 10.0)))
        chan = ChannelParams(float(rng.uniform(0.05, 0.999)),
                             float(rng.uniform(0.0, 2.0)), 0.0)
        det = DetectorModel(bandwidth_hz=1.0,
                            efficiency=float(rng.uniform(0.2, 1.0)),
                            noise_mode="pure-loss")
        rs = protocol.build_round(proto, chan, det)
        for ens, cond in ((rs.bob_ensemble, rs.bob_conditional),
                          (rs.eve_ensemble, rs.eve_conditional)):
            w = np.linalg.eigvalsh(ens.cov - cond.cov)
            assert w.min() >= -1e-10, f"ensemble-conditional gap {w.min()}"


def _check_pure_loss_rr_positive():
    """Reverse reconciliation survives any pure-loss channel."""
    proto = ProtocolParams(squeezing_db=3.0, reconciliation="RR")
    det = DetectorModel(bandwidth_hz=1.0, efficiency=1.0)
    for tau in (0.1, 0.5, 0.9):
        rep = security.secret_key(proto, ChannelParams(tau, 0.0, 0.0), det)
        assert rep.secret_key > 0.0, f"K_RR({tau}) = {rep.secret_key}"


def _check_efficiency_tradeoff():
    """Past the ideal-detector range a lossy detector can do less badly."""
    proto = ProtocolParams(squeezing_db=3.0, reconciliation="RR")
    scen = LinkScenario(band="microwave", distance_m=150.0)
    chan = link.channel_params(scen)

    def rate(eta):
        det = DetectorModel(bandwidth_hz=3.0e9, efficiency=eta,
                            noise_mode="added-noise")
        return security.secret_key(proto, chan, det).rate_upper

    ideal = rate(1.0)
    best = max(rate(e) for e in np.linspace(0.05, 0.95, 19))
    assert best > ideal, f"no efficiency gain at 150 m ({best} <= {ideal})"


def _defect_via_eigenvalues(cov_ens, cov_cond):
    nu_e = gaussian.symplectic_eigenvalues(cov_ens)
    nu_c = gaussian.symplectic_eigenvalues(cov_cond)
    return float(np.sum(np.log2(nu_e)) - np.sum(np.log2(nu_c)))


def _check_entropy_defect_dual_route():
    """Log-determinant and eigenvalue-product routes agree to 1e-8."""
    rng = np.random.default_rng(_SEED + 3)
    for _ in range(100):
        proto = ProtocolParams(squeezing_db=float(rng.uniform(0.0, 10.0)))
        chan = ChannelParams(float(rng.uniform(0.05, 0.999)),
                             float(rng.uniform(0.0, 2.0)), 0.0)
        det = DetectorModel(bandwidth_hz=1.0,
                            amplifier_noise=float(rng.uniform(0.0, 0.5)))
        rs = protocol.build_round(proto, chan, det)
        pairs = [(rs.eve_ensemble.cov, rs.eve_conditional.cov)]
        eve_given_bob = gaussian.homodyne_condition(rs.joint_ensemble, 0,
                                                    rs.basis)
        pairs.append((rs.eve_ensemble.cov, eve_given_bob.cov))
        for ens, cond in pairs:
            a = security._entropy_defect(ens, cond, functional="logdet")
            b = _defect_via_eigenvalues(ens, cond)
            assert abs(a - b) <= 1e-8, f"dual-route gap {a - b}"


def _check_detector_equivalence():
    """Added-noise and pure-loss detectors give identical security figures."""
    proto = ProtocolParams(squeezing_db=3.0, reconciliation="RR")
    chan = ChannelParams(0.97, 0.15, 0.0)
    for eta in (0.345, 0.53, 0.695):
        loss = DetectorModel(bandwidth_hz=1.0, efficiency=eta,
                             noise_mode="pure-loss")
        noise = DetectorModel(bandwidth_hz=1.0, efficiency=eta,
                              noise_mode="added-noise")
        a = security.secret_key(proto, chan, loss)
        b = security.secret_key(proto, chan, noise)
        for x, y in ((a.mutual_info, b.mutual_info),
                     (a.holevo, b.holevo),
                     (a.secret_key, b.secret_key)):
            assert abs(x - y) <= 1e-12, f"detector modes differ by {x - y}"


def _smoke_scenario():
    return validate_scenario({
        "name": "selftest",
        "protocol": {"squeezing_db": 3.0, "reconciliation": "RR"},
        "microwave": {"distance_m": 50.0,
                      "detector": {"bandwidth_hz": 3.0e9}},
        "sweep": [
            {"variable": "distance_m", "min": 10.0, "max": 100.0,
             "points": 4, "scale": "log"},
            {"variable": "squeezing_db", "min": 1.0, "max": 9.0,
             "points": 3},
        ],
    })


def _csv_text(rows, sweep):
    from .cli import _fmt, _result_columns, _row_record
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    columns = _result_columns(sweep)
    writer.writerow(columns)
    for row in rows:
        rec = _row_record(row, sweep)
        writer.writerow([_fmt(rec[c]) for c in columns])
    return buf.getvalue()


def _check_csv_determinism():
    """Sweep output is byte-identical across repeats and thread counts."""
    scen = _smoke_scenario()
    texts = {_csv_text(evaluate_sweep(scen, threads=t), scen.sweep)
             for t in (1, 1, 3)}
    assert len(texts) == 1, "sweep output depends on thread count"


def _check_attenuation_anchors():
    """Bundled coefficient tables reproduce their defining formulas."""
    k_h, alpha_h = link.rain_coefficients(5.0)
    assert abs(k_h / 2.161503e-4 - 1.0) <= 1e-4, f"k_H(5 GHz) = {k_h}"
    assert abs(alpha_h / 1.696927 - 1.0) <= 1e-4, f"alpha_H(5 GHz) = {alpha_h}"
    k_l = link.cloud_attenuation_coefficient(5.0)
    assert abs(k_l / 1.157315e-2 - 1.0) <= 1e-4, f"K_l(5 GHz) = {k_l}"
    n_th = link.planck_occupancy(5.0e9, 300.0)
    assert abs(n_th - 1249.697214) <= 1e-3, f"thermal occupancy {n_th}"


CHECKS = (
    ("symplectic floor of random physical states", _check_symplectic_floor),
    ("pure-state entropy", _check_pure_state_entropy),
    ("closed-form receiver variance", _check_bob_variance_closed_form),
    ("ensemble dominates conditional", _check_ensemble_psd),
    ("pure-loss reverse reconciliation stays secure",
     _check_pure_loss_rr_positive),
    ("detector-efficiency trade-off beyond the secure range",
     _check_efficiency_tradeoff),
    ("entropy-defect dual route", _check_entropy_defect_dual_route),
    ("detector model equivalence", _check_detector_equivalence),
    ("sweep output determinism", _check_csv_determinism),
    ("attenuation table anchors", _check_attenuation_anchors),
)


def run_selftest(verbose=False):
    """Run every check; returns True when all pass."""
    passed = True
    for name, check in CHECKS:
        try:
            check()
        except AssertionError as exc:
            passed = False
            if verbose:
                print(f"FAIL  {name}: {exc}")
        else:
            if verbose:
                print(f"ok    {name}")
    if verbose:
        print("selftest:", "all checks passed" if passed else "FAILED")
    return passed
