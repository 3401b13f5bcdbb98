"""Three-mode Gaussian model of one protocol round.

Alice prepares a squeezed state displaced along the encoding quadrature by
a Gaussian-distributed symbol; the displacement variance sigma_A^2 is tied
to the squeezing by sigma_s^2 + sigma_A^2 = sigma_as^2 so that the
ensemble average over symbols looks thermal in either basis (the disguise
that hides the encoding basis).  The channel is a beam splitter of
transmissivity tau whose idle port carries one arm of a two-mode squeezed
ancilla held by the eavesdropper (entangling-cloner picture); its
occupation is fixed by the channel noise, n_eve = 2 nbar / (1 - tau).  Bob
detects with a noisy chain summarized either as additive noise n_g on his
quadratures or as an equivalent pure-loss efficiency eta = 1/(1 + 2 n_amp).

`build_round` returns Bob's and Eve's states both conditioned on the
symbol (covariances are symbol-independent; displacements only move means)
and averaged over the symbol ensemble, which is what the security layer
consumes.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gaussian
from .gaussian import GaussianState

QUAD_INDEX = {"q": 0, "p": 1}


def alice_variances(squeezing_db):
    """(r, sigma_s^2, sigma_as^2, sigma_A^2) for a squeezing level S in dB.

    r = S ln10 / 20; the squeezed/antisqueezed variances are 10^(-+S/10)/4
    and the modulation variance fills the thermal-disguise budget
    sigma_A^2 = sigma_as^2 - sigma_s^2.
    """
    if squeezing_db < 0:
        raise ValueError("squeezing level must be >= 0 dB")
    r = squeezing_db * np.log(10.0) / 20.0
    sigma_s2 = 10.0 ** (-squeezing_db / 10.0) / 4.0
    sigma_as2 = 10.0 ** (+squeezing_db / 10.0) / 4.0
    return r, sigma_s2, sigma_as2, sigma_as2 - sigma_s2


@dataclass(frozen=True)
class ProtocolParams:
    """Squeezing level, encoding basis, reconciliation direction/efficiency."""

    squeezing_db: float
    basis: str = "q"
    beta: float = 1.0
    reconciliation: str = "RR"

    def __post_init__(self):
        if self.squeezing_db < 0:
            raise ValueError("protocol.squeezing_db must be >= 0")
        if self.basis not in ("q", "p"):
            raise ValueError("protocol.basis must be 'q' or 'p'")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("protocol.beta must lie in [0, 1]")
        if self.reconciliation not in ("DR", "RR"):
            raise ValueError("protocol.reconciliation must be 'DR' or 'RR'")

    @property
    def variances(self):
        return alice_variances(self.squeezing_db)


@dataclass(frozen=True)
class DetectorModel:
    """Detection chain: bandwidth plus a noise figure.

    The chain is specified either by its quantum efficiency eta or by the
    input-referred amplifier photon number n_amp; the two are locked by
    eta = 1/(1 + 2 n_amp) and the missing one is derived.  noise_mode
    selects how the figure enters Bob's covariance: 'added-noise' adds
    n_g = n_amp/2 per quadrature, 'pure-loss' mixes in vacuum with
    transmissivity eta.  Both give identical security quantities.
    """

    bandwidth_hz: float
    efficiency: float = None
    amplifier_noise: float = None
    noise_mode: str = "added-noise"

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("detector.bandwidth_hz must be > 0")
        if self.noise_mode not in ("added-noise", "pure-loss"):
            raise ValueError("detector.noise_mode must be 'added-noise' or 'pure-loss'")
        eta, n_amp = self.efficiency, self.amplifier_noise
        if eta is None and n_amp is None:
            raise ValueError("detector needs efficiency or amplifier_noise")
        if eta is None:
            if n_amp < 0:
                raise ValueError("detector.amplifier_noise must be >= 0")
            eta = 1.0 / (1.0 + 2.0 * n_amp)
        elif n_amp is None:
            if not 0.0 < eta <= 1.0:
                raise ValueError("detector.efficiency must lie in (0, 1]")
            n_amp = (1.0 / eta - 1.0) / 2.0
        else:
            if abs(eta - 1.0 / (1.0 + 2.0 * n_amp)) > 1e-9:
                raise ValueError(
                    "detector.efficiency and detector.amplifier_noise disagree "
                    "(eta = 1/(1 + 2 n_amp) must hold)")
        object.__setattr__(self, "efficiency", float(eta))
        object.__setattr__(self, "amplifier_noise", float(n_amp))

    @property
    def n_g(self):
        """Added detection noise per quadrature, n_amp / 2."""
        return self.amplifier_noise / 2.0


def detector_from_efficiency(eta, bandwidth_hz, noise_mode="added-noise"):
    """DetectorModel from a quantum efficiency."""
    return DetectorModel(bandwidth_hz=bandwidth_hz, efficiency=eta, noise_mode=noise_mode)


def friis_cascade(stages):
    """Input-referred added photons of an amplifier cascade.

    stages is a sequence of (gain, added_photons); each stage's noise is
    divided by the total gain ahead of it: n_amp = n1 + n2/G1 + n3/(G1 G2) + ...
    """
    n_amp = 0.0
    gain_ahead = 1.0
    for i, (gain, n_added) in enumerate(stages):
        n_amp += n_added / gain_ahead
        if i < len(stages) - 1 and gain <= 1.0:
            raise ValueError("cascade stage gains must be > 1")
        gain_ahead *= gain
    return n_amp


@dataclass(frozen=True)
class RoundStates:
    """Bob/Eve states of one round, conditional and ensemble-averaged.

    Modes of joint_ensemble are ordered (Bob, Eve-line, Eve-ancilla); the
    detector treatment is already applied to Bob's block.  sigma_b2 is
    Bob's measured-quadrature variance in the ensemble, the denominator of
    the reverse-reconciliation conditioning.
    """

    bob_conditional: GaussianState
    bob_ensemble: GaussianState
    eve_conditional: GaussianState
    eve_ensemble: GaussianState
    joint_ensemble: GaussianState
    sigma_b2: float
    basis: str = "q"


def _apply_detector(cov, detector):
    """Detector action on Bob's block (mode 0) of a covariance copy."""
    out = cov.copy()
    if detector.noise_mode == "added-noise":
        out[0:2, 0:2] += detector.n_g * np.eye(2)
    else:
        eta = detector.efficiency
        root = np.sqrt(eta)
        out[0:2, :] *= root
        out[:, 0:2] *= root
        out[0:2, 0:2] += (1.0 - eta) / 4.0 * np.eye(2)
    return out


def build_round(protocol, channel, detector):
    """Assemble the three-mode round state and its reductions.

    Pipeline: vacuum(A) tensor TMS(E1, E2) with n_eve = 2 nbar/(1-tau);
    squeeze A (rotation pi for p-encoding); beam-split A against E1 with
    transmissivity tau; apply the detector to Bob's block; ensemble
    variants add the classical modulation covariance sigma_A^2 to the
    encoded quadrature (tau-weighted on Bob, (1-tau)-weighted on E1, with
    the corresponding negative cross term).
    """
    tau, nbar = channel.tau, channel.nbar
    if tau == 1.0 and nbar > 0:
        raise ValueError("inconsistent channel: tau = 1 with nbar > 0")
    r, sigma_s2, sigma_as2, sigma_a2 = protocol.variances

    n_eve = 2.0 * nbar / (1.0 - tau) if tau < 1.0 else 0.0
    start = gaussian.tensor(gaussian.vacuum_state(1),
                            gaussian.two_mode_squeezed_state(n_eve))
    phi = 0.0 if protocol.basis == "q" else np.pi
    state = gaussian.apply(start, gaussian.squeeze_rotate_transform(r, phi, 0, 3))
    state = gaussian.apply(state, gaussian.beam_splitter_transform(tau, 0, 1, 3))

    qi = QUAD_INDEX[protocol.basis]
    proj = np.zeros((2, 2))
    proj[qi, qi] = 1.0

    cov_cond = _apply_detector(state.cov, detector)

    # classical averaging over the Gaussian symbol distribution: the signal
    # quadrature picks up the modulation variance split by the beam splitter
    mod = np.zeros((6, 6))
    mod[0:2, 0:2] = tau * sigma_a2 * proj
    mod[2:4, 2:4] = (1.0 - tau) * sigma_a2 * proj
    cross = -np.sqrt(tau * (1.0 - tau)) * sigma_a2 * proj
    mod[0:2, 2:4] = cross
    mod[2:4, 0:2] = cross
    cov_ens = _apply_detector(state.cov + mod, detector)

    joint_cond = GaussianState(3, state.mean, cov_cond)
    joint_ens = GaussianState(3, state.mean, cov_ens)

    bob_conditional = gaussian.reduce(joint_cond, [0])
    eve_conditional = gaussian.reduce(joint_cond, [1, 2])
    bob_ensemble = gaussian.reduce(joint_ens, [0])
    eve_ensemble = gaussian.reduce(joint_ens, [1, 2])

    return RoundStates(
        bob_conditional=bob_conditional,
        bob_ensemble=bob_ensemble,
        eve_conditional=eve_conditional,
        eve_ensemble=eve_ensemble,
        joint_ensemble=joint_ens,
        sigma_b2=float(bob_ensemble.cov[qi, qi]),
        basis=protocol.basis,
    )
