"""Exact composition of the full interferometer chain.

The detected signal mode is built by operator substitution through the chain
first crystal -> control beam splitter / first waveplate -> sample axes ->
second waveplate -> second crystal, valid at any parametric gain, for blocked
or open signal arm, and for arbitrary sample rotation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .elements import (
    CrystalGain,
    SampleAxes,
    SignalControl,
    WaveplateCoeffs,
    WaveplateSetting,
    rotated_waveplate_coeffs,
    waveplate_coeffs,
)
from .mode_algebra import (
    Mode,
    OperatorExpansion,
    adjoint,
    linear_combine,
    pure_mode,
)

__all__ = [
    "InterferometerConfig",
    "OutputCoefficients",
    "detected_mode",
    "output_coefficients",
    "photon_number_exact",
    "three_path_decomposition",
]


@dataclass(frozen=True)
class InterferometerConfig:
    """Complete parameter set of one interferometer configuration.

    ``rotation`` is the angle of the sample's axes against the idler
    polarization (0 for an aligned sample).  ``check_equal_gain`` asserts at
    construction that both crystals generate the same mean photon number,
    which the closed-form signal models assume.
    """

    crystal1: CrystalGain
    crystal2: CrystalGain
    signal: SignalControl
    waveplate1: WaveplateSetting | WaveplateCoeffs
    waveplate2: WaveplateSetting | WaveplateCoeffs
    sample: SampleAxes
    rotation: float = 0.0
    check_equal_gain: bool = False

    def __post_init__(self):
        if not math.isfinite(self.rotation):
            raise ValueError("rotation must be finite")
        if self.check_equal_gain and not self.has_equal_gains:
            raise ValueError("crystal gains differ but check_equal_gain is set")

    @property
    def has_equal_gains(self) -> bool:
        g1 = self.crystal1.mean_photons
        g2 = self.crystal2.mean_photons
        return abs(g1 - g2) <= 1e-12 * max(1.0, g1, g2)

    def effective_waveplates(self) -> tuple[complex, complex, complex, complex]:
        """(tau1, rho1, tau2, rho2) with the sample rotation folded in."""
        if self.rotation == 0.0:
            t1, r1 = waveplate_coeffs(self.waveplate1)
            t2, r2 = waveplate_coeffs(self.waveplate2)
            return t1, r1, t2, r2
        return rotated_waveplate_coeffs(self.waveplate1, self.waveplate2, self.rotation)


@dataclass(frozen=True)
class OutputCoefficients:
    """Amplitudes of the detected mode over the six vacuum inputs.

    ``ann_*`` multiply annihilation operators and do not contribute photons;
    ``cre_*`` multiply creation operators and set the detected photon number.
    """

    ann_signal: complex
    cre_idler: complex
    ann_signal_tap: complex
    cre_idler_pol: complex
    cre_sample_perp: complex
    cre_sample_par: complex

    @property
    def photon_number(self) -> float:
        return (
            abs(self.cre_idler) ** 2
            + abs(self.cre_idler_pol) ** 2
            + abs(self.cre_sample_perp) ** 2
            + abs(self.cre_sample_par) ** 2
        )

    @property
    def commutator_defect(self) -> float:
        return (
            abs(self.ann_signal) ** 2
            + abs(self.ann_signal_tap) ** 2
            - self.photon_number
            - 1.0
        )


def detected_mode(cfg: InterferometerConfig) -> OperatorExpansion:
    """Detected signal mode as an operator expansion over the vacuum inputs."""
    u1, v1 = cfg.crystal1.u, cfg.crystal1.v
    u2, v2 = cfg.crystal2.u, cfg.crystal2.v
    ts = complex(cfg.signal.transmission)
    rs = cfg.signal.reflection
    tau1, rho1, tau2, rho2 = cfg.effective_waveplates()
    t_perp, t_par = cfg.sample.t_perp, cfg.sample.t_par
    r_perp, r_par = cfg.sample.r_perp, cfg.sample.r_par

    a_sig = pure_mode(Mode.SIGNAL)
    a_idl = pure_mode(Mode.IDLER)

    # first crystal
    gen_sig = linear_combine([(u1, a_sig), (v1, adjoint(a_idl))])
    gen_idl = linear_combine([(u1, a_idl), (v1, adjoint(a_sig))])

    # signal arm: control beam splitter
    ctrl_sig = linear_combine([(ts, gen_sig), (rs, pure_mode(Mode.SIGNAL_TAP))])

    # idler arm: first waveplate splits into the two sample axes
    pol_vac = pure_mode(Mode.IDLER_POL)
    comp_perp = linear_combine([(tau1, gen_idl), (rho1, pol_vac)])
    comp_par = linear_combine([(-np.conj(rho1), gen_idl), (np.conj(tau1), pol_vac)])

    # sample axes act as independent lossy beam splitters
    out_perp = linear_combine([(t_perp, comp_perp), (r_perp, pure_mode(Mode.SAMPLE_PERP))])
    out_par = linear_combine([(t_par, comp_par), (r_par, pure_mode(Mode.SAMPLE_PAR))])

    # second waveplate recombines onto the original idler polarization
    seed_idl = linear_combine([(tau2, out_perp), (rho2, out_par)])

    # second crystal mixes the seeded signal and idler
    return linear_combine([(u2, ctrl_sig), (v2, adjoint(seed_idl))])


def output_coefficients(cfg: InterferometerConfig) -> OutputCoefficients:
    """The six nonzero amplitudes of the detected mode."""
    d = detected_mode(cfg)
    return OutputCoefficients(
        ann_signal=complex(d.ann[Mode.SIGNAL]),
        cre_idler=complex(d.cre[Mode.IDLER]),
        ann_signal_tap=complex(d.ann[Mode.SIGNAL_TAP]),
        cre_idler_pol=complex(d.cre[Mode.IDLER_POL]),
        cre_sample_perp=complex(d.cre[Mode.SAMPLE_PERP]),
        cre_sample_par=complex(d.cre[Mode.SAMPLE_PAR]),
    )


def photon_number_exact(cfg: InterferometerConfig) -> float:
    """Detected photon number, exact at any gain."""
    return output_coefficients(cfg).photon_number


def three_path_decomposition(cfg: InterferometerConfig) -> tuple[complex, complex, complex]:
    """Additive contributions to the interfering amplitude.

    The photon-carrying idler amplitude is a superposition of three paths:
    the signal photon seeding the second crystal directly, and the idler
    probing the perpendicular or the parallel sample axis.  Their sum equals
    ``output_coefficients(cfg).cre_idler``.
    """
    u1, v1 = cfg.crystal1.u, cfg.crystal1.v
    u2, v2 = cfg.crystal2.u, cfg.crystal2.v
    ts = complex(cfg.signal.transmission)
    tau1, rho1, tau2, rho2 = cfg.effective_waveplates()

    signal_path = u2 * ts * v1
    perp_path = v2 * np.conj(tau2 * cfg.sample.t_perp * tau1) * u1
    par_path = -v2 * np.conj(rho2 * cfg.sample.t_par) * rho1 * u1
    return complex(signal_path), complex(perp_path), complex(par_path)


def with_scan_phases(
    cfg: InterferometerConfig, signal_phase: float, diff_phase: float
) -> InterferometerConfig:
    """Imprint scan phases: ``signal_phase`` on the control beam splitter and
    an antisymmetric ``diff_phase`` between the sample's axes (mean idler
    phase unchanged)."""
    new_signal = SignalControl(cfg.signal.transmission * cmath.exp(1j * signal_phase))
    new_sample = SampleAxes(
        t_perp=cfg.sample.t_perp * cmath.exp(0.5j * diff_phase),
        t_par=cfg.sample.t_par * cmath.exp(-0.5j * diff_phase),
    )
    return replace(cfg, signal=new_signal, sample=new_sample)
