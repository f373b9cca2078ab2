"""Exact algebra of bosonic mode operators over a fixed set of vacuum inputs.

Every optical element in the interferometer maps mode operators to linear
combinations of annihilation and creation operators of the six vacuum input
modes.  This module provides that linear-combination type together with the
handful of operations needed to compose elements and evaluate vacuum
expectation values of photon numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Mode(IntEnum):
    """The six vacuum input modes feeding the interferometer."""

    SIGNAL = 0        # signal input of the first crystal
    IDLER = 1         # idler input of the first crystal
    SIGNAL_TAP = 2    # open port of the signal-arm control beam splitter
    IDLER_POL = 3     # orthogonal idler polarization admitted at the first waveplate
    SAMPLE_PERP = 4   # loss port of the sample's perpendicular axis
    SAMPLE_PAR = 5    # loss port of the sample's parallel axis


N_MODES = len(Mode)


@dataclass(frozen=True)
class OperatorExpansion:
    """Linear combination of annihilation/creation operators of the input modes.

    ``ann[m]`` is the amplitude of the annihilation operator of mode ``m``,
    ``cre[m]`` the amplitude of its creation operator.  A canonical output
    mode satisfies sum|ann|^2 - sum|cre|^2 = 1.
    """

    ann: np.ndarray
    cre: np.ndarray

    def __post_init__(self):
        ann = np.asarray(self.ann, dtype=complex).copy()
        cre = np.asarray(self.cre, dtype=complex).copy()
        if ann.shape != (N_MODES,) or cre.shape != (N_MODES,):
            raise ValueError(f"amplitude arrays must have shape ({N_MODES},)")
        if not (np.all(np.isfinite(ann.view(float))) and np.all(np.isfinite(cre.view(float)))):
            raise ValueError("amplitudes must be finite")
        ann.flags.writeable = False
        cre.flags.writeable = False
        object.__setattr__(self, "ann", ann)
        object.__setattr__(self, "cre", cre)


def zero_expansion() -> OperatorExpansion:
    """Expansion with every amplitude zero (non-physical, flagged by the commutator)."""
    z = np.zeros(N_MODES, dtype=complex)
    return OperatorExpansion(z, z)


def pure_mode(mode: Mode) -> OperatorExpansion:
    """Annihilation operator of a single input mode."""
    ann = np.zeros(N_MODES, dtype=complex)
    ann[int(mode)] = 1.0
    return OperatorExpansion(ann, np.zeros(N_MODES, dtype=complex))


def adjoint(x: OperatorExpansion) -> OperatorExpansion:
    """Hermitian adjoint: swaps annihilation and creation parts and conjugates."""
    return OperatorExpansion(np.conj(x.cre), np.conj(x.ann))


def linear_combine(terms: list[tuple[complex, OperatorExpansion]]) -> OperatorExpansion:
    """Amplitude-wise weighted sum ``sum_k c_k * x_k``; needs at least one term."""
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    ann = np.zeros(N_MODES, dtype=complex)
    cre = np.zeros(N_MODES, dtype=complex)
    for coeff, x in terms:
        ann += coeff * x.ann
        cre += coeff * x.cre
    return OperatorExpansion(ann, cre)


def vacuum_photon_number(x: OperatorExpansion) -> float:
    """Vacuum expectation value <0| x^dagger x |0> = sum_m |cre[m]|^2."""
    return float(np.sum(np.abs(x.cre) ** 2))


def commutator_defect(x: OperatorExpansion) -> float:
    """(sum|ann|^2 - sum|cre|^2) - 1; vanishes for any canonical output mode."""
    return float(np.sum(np.abs(x.ann) ** 2) - np.sum(np.abs(x.cre) ** 2) - 1.0)
