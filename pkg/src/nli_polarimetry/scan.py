"""Phase-scan scheduling, photon-count simulation, and offset calibration.

Time is a dimensionless step index; scan rates are radians per step.  The
recorded phase columns hold only the commanded ramps -- the schedule's
offsets model the unknown interferometer phases and reach the estimator
only through calibration.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .angles import wrap_pi
from .interferometer import InterferometerConfig, photon_number_exact, with_scan_phases
from .signals import beating_parameters

__all__ = [
    "ScanSchedule",
    "NoiseModel",
    "TimeSeries",
    "Calibration",
    "CalibrationError",
    "fourier_protocol_schedule",
    "simulate_scan",
    "calibrate",
]

CSV_COLUMNS = ("step", "phi0", "delta_phase", "expected_N", "counts")


class CalibrationError(RuntimeError):
    """Raised when the calibration scans cannot pin the phase offsets."""


@dataclass(frozen=True)
class ScanSchedule:
    """Dual phase-scan schedule.

    ``signal_offset``/``diff_offset`` are the unknown phase offsets of the
    signal arm and of the idler differential phase at step zero;
    ``signal_rate``/``diff_rate`` are the commanded ramps in rad/step.
    """

    signal_offset: float = 0.0
    diff_offset: float = 0.0
    signal_rate: float = 0.0
    diff_rate: float = 0.0
    n_samples: int = 64

    def __post_init__(self):
        for name in ("signal_offset", "diff_offset", "signal_rate", "diff_rate"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.n_samples < 8:
            raise ValueError("n_samples must be >= 8")

    @property
    def steps(self) -> np.ndarray:
        return np.arange(self.n_samples)


def fourier_protocol_schedule(
    n_periods: int,
    samples_per_period: int,
    signal_offset: float = 0.0,
    diff_offset: float = 0.0,
) -> ScanSchedule:
    """Equal-rate schedule spanning an integer number of beat periods.

    One beat period is ``4*pi/rate`` steps, so the rate is chosen as
    ``4*pi*n_periods/n_samples``; this makes the harmonic set {0, rate/2,
    3*rate/2} exactly orthogonal on the sampled grid.
    """
    if n_periods < 1 or samples_per_period < 8:
        raise ValueError("need n_periods >= 1 and samples_per_period >= 8")
    n = n_periods * samples_per_period
    rate = 4.0 * math.pi * n_periods / n
    return ScanSchedule(
        signal_offset=signal_offset,
        diff_offset=diff_offset,
        signal_rate=rate,
        diff_rate=rate,
        n_samples=n,
    )


@dataclass(frozen=True)
class NoiseModel:
    """Detector model: counts per unit photon number plus optional shot noise."""

    counts_per_unit: float
    seed: int = 0
    mode: str = "noiseless"

    def __post_init__(self):
        if not (math.isfinite(self.counts_per_unit) and self.counts_per_unit > 0.0):
            raise ValueError("counts_per_unit must be positive")
        if self.mode not in ("noiseless", "poisson"):
            raise ValueError("mode must be 'noiseless' or 'poisson'")


@dataclass
class TimeSeries:
    """Per-step record of a phase scan.

    ``phi0`` and ``delta_phase`` hold the commanded ramps (offsets excluded);
    ``expected_n`` is the model photon number and ``counts`` the detector
    record in count units.
    """

    step: np.ndarray
    phi0: np.ndarray
    delta_phase: np.ndarray
    expected_n: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        n = len(self.step)
        for name in ("phi0", "delta_phase", "expected_n", "counts"):
            if len(getattr(self, name)) != n:
                raise ValueError("all columns must have equal length")
        if np.any(np.diff(self.step) <= 0):
            raise ValueError("step index must be strictly increasing")
        if np.any(np.asarray(self.expected_n) < 0):
            raise ValueError("expected_n must be nonnegative")

    def __len__(self) -> int:
        return len(self.step)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for k in range(len(self)):
                writer.writerow(
                    [
                        int(self.step[k]),
                        repr(float(self.phi0[k])),
                        repr(float(self.delta_phase[k])),
                        repr(float(self.expected_n[k])),
                        repr(float(self.counts[k])),
                    ]
                )

    @classmethod
    def from_csv(cls, path: str | Path) -> "TimeSeries":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader, ()))
            if header != CSV_COLUMNS:
                raise ValueError(
                    f"unexpected CSV header {header!r}; expected {CSV_COLUMNS!r}"
                )
            rows = [row for row in reader if row]
        if not rows:
            raise ValueError("empty time series")
        data = np.array([[float(x) for x in row] for row in rows])
        return cls(
            step=data[:, 0].astype(int),
            phi0=data[:, 1],
            delta_phase=data[:, 2],
            expected_n=data[:, 3],
            counts=data[:, 4],
        )


def simulate_scan(
    cfg: InterferometerConfig,
    schedule: ScanSchedule,
    noise: NoiseModel,
    regime: str = "exact",
) -> TimeSeries:
    """Run a scheduled phase scan and return the simulated count record.

    ``regime`` selects the forward model: ``"exact"`` composes the full
    transformation per step (any gain), ``"lowgain"`` evaluates the
    first-order beating formula (requires equal gains).  Counts are
    ``expected_n * counts_per_unit``, Poisson-sampled in ``"poisson"`` mode
    with a per-scan generator seeded from the noise model.
    """
    t = schedule.steps.astype(float)
    signal_phase = schedule.signal_offset + schedule.signal_rate * t
    diff_phase = schedule.diff_offset + schedule.diff_rate * t

    if regime == "lowgain":
        p = beating_parameters(cfg)
        mean = p.mean_total_phase + signal_phase
        half_diff = p.half_diff_phase + 0.5 * diff_phase
        expected = 0.5 * p.amplitude * (
            1.0
            + p.diff_visibility * np.cos(half_diff) * np.cos(mean)
            - p.mean_visibility * np.sin(half_diff) * np.sin(mean)
        )
        expected = np.maximum(expected, 0.0)
    elif regime == "exact":
        expected = np.array(
            [
                photon_number_exact(with_scan_phases(cfg, sp, dp))
                for sp, dp in zip(signal_phase, diff_phase)
            ]
        )
    else:
        raise ValueError("regime must be 'exact' or 'lowgain'")

    mean_counts = expected * noise.counts_per_unit
    if noise.mode == "poisson":
        rng = np.random.default_rng(noise.seed)
        counts = rng.poisson(mean_counts).astype(float)
    else:
        counts = mean_counts

    return TimeSeries(
        step=schedule.steps,
        phi0=schedule.signal_rate * t,
        delta_phase=schedule.diff_rate * t,
        expected_n=expected,
        counts=counts,
    )


@dataclass(frozen=True)
class Calibration:
    """Recovered interferometer phase offsets and flux scale."""

    signal_offset: float
    diff_offset: float
    flux_scale: float
    diagnostics: dict = field(default_factory=dict)


def _single_harmonic(x: np.ndarray, counts: np.ndarray) -> tuple[float, complex, float]:
    """Least-squares fit counts ~ dc + Re[Z exp(i x)]; returns (dc, Z, resid_rms)."""
    design = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)])
    coef, _, rank, _ = np.linalg.lstsq(design, counts, rcond=None)
    if rank < 3:
        raise CalibrationError("harmonic fit is rank deficient; scan span too small")
    resid = counts - design @ coef
    dc, a, b = coef
    return float(dc), complex(a - 1j * b), float(np.sqrt(np.mean(resid**2)))


def calibrate(signal_scan: TimeSeries, idler_scan: TimeSeries) -> Calibration:
    """Recover the signal-arm and differential phase offsets.

    Expects two scans taken with the sample removed and the crossed
    quarter-wave analyzer pair: one ramping only the signal arm, one ramping
    only the idler differential phase.  The empty-interferometer signal is
    ``2V[1 + cos((diff_offset + d)/2) cos(signal_offset + s)]`` where ``s``
    and ``d`` are the commanded ramps, so each scan exposes one offset as a
    fringe phase and the other through its amplitude.

    The signal therefore fixes the pair only up to the joint flip
    ``(signal_offset + pi, diff_offset -+ 2*pi)``; the branch with a
    nonnegative half-angle cosine is returned, which places the differential
    offset in [-pi, pi] and the signal offset in (-pi, pi].
    """
    if np.ptp(signal_scan.delta_phase) > 1e-12 or np.ptp(signal_scan.phi0) < 1e-12:
        raise CalibrationError("first scan must ramp only the signal arm")
    if np.ptp(idler_scan.phi0) > 1e-12 or np.ptp(idler_scan.delta_phase) < 1e-12:
        raise CalibrationError("second scan must ramp only the differential phase")
    if np.ptp(signal_scan.phi0) < 2.0 * math.pi * 0.999:
        raise CalibrationError("signal scan must span at least one fringe period")
    if np.ptp(idler_scan.delta_phase) < 4.0 * math.pi * 0.999:
        raise CalibrationError("idler scan must span at least one half-angle period")

    dc1, z1, resid1 = _single_harmonic(signal_scan.phi0, signal_scan.counts)
    dc2, z2, resid2 = _single_harmonic(0.5 * idler_scan.delta_phase, idler_scan.counts)
    flux = 0.5 * (dc1 + dc2)
    if flux <= 0.0:
        raise CalibrationError("nonpositive mean count level")

    for amp, resid, n, label in (
        (abs(z1), resid1, len(signal_scan), "signal"),
        (abs(z2), resid2, len(idler_scan), "idler"),
    ):
        floor = max(resid * math.sqrt(2.0 / n), 1e-12 * flux)
        if amp < 5.0 * floor:
            raise CalibrationError(
                f"{label} scan fringe amplitude {amp:.3g} is below 5x the noise "
                f"floor {floor:.3g}; offsets are uncalibratable"
            )

    # Z1 = flux*cos(diff/2)*exp(i*signal), Z2 = flux*cos(signal)*exp(i*diff/2).
    # Read the fringe phases, resolving each sign-of-cosine coupling, then
    # canonicalize the joint-flip equivalence to cos(diff/2) >= 0.
    signal_offset = float(wrap_pi(cmath.phase(z1)))
    half_diff = cmath.phase(z2)
    if math.cos(signal_offset) < 0.0:
        half_diff += math.pi
    half_diff = float(wrap_pi(half_diff))
    if math.cos(half_diff) < 0.0:
        signal_offset = float(wrap_pi(signal_offset + math.pi))
        half_diff = float(wrap_pi(half_diff + math.pi))

    return Calibration(
        signal_offset=signal_offset,
        diff_offset=2.0 * half_diff,
        flux_scale=flux,
        diagnostics={
            "dc_signal_scan": dc1,
            "dc_idler_scan": dc2,
            "residual_rms_signal_scan": resid1,
            "residual_rms_idler_scan": resid2,
            "amplitude_consistency": abs(flux * math.cos(half_diff) - abs(z1))
            + abs(flux * abs(math.cos(signal_offset)) - abs(z2)),
        },
    )
