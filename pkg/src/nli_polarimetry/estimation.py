"""Sample-parameter recovery from simulated count records.

Three estimation routes are provided: harmonic regression of the dual-rate
scan (transmissions from peak magnitudes, phases from peak arguments),
sinusoid fits of the two analyzer settings for a rotated sample with the
algebraic amplitude relations, and a conic-constrained Lissajous-ellipse fit
that needs no absolute phase reference.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .angles import wrap_axis, wrap_half_pi, wrap_pi
from .scan import TimeSeries

__all__ = [
    "EstimationError",
    "UnidentifiableError",
    "HarmonicDecomposition",
    "SampleEstimate",
    "SinusoidFit",
    "RotatedRecovery",
    "EllipseFit",
    "harmonic_regress",
    "extract_sample_fourier",
    "fit_sinusoid",
    "recover_rotated_params",
    "estimate_rotated",
    "fit_ellipse",
    "estimate_ellipse",
]

ROTATED_ASSUMPTIONS = ("isotropic_phase", "isotropic_attenuation", "general")


class EstimationError(RuntimeError):
    """Estimator failure; ``flag`` names the failure mode."""

    def __init__(self, message: str, flag: str = "estimation_failed"):
        super().__init__(message)
        self.flag = flag


class UnidentifiableError(EstimationError):
    """The requested parameter is not determined by the data."""


@dataclass(frozen=True)
class HarmonicDecomposition:
    """Least-squares harmonic content of a dual-rate scan.

    Complex amplitudes use the cosine-phase convention
    ``counts ~ dc + Re[amp_half e^{i w t/2}] + Re[amp_threehalf e^{i 3w t/2}]``.
    """

    dc: float
    omega_scan: float
    amp_half: complex
    amp_threehalf: complex
    residual_rms: float


@dataclass
class SampleEstimate:
    """Recovered sample parameters with diagnostics.

    ``dphi`` is reported in (-pi, pi] and ``psi`` is an axis orientation in
    [0, pi) (None when the pipeline does not measure it).  The Fourier route
    reports ``phibar`` modulo pi in (-pi/2, pi/2] -- the mean of two phases
    defined mod 2*pi carries an intrinsic half-turn ambiguity -- while the
    rotated-sample route reports it in (-pi, pi] under its positive-cosine
    fringe gauge.
    """

    t_perp: float
    t_par: float
    tbar: float
    dt: float
    phibar: float | None
    dphi: float
    psi: float | None = None
    residuals: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "t_perp": self.t_perp,
            "t_par": self.t_par,
            "tbar": self.tbar,
            "dt": self.dt,
            "phibar": self.phibar,
            "dphi": self.dphi,
            "psi": self.psi,
            "residuals": self.residuals,
            "flags": list(self.flags),
        }


def _column_rate(values: np.ndarray, name: str) -> float:
    steps = np.diff(values)
    if len(steps) == 0:
        raise EstimationError(f"{name} column too short", flag="series_too_short")
    rate = float(np.median(steps))
    if np.max(np.abs(steps - rate)) > 1e-9 * max(1.0, abs(rate)):
        raise EstimationError(f"{name} column is not a uniform ramp", flag="nonuniform_scan")
    return rate


def harmonic_regress(series: TimeSeries, omega_scan: float) -> HarmonicDecomposition:
    """Fit dc plus the half- and three-half-rate harmonics to a scan record.

    Parameters
    ----------
    series : TimeSeries
        Record of an equal-rate dual scan; both phase columns must ramp at
        ``omega_scan`` rad/step.
    omega_scan : float
        Common scan rate.

    Returns
    -------
    HarmonicDecomposition
        Complex cosine-phase amplitudes at ``omega_scan/2`` and
        ``3*omega_scan/2`` plus the dc level and residual RMS.

    Raises
    ------
    EstimationError
        If the scan rates are unequal, the record covers less than one beat
        period (``4*pi/omega_scan`` steps), or the design is rank deficient.
    """
    if omega_scan <= 0.0:
        raise EstimationError("omega_scan must be positive", flag="bad_scan_rate")
    rate_signal = _column_rate(series.phi0, "phi0")
    rate_diff = _column_rate(series.delta_phase, "delta_phase")
    tol = 1e-9 * max(1.0, omega_scan)
    if abs(rate_signal - rate_diff) > tol or abs(rate_signal - omega_scan) > tol:
        raise EstimationError(
            "harmonic regression requires equal signal and differential scan rates",
            flag="unequal_scan_rates",
        )
    n = len(series)
    beat_period = 4.0 * math.pi / omega_scan
    if n < beat_period * 0.999:
        raise EstimationError(
            f"series covers {n} steps but one beat period needs {beat_period:.1f}",
            flag="series_too_short",
        )

    t = series.step.astype(float)
    design = np.column_stack(
        [
            np.ones_like(t),
            np.cos(0.5 * omega_scan * t),
            np.sin(0.5 * omega_scan * t),
            np.cos(1.5 * omega_scan * t),
            np.sin(1.5 * omega_scan * t),
        ]
    )
    singular = np.linalg.svd(design, compute_uv=False)
    if singular[-1] < 1e-10 * singular[0]:
        raise EstimationError("harmonic design matrix is rank deficient",
                              flag="rank_deficient")
    coef, _, _, _ = np.linalg.lstsq(design, series.counts, rcond=None)
    resid = series.counts - design @ coef
    return HarmonicDecomposition(
        dc=float(coef[0]),
        omega_scan=omega_scan,
        amp_half=complex(coef[1] - 1j * coef[2]),
        amp_threehalf=complex(coef[3] - 1j * coef[4]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )


def extract_sample_fourier(
    decomp: HarmonicDecomposition,
    amplitude: float,
    signal_offset: float,
    diff_offset: float,
) -> SampleEstimate:
    """Turn harmonic amplitudes into sample parameters.

    Parameters
    ----------
    decomp : HarmonicDecomposition
        Fit of the dual-rate scan (crossed quarter-wave analyzer pair and a
        lossless signal arm assumed, so the peak magnitudes are
        ``amplitude/4`` times the axis transmissions).
    amplitude : float
        Beating amplitude in count units, normally ``2 * decomp.dc``.
    signal_offset, diff_offset : float
        Calibrated phase offsets to subtract from the peak phases.

    Returns
    -------
    SampleEstimate
        Axis transmissions from the peak magnitudes; retardance and mean
        phase from the peak phases (mod 2*pi and mod pi respectively).
    """
    if amplitude <= 0.0:
        raise EstimationError("nonpositive beating amplitude", flag="bad_amplitude")
    flags: list[str] = []

    t_par = 4.0 * abs(decomp.amp_half) / amplitude
    t_perp = 4.0 * abs(decomp.amp_threehalf) / amplitude
    for name, value in (("t_par", t_par), ("t_perp", t_perp)):
        if value > 1.05:
            flags.append(f"{name}_exceeds_unity")
    t_par_c = float(np.clip(t_par, 0.0, 1.0))
    t_perp_c = float(np.clip(t_perp, 0.0, 1.0))

    weak = 1e-12 * amplitude
    if abs(decomp.amp_half) < weak or abs(decomp.amp_threehalf) < weak:
        flags.append("phase_unreliable_weak_harmonic")
    arg_eps = cmath.phase(decomp.amp_half)
    arg_kap = cmath.phase(decomp.amp_threehalf)
    dphi = float(wrap_pi(arg_kap - arg_eps - diff_offset))
    phibar = float(wrap_half_pi(0.5 * (arg_kap + arg_eps) - signal_offset))

    return SampleEstimate(
        t_perp=t_perp_c,
        t_par=t_par_c,
        tbar=0.5 * (t_perp_c + t_par_c),
        dt=t_perp_c - t_par_c,
        phibar=phibar,
        dphi=dphi,
        psi=None,
        residuals={"harmonic_rms": decomp.residual_rms},
        flags=flags,
    )


@dataclass(frozen=True)
class SinusoidFit:
    """Single-harmonic fit ``counts ~ offset*(1 + B sin(x) + C cos(x))``.

    ``x = phase_reference + phi0``.  Without an externally supplied
    reference the decomposition is gauge fixed to ``B = 0, C >= 0`` with the
    fringe phase absorbed into ``phase_reference``; a single sinusoid cannot
    separate the three quantities.
    """

    offset: float
    amp_sin: float
    amp_cos: float
    phase_reference: float
    residual_rms: float


def fit_sinusoid(series: TimeSeries, phase_reference: float | None = None) -> SinusoidFit:
    """Least-squares sinusoid fit of a control-phase scan.

    Parameters
    ----------
    series : TimeSeries
        Scan of the signal-arm control phase at fixed differential phase;
        must cover at least one period with >= 8 points per period.
    phase_reference : float, optional
        Known reference phase; when given, the quadrature amplitudes are
        reported in the frame ``x = phase_reference + phi0``.

    Returns
    -------
    SinusoidFit
    """
    if np.ptp(series.delta_phase) > 1e-12:
        raise EstimationError("sinusoid fit expects a pure control-phase scan",
                              flag="mixed_scan")
    rate = _column_rate(series.phi0, "phi0")
    if abs(rate) <= 0.0:
        raise EstimationError("control phase does not ramp", flag="bad_scan_rate")
    points_per_period = 2.0 * math.pi / abs(rate)
    if points_per_period < 8.0 - 1e-9:
        raise EstimationError("fewer than 8 points per fringe period",
                              flag="undersampled")
    if len(series) * abs(rate) < 2.0 * math.pi * 0.999:
        raise EstimationError("scan must cover at least one fringe period",
                              flag="series_too_short")

    x = series.phi0
    design = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)])
    coef, _, _, _ = np.linalg.lstsq(design, series.counts, rcond=None)
    resid = series.counts - design @ coef
    dc, a, b = (float(c) for c in coef)
    if dc <= 0.0:
        raise EstimationError("nonpositive mean count level", flag="bad_amplitude")
    harmonic = complex(a - 1j * b) / dc
    rms = float(np.sqrt(np.mean(resid**2)))

    if phase_reference is None:
        return SinusoidFit(
            offset=dc,
            amp_sin=0.0,
            amp_cos=abs(harmonic),
            phase_reference=cmath.phase(harmonic) if abs(harmonic) > 0 else 0.0,
            residual_rms=rms,
        )
    z = harmonic * cmath.exp(-1j * phase_reference)
    return SinusoidFit(
        offset=dc,
        amp_sin=-z.imag,
        amp_cos=z.real,
        phase_reference=float(phase_reference),
        residual_rms=rms,
    )


@dataclass(frozen=True)
class RotatedRecovery:
    """Sample parameters recovered from the two-setting fringe amplitudes."""

    tbar: float
    dt: float
    dphi: float
    residual: float
    flags: list


def recover_rotated_params(b1: float, c1: float, b2: float, c2: float) -> RotatedRecovery:
    """Invert the two-setting amplitude relations.

    Applies the flip ``(c1, c2) -> (-c1, -c2)`` when ``c1 < 0`` (the mean
    transmission must be positive; the retardance is then only known up to
    a full turn).  The returned residual compares the inputs against the
    amplitudes regenerated from the recovered parameters.
    """
    flags: list[str] = []
    scale = max(abs(b1), abs(c1), abs(b2), abs(c2))
    if scale == 0.0:
        raise UnidentifiableError("all fringe amplitudes vanish",
                                  flag="tbar_unidentifiable")
    tol = 1e-12 * scale
    if c1 < 0.0:
        c1, c2 = -c1, -c2
        flags.append("c1_flipped_retardance_mod_2pi")
    if abs(c1) <= tol and abs(b2) <= tol:
        raise UnidentifiableError("mean-transmission amplitudes vanish",
                                  flag="tbar_unidentifiable")

    dphi = -2.0 * math.atan2(b2, c1)
    tbar = math.hypot(b2, c1)
    if abs(c2) <= tol:
        if abs(b1) <= tol:
            dt = 0.0
        else:
            dt = 2.0 * abs(b1)
            flags.append("dt_sign_unidentified_at_half_turn")
    else:
        dt = 2.0 * math.copysign(math.hypot(b1, c2), c2)

    half = 0.5 * dphi
    pred = (
        -0.5 * dt * math.sin(half),
        tbar * math.cos(half),
        -tbar * math.sin(half),
        0.5 * dt * math.cos(half),
    )
    residual = max(abs(p - q) for p, q in zip(pred, (b1, c1, b2, c2)))
    return RotatedRecovery(tbar=tbar, dt=dt, dphi=dphi, residual=residual, flags=flags)


def _normalized_harmonic(series: TimeSeries) -> tuple[float, complex, float]:
    fit = fit_sinusoid(series)
    w = fit.amp_cos * cmath.exp(1j * fit.phase_reference)
    return fit.offset, w, fit.residual_rms


def estimate_rotated(
    series_setting1: TimeSeries,
    series_setting2: TimeSeries,
    assume: str = "isotropic_phase",
    phibar: float | None = None,
) -> SampleEstimate:
    """Two-setting estimation of a rotated sample.

    Each control-phase scan pins one complex fringe amplitude, i.e. four
    real numbers for the five unknowns (tbar, dt, dphi, phibar, psi), so a
    structural assumption closes the system:

    - ``"isotropic_phase"``: no birefringence (dphi = 0); nonnegative
      diattenuation fixes the axis labelling.
    - ``"isotropic_attenuation"``: no diattenuation (dt = 0); nonnegative
      retardance fixes the labelling.
    - ``"general"``: both effects present; requires the sample's mean phase
      ``phibar`` from an independent measurement.  Even then two parameter
      sets reproduce the data exactly (the setting-2 quadratures can be
      assigned either way round); the larger cosine-amplitude root is
      returned and the ambiguity flagged.

    The swap of the two sample axes maps (psi, dt, dphi) to
    (psi + pi/2, -dt, -dphi) and produces identical data; estimates are
    reported in the canonical branch with ``psi`` in [0, pi).
    """
    if assume not in ROTATED_ASSUMPTIONS:
        raise EstimationError(f"unknown assumption {assume!r}", flag="bad_assumption")
    dc1, w1, rms1 = _normalized_harmonic(series_setting1)
    dc2, w2, rms2 = _normalized_harmonic(series_setting2)
    flags: list[str] = []

    if assume == "general":
        if phibar is None:
            raise EstimationError(
                "general mode needs the mean sample phase from an independent "
                "measurement",
                flag="phibar_required",
            )
        z1 = w1 * cmath.exp(-1j * phibar)
        b1, c1 = -z1.imag, z1.real
        z2 = w2 * cmath.exp(-1j * phibar)
        s = abs(z2) ** 2
        m = b1 * c1
        disc = s * s - 4.0 * m * m
        if disc < -1e-9 * max(s * s, 1.0):
            raise EstimationError(
                "fringe amplitudes are inconsistent with the two-setting model",
                flag="inconsistent_amplitudes",
            )
        disc = max(disc, 0.0)
        c2sq = 0.5 * (s + math.sqrt(disc))
        c2 = math.sqrt(c2sq)
        if c2 > 1e-12:
            b2 = m / c2
        else:
            b2 = -math.sqrt(max(s, 0.0))
        flags.append("general_mode_root_choice")
        psi = float(wrap_axis(0.5 * (cmath.phase(complex(c2, -b2)) - cmath.phase(z2))))
        phib = float(phibar)
    else:
        c1 = abs(w1)
        b1 = 0.0
        phib = cmath.phase(w1) if abs(w1) > 0 else 0.0
        if assume == "isotropic_phase":
            c2 = abs(w2)
            b2 = 0.0
            psi = float(wrap_axis(0.5 * (phib - cmath.phase(w2)))) if abs(w2) > 0 else None
            if abs(w2) == 0.0:
                flags.append("psi_unidentified_no_diattenuation_fringe")
        else:
            b2 = -abs(w2)
            c2 = 0.0
            psi = (
                float(wrap_axis(0.5 * (phib - cmath.phase(w2) + 0.5 * math.pi)))
                if abs(w2) > 0
                else None
            )
            if abs(w2) == 0.0:
                flags.append("psi_unidentified_no_retardance_fringe")

    rec = recover_rotated_params(b1, c1, b2, c2)
    flags.extend(rec.flags)
    if "c1_flipped_retardance_mod_2pi" in rec.flags and psi is not None:
        # the flip re-gauges the fringe reference by a half turn, which the
        # setting-2 phase absorbs as a quarter-turn of the sample orientation
        psi = float(wrap_axis(psi + 0.5 * math.pi))
    t_perp = rec.tbar + 0.5 * rec.dt
    t_par = rec.tbar - 0.5 * rec.dt
    return SampleEstimate(
        t_perp=t_perp,
        t_par=t_par,
        tbar=rec.tbar,
        dt=rec.dt,
        phibar=float(wrap_pi(phib)),
        dphi=float(wrap_pi(rec.dphi)),
        psi=psi,
        residuals={
            "fit_rms_setting1": rms1,
            "fit_rms_setting2": rms2,
            "amplitude_consistency": rec.residual,
        },
        flags=flags,
    )


@dataclass(frozen=True)
class EllipseFit:
    """Direct conic fit of the Lissajous curve traced by the two settings.

    ``conic`` holds (a, b, c, d, e, f) of a x^2 + b xy + c y^2 + d x + e y
    + f = 0 in normalized coordinates; ``amp_x``/``amp_y`` are the harmonic
    magnitudes of the two coordinates relative to their dc levels and
    ``rel_phase`` the signed phase lag of the second coordinate.
    """

    conic: tuple
    center: tuple
    semi_axes: tuple
    tilt: float
    amp_x: float
    amp_y: float
    rel_phase: float
    b1: float
    c1: float
    b2: float
    c2: float
    psi: float
    flux_scale: float
    residual: float
    flags: list


def _direct_ellipse_fit(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Ellipse-constrained direct least-squares conic fit.

    Solves the quadratic-constraint eigenproblem on the scatter matrices
    (numerically stable block formulation); returns (a, b, c, d, e, f).
    """
    d1 = np.column_stack([x * x, x * y, y * y])
    d2 = np.column_stack([x, y, np.ones_like(x)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("degenerate point configuration",
                              flag="degenerate_conic") from exc
    m = s1 + s2 @ t
    c1inv = np.array([[0.0, 0.0, 0.5], [0.0, -1.0, 0.0], [0.5, 0.0, 0.0]])
    vals, vecs = np.linalg.eig(c1inv @ m)
    best = None
    for k in range(3):
        if abs(vals[k].imag) > 1e-8 * (1.0 + abs(vals[k].real)):
            continue
        v = np.real(vecs[:, k])
        constraint = 4.0 * v[0] * v[2] - v[1] ** 2
        if constraint > 0.0:
            best = v / math.sqrt(constraint)
    if best is None:
        raise EstimationError("no ellipse solution found", flag="degenerate_conic")
    return np.concatenate([best, t @ best])


def fit_ellipse(points: np.ndarray, assume: str = "isotropic_phase") -> EllipseFit:
    """Fit the parametric fringe ellipse and map it back to sample parameters.

    Parameters
    ----------
    points : array, shape (n, 2)
        Joint samples (N1, N2) of the two analyzer-setting signals, ordered
        along the control-phase scan and covering at least one period.  The
        ordering only sets the traversal direction (the sign of the relative
        phase); the fit itself is invariant under phase shifts of the scan.
    assume : str
        Structural assumption mapping the three shape invariants to sample
        parameters: ``"isotropic_phase"`` (no birefringence) or
        ``"isotropic_attenuation"`` (no diattenuation).

    Returns
    -------
    EllipseFit

    Raises
    ------
    EstimationError
        For fewer than 6 points, collinear points, or a non-elliptical conic.
    """
    if assume not in ("isotropic_phase", "isotropic_attenuation"):
        raise EstimationError(f"unsupported ellipse assumption {assume!r}",
                              flag="bad_assumption")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 6:
        raise EstimationError("need at least 6 (N1, N2) points",
                              flag="too_few_points")
    flags: list[str] = []

    # normalize: isotropic scaling keeps the conic fit well conditioned and
    # makes the residual scale-free
    centroid = pts.mean(axis=0)
    spread = np.sqrt(np.mean(np.sum((pts - centroid) ** 2, axis=1)))
    if spread <= 0.0:
        raise EstimationError("all points coincide", flag="degenerate_conic")
    norm = (pts - centroid) / spread
    sv = np.linalg.svd(norm - norm.mean(axis=0), compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise EstimationError("points are collinear", flag="degenerate_conic")

    conic = _direct_ellipse_fit(norm[:, 0], norm[:, 1])
    a, b, c, d, e, f = conic
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        raise EstimationError("fitted conic is not an ellipse", flag="degenerate_conic")
    design = np.column_stack(
        [norm[:, 0] ** 2, norm[:, 0] * norm[:, 1], norm[:, 1] ** 2,
         norm[:, 0], norm[:, 1], np.ones(len(norm))]
    )
    theta = conic / np.linalg.norm(conic)
    residual = float(np.sqrt(np.mean((design @ theta) ** 2)))

    # center in normalized then original coordinates
    cx = (2.0 * c * d - b * e) / disc
    cy = (2.0 * a * e - b * d) / disc
    center = (centroid[0] + spread * cx, centroid[1] + spread * cy)
    if center[0] <= 0.0 or center[1] <= 0.0:
        raise EstimationError("fringe center must be positive", flag="bad_center")

    # central form A X^2 + B XY + C Y^2 = F
    big_f = -(a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f)
    if big_f <= 0.0 or a <= 0.0 or c <= 0.0:
        a, b, c, d, e, f = (-v for v in (a, b, c, d, e, f))
        big_f = -big_f
    if big_f <= 0.0 or a <= 0.0 or c <= 0.0:
        raise EstimationError("fitted conic is not a real ellipse",
                              flag="degenerate_conic")

    # harmonic invariants of the Lissajous parametrization
    cos_rel = -b / (2.0 * math.sqrt(a * c))
    cos_rel = float(np.clip(cos_rel, -1.0, 1.0))
    sin_rel_mag = math.sqrt(max(0.0, 1.0 - cos_rel * cos_rel))
    # traversal direction from the polygon's signed area
    x0, y0 = norm[:, 0] - cx, norm[:, 1] - cy
    area = 0.5 * float(np.sum(x0 * np.roll(y0, -1) - np.roll(x0, -1) * y0))
    rel_phase = math.atan2(-math.copysign(sin_rel_mag, area), cos_rel)
    sin_sq = max(sin_rel_mag**2, 1e-300)
    amp_x_raw = spread * math.sqrt(big_f / (a * sin_sq))
    amp_y_raw = spread * math.sqrt(big_f / (c * sin_sq))
    amp_x = amp_x_raw / center[0]
    amp_y = amp_y_raw / center[1]

    if abs(cos_rel) < 1e-7 and abs(amp_x_raw - amp_y_raw) < 1e-7 * (amp_x_raw + amp_y_raw):
        flags.append("psi_unidentifiable_circle")

    # semi-axes and tilt of the ellipse itself (original units)
    lam = np.sort(np.linalg.eigvalsh(np.array([[a, b / 2.0], [b / 2.0, c]])))
    semi = (spread * math.sqrt(big_f / lam[0]), spread * math.sqrt(big_f / lam[1]))
    tilt = 0.5 * math.atan2(b, a - c)

    if assume == "isotropic_phase":
        b1, c1 = 0.0, amp_x
        b2, c2 = 0.0, amp_y
        psi = float(wrap_axis(-0.5 * rel_phase))
    else:
        b1, c1 = 0.0, amp_x
        b2, c2 = -amp_y, 0.0
        psi = float(wrap_axis(0.5 * (0.5 * math.pi - rel_phase)))

    return EllipseFit(
        conic=tuple(float(v) for v in (a, b, c, d, e, f)),
        center=(float(center[0]), float(center[1])),
        semi_axes=(float(semi[0]), float(semi[1])),
        tilt=float(tilt),
        amp_x=float(amp_x),
        amp_y=float(amp_y),
        rel_phase=float(rel_phase),
        b1=b1,
        c1=c1,
        b2=b2,
        c2=c2,
        psi=psi,
        flux_scale=float(0.25 * (center[0] + center[1])),
        residual=residual,
        flags=flags,
    )


def estimate_ellipse(
    series_setting1: TimeSeries,
    series_setting2: TimeSeries,
    assume: str = "isotropic_phase",
) -> SampleEstimate:
    """Ellipse-route estimation from the paired analyzer-setting records."""
    if len(series_setting1) != len(series_setting2):
        raise EstimationError("the two series must have matching samples",
                              flag="length_mismatch")
    points = np.column_stack([series_setting1.counts, series_setting2.counts])
    fit = fit_ellipse(points, assume=assume)
    rec = recover_rotated_params(fit.b1, fit.c1, fit.b2, fit.c2)
    flags = list(fit.flags) + rec.flags
    return SampleEstimate(
        t_perp=rec.tbar + 0.5 * rec.dt,
        t_par=rec.tbar - 0.5 * rec.dt,
        tbar=rec.tbar,
        dt=rec.dt,
        phibar=None,
        dphi=float(wrap_pi(rec.dphi)),
        psi=fit.psi,
        residuals={
            "conic_rms": fit.residual,
            "amplitude_consistency": rec.residual,
        },
        flags=flags,
    )
