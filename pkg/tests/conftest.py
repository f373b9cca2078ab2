import math

import numpy as np
import pytest

from nli_polarimetry import (
    CrystalGain,
    InterferometerConfig,
    SampleAxes,
    SignalControl,
    WaveplateSetting,
)


def random_config(rng: np.random.Generator, *, equal_gains: bool = False,
                  v_low: float = 0.0, v_high: float = 5.0,
                  rotation: bool = True) -> InterferometerConfig:
    """Draw a random but valid interferometer configuration."""
    v1 = rng.uniform(v_low, v_high)
    v2 = v1 if equal_gains else rng.uniform(v_low, v_high)
    two_pi = 2.0 * math.pi
    sample = SampleAxes(
        t_perp=rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, two_pi)),
        t_par=rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, two_pi)),
    )
    return InterferometerConfig(
        crystal1=CrystalGain(v1, rng.uniform(0.0, two_pi)),
        crystal2=CrystalGain(v2, rng.uniform(0.0, two_pi)),
        signal=SignalControl(
            rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, two_pi))
        ),
        waveplate1=WaveplateSetting(rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)),
        waveplate2=WaveplateSetting(rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)),
        sample=sample,
        rotation=rng.uniform(0.0, two_pi) if rotation else 0.0,
    )


def angles_close(a, b, atol=1e-12):
    """Assert two angles are equal modulo 2*pi."""
    diff = np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b))))
    np.testing.assert_allclose(diff, 0.0, atol=atol)


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
