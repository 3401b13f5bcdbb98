"""Physical link models: thermal background, path loss, weather attenuation.

Converts a link description (band, frequency, distance, antennas,
temperature, weather) into the two numbers the security layer cares
about — the channel transmissivity tau and the output-referred quadrature
noise nbar — plus attenuation budgets in dB/km for reporting.

Band conventions
----------------
* microwave: carrier around 5 GHz, clear-air attenuation 6.3e-3 dB/km.
  Rain follows the ITU-R P.838-3 power law k(f) * R^alpha(f); haze couples
  the liquid-water content of the aerosol to a cloud-attenuation
  coefficient K_l(f) from a double-Debye water-permittivity model at 300 K.
  The weather models are trusted for 1-10 GHz only and refuse to
  extrapolate outside that range.
* telecom: carrier 193.55 THz (1550 nm window), clear-air attenuation
  0.202 dB/km.  Rain adds the wavelength-independent 1.076 * R^0.67 dB/km;
  haze follows the Kruse visibility power law, which already subsumes the
  clear-air scattering floor (at clear visibility ~23 km it reproduces the
  0.202 dB/km baseline, so only the amount above that baseline is counted
  as weather excess).

The noise convention: a thermal environment mode with mean occupation
nbar_th couples through the loss beam splitter, contributing
nbar = (1 - tau) * nbar_th / 2 in quadrature-variance units at the
channel output (so nbar -> nbar_th/2 for an opaque path).
"""

import csv
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

# CODATA 2018 exact SI values
PLANCK_H = 6.62607015e-34
BOLTZMANN_K = 1.380649e-23
LIGHT_SPEED = 299792458.0

LN10 = np.log(10.0)

MICROWAVE_DEFAULT_HZ = 5.0e9
TELECOM_DEFAULT_HZ = 1.9355e14

CLEAR_AIR_DB_KM = {"microwave": 6.3e-3, "telecom": 0.202}

# liquid-water content of haze: M = (a/V)^b g/m^3 for visibility V in km
HAZE_LWC_A = -np.log10(0.02) / 99.0
HAZE_LWC_B = 1.0 / 0.92

# Kruse scattering prefactor 39.1 * log10(e)
KRUSE_C = 39.1 * np.log10(np.e)

MICROWAVE_WEATHER_RANGE_GHZ = (1.0, 10.0)

COEFF_DIR_ENV = "AIRQKD_COEFF_DIR"


class OutOfModelError(ValueError):
    """Raised when inputs fall outside the validity range of an empirical model."""


@dataclass(frozen=True)
class WeatherCondition:
    """clear | rain(rate mm/h) | haze(visibility km)."""

    kind: str = "clear"
    rain_rate_mm_h: float = None
    visibility_km: float = None

    def __post_init__(self):
        if self.kind not in ("clear", "rain", "haze"):
            raise ValueError(f"unknown weather kind {self.kind!r}")
        if self.kind == "rain":
            if self.rain_rate_mm_h is None or self.rain_rate_mm_h <= 0:
                raise ValueError("weather.rain.rain_rate_mm_h must be > 0")
        if self.kind == "haze":
            if self.visibility_km is None or self.visibility_km <= 0:
                raise ValueError("weather.haze.visibility_km must be > 0")

    @classmethod
    def clear(cls):
        return cls("clear")

    @classmethod
    def rain(cls, rate_mm_h):
        return cls("rain", rain_rate_mm_h=float(rate_mm_h))

    @classmethod
    def haze(cls, visibility_km):
        return cls("haze", visibility_km=float(visibility_km))


@dataclass(frozen=True)
class LinkScenario:
    """One directional open-air link."""

    band: str
    distance_m: float
    frequency_hz: float = None
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    temperature_k: float = 300.0
    weather: WeatherCondition = field(default_factory=WeatherCondition.clear)

    def __post_init__(self):
        if self.band not in ("microwave", "telecom"):
            raise ValueError(f"band must be 'microwave' or 'telecom', got {self.band!r}")
        if self.frequency_hz is None:
            default = MICROWAVE_DEFAULT_HZ if self.band == "microwave" else TELECOM_DEFAULT_HZ
            object.__setattr__(self, "frequency_hz", default)
        if self.frequency_hz <= 0:
            raise ValueError("frequency_hz must be > 0")
        if self.distance_m < 0:
            raise ValueError("distance_m must be >= 0")
        if self.temperature_k <= 0:
            raise ValueError("temperature_k must be > 0")
        if self.gain_tx < 0 or self.gain_rx < 0:
            raise ValueError("antenna gains must be >= 0")

    @property
    def wavelength_m(self):
        return LIGHT_SPEED / self.frequency_hz


@dataclass(frozen=True)
class AttenuationBudget:
    """Specific attenuation split into clear-air and weather parts, dB/km."""

    clear_air_db_km: float
    weather_excess_db_km: float
    total_db_km: float

    def __post_init__(self):
        if self.clear_air_db_km < 0 or self.weather_excess_db_km < 0:
            raise ValueError("attenuation components must be >= 0")
        if abs(self.total_db_km - self.clear_air_db_km - self.weather_excess_db_km) > 1e-12:
            raise ValueError("total must equal clear_air + weather_excess")


@dataclass(frozen=True)
class ChannelParams:
    """Quantum-channel parameters seen by the protocol layer."""

    tau: float
    nbar: float
    nbar_th: float

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.nbar < 0 or self.nbar_th < 0:
            raise ValueError("noise occupations must be >= 0")
        if self.tau == 1.0 and self.nbar > 0:
            raise ValueError("inconsistent channel: tau = 1 requires nbar = 0")


def planck_occupancy(frequency_hz, temperature_k):
    """Mean thermal photon number 1/(exp(hf/kT) - 1)."""
    if frequency_hz <= 0 or temperature_k <= 0:
        raise ValueError("frequency and temperature must be positive")
    x = PLANCK_H * frequency_hz / (BOLTZMANN_K * temperature_k)
    return 1.0 / np.expm1(x)


def path_loss_db(scenario):
    """Friis free-space budget 10 log10(Gt Gr (lambda / 4 pi d)^2), signed dB.

    Diagnostic only: the channel transmissivity assumes the antenna gains
    compensate this geometric loss, leaving atmospheric attenuation as the
    effective loss mechanism.
    """
    if scenario.distance_m <= 0:
        raise ValueError("path loss is singular at zero distance")
    lam = scenario.wavelength_m
    amp = scenario.gain_tx * scenario.gain_rx * (lam / (4.0 * np.pi * scenario.distance_m)) ** 2
    return 10.0 * np.log10(amp)


def antenna_directivity(area_m2, wavelength_m, aperture_efficiency):
    """Aperture directivity D = 4 pi A e_A / lambda^2 (linear)."""
    if area_m2 <= 0 or wavelength_m <= 0:
        raise ValueError("area and wavelength must be positive")
    if not 0.0 <= aperture_efficiency <= 1.0:
        raise ValueError("aperture efficiency must lie in [0, 1]")
    return 4.0 * np.pi * area_m2 * aperture_efficiency / wavelength_m ** 2


def antenna_gain(radiation_efficiency, directivity):
    """Realized gain G = eta_rad * D (linear)."""
    if not 0.0 <= radiation_efficiency <= 1.0:
        raise ValueError("radiation efficiency must lie in [0, 1]")
    return radiation_efficiency * directivity


# ---------------------------------------------------------------------------
# weather coefficient tables

def _table_path(name):
    override = os.environ.get(COEFF_DIR_ENV)
    if override:
        return os.path.join(override, name)
    return resources.files("airqkd").joinpath("data", name)


def _read_table(name, columns):
    path = _table_path(name)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [[float(row[c]) for c in columns] for row in reader]
    arr = np.array(rows)
    return tuple(arr[:, i] for i in range(arr.shape[1]))


@lru_cache(maxsize=None)
def _rain_table():
    return _read_table("rain_itu_p838.csv", ("frequency_ghz", "k_h", "alpha_h"))


@lru_cache(maxsize=None)
def _cloud_table():
    return _read_table("cloud_lwc.csv", ("frequency_ghz", "K_l"))


def rain_coefficients(frequency_ghz):
    """ITU-R P.838-3 horizontal-polarization (k, alpha) at the given frequency.

    k interpolates log-log in frequency, alpha linearly against log f, the
    interpolation scheme recommended alongside the coefficient table.
    """
    f, k, alpha = _rain_table()
    if not f[0] <= frequency_ghz <= f[-1]:
        raise OutOfModelError(
            f"rain coefficients tabulated for {f[0]:g}-{f[-1]:g} GHz, "
            f"got {frequency_ghz:g} GHz")
    lf = np.log10(frequency_ghz)
    k_i = 10.0 ** np.interp(lf, np.log10(f), np.log10(k))
    a_i = np.interp(lf, np.log10(f), alpha)
    return k_i, a_i


def cloud_attenuation_coefficient(frequency_ghz):
    """K_l(f) in (dB/km)/(g/m^3), log-frequency interpolated, 300 K table."""
    f, kl = _cloud_table()
    if not f[0] <= frequency_ghz <= f[-1]:
        raise OutOfModelError(
            f"cloud coefficients tabulated for {f[0]:g}-{f[-1]:g} GHz, "
            f"got {frequency_ghz:g} GHz")
    return 10.0 ** np.interp(np.log10(frequency_ghz), np.log10(f), np.log10(kl))


def haze_liquid_water(visibility_km):
    """Aerosol liquid-water content M = (a/V)^b in g/m^3."""
    if visibility_km <= 0:
        raise ValueError("visibility must be > 0")
    return (HAZE_LWC_A / visibility_km) ** HAZE_LWC_B


def kruse_attenuation(visibility_km, wavelength_nm):
    """Kruse visibility power law (C/V) (lambda/550)^-p(V), dB/km."""
    v = visibility_km
    if v > 50.0:
        p = 1.6
    elif v > 6.0:
        p = 1.3
    elif v > 1.0:
        p = 0.16 * v + 0.34
    elif v > 0.5:
        p = v - 0.5
    else:
        p = 0.0
    return (KRUSE_C / v) * (wavelength_nm / 550.0) ** (-p)


def _check_microwave_range(frequency_ghz):
    lo, hi = MICROWAVE_WEATHER_RANGE_GHZ
    if not lo <= frequency_ghz <= hi:
        raise OutOfModelError(
            f"microwave weather models are valid for {lo:g}-{hi:g} GHz, "
            f"got {frequency_ghz:g} GHz")


def specific_attenuation(band, frequency_hz, weather):
    """Specific attenuation budget (dB/km) for a band under given weather."""
    if band not in CLEAR_AIR_DB_KM:
        raise ValueError(f"band must be 'microwave' or 'telecom', got {band!r}")
    clear = CLEAR_AIR_DB_KM[band]
    if weather.kind == "clear":
        excess = 0.0
    elif band == "microwave":
        f_ghz = frequency_hz / 1e9
        _check_microwave_range(f_ghz)
        if weather.kind == "rain":
            k, alpha = rain_coefficients(f_ghz)
            excess = k * weather.rain_rate_mm_h ** alpha
        else:
            kl = cloud_attenuation_coefficient(f_ghz)
            excess = kl * haze_liquid_water(weather.visibility_km)
    else:
        if weather.kind == "rain":
            excess = 1.076 * weather.rain_rate_mm_h ** 0.67
        else:
            # the Kruse term includes the clear-sky scattering floor, so only
            # the amount above the clear-air baseline counts as excess
            lam_nm = LIGHT_SPEED / frequency_hz * 1e9
            excess = max(kruse_attenuation(weather.visibility_km, lam_nm) - clear, 0.0)
    total = clear + excess
    return AttenuationBudget(clear, excess, total)


def transmissivity(gamma_db_km, distance_m):
    """Beer-Lambert transmissivity 10^(-gamma d / 10) for d in meters.

    Uses the exp/expm1 route so 1 - tau keeps full relative precision for
    short links, where gamma*d/10 can be far below 1e-6.  The result is
    floored at the smallest positive double: tau is contractually in
    (0, 1], and heavy-weather scans can push 10^(-gamma d/10) below the
    underflow threshold.
    """
    if gamma_db_km < 0 or distance_m < 0:
        raise ValueError("attenuation and distance must be >= 0")
    x = LN10 / 10.0 * gamma_db_km * (distance_m / 1000.0)
    return max(float(np.exp(-x)), 5e-324)


def channel_params(scenario):
    """Quantum-channel (tau, nbar) for a link scenario.

    tau comes from the total specific attenuation over the path length;
    nbar = (1 - tau) * nbar_th / 2 is the thermal background referred to
    the channel output in quadrature-variance units, with nbar_th the
    Planck occupation at the carrier frequency and link temperature.
    """
    budget = specific_attenuation(scenario.band, scenario.frequency_hz, scenario.weather)
    x = LN10 / 10.0 * budget.total_db_km * (scenario.distance_m / 1000.0)
    tau = max(float(np.exp(-x)), 5e-324)
    one_minus_tau = float(-np.expm1(-x))
    nbar_th = planck_occupancy(scenario.frequency_hz, scenario.temperature_k)
    nbar = one_minus_tau * nbar_th / 2.0
    if tau == 1.0:
        nbar = 0.0
    return ChannelParams(tau=tau, nbar=nbar, nbar_th=nbar_th)
