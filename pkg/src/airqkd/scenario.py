"""Scenario files: schema, validation, defaults, and sweep evaluation.

A scenario is a single JSON document mirroring the domain types
one-to-one.  Example::

    {
      "name": "demo",
      "protocol": {"squeezing_db": 3.0, "reconciliation": "RR"},
      "microwave": {
        "distance_m": 100.0,
        "weather": {"kind": "rain", "rain_rate_mm_h": 7.0},
        "detector": {"bandwidth_hz": 3.0e9, "efficiency": 0.345}
      },
      "telecom": {
        "distance_m": 100.0,
        "detector": {"bandwidth_hz": 1.2e9, "efficiency": 0.53}
      },
      "sweep": [
        {"variable": "distance_m", "min": 1.0, "max": 500.0,
         "points": 100, "scale": "log"}
      ]
    }

One or both of the band blocks ("microwave", "telecom") may be present;
comparison commands need both.  Unknown keys anywhere are hard errors
naming the offending path; defaults: temperature 300 K, beta 1, clear
weather, carrier 5 GHz (microwave) / 193.55 THz (telecom), detector
efficiency 1 with the band's customary noise mode (added-noise for
microwave, pure-loss for telecom) and bandwidth (3 GHz / 1.2 GHz).

Sweep evaluation is deterministic and embarrassingly parallel: rows are
ordered band block first, then lexicographically by axis index,
regardless of how many worker threads computed them.
"""

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import link, security
from .link import LinkScenario, WeatherCondition
from .protocol import DetectorModel, ProtocolParams

BANDS = ("microwave", "telecom")

DEFAULT_BANDWIDTH_HZ = {"microwave": 3.0e9, "telecom": 1.2e9}
DEFAULT_NOISE_MODE = {"microwave": "added-noise", "telecom": "pure-loss"}

SWEEP_VARIABLES = ("distance_m", "squeezing_db", "beta", "efficiency",
                   "rain_rate_mm_h", "visibility_km")


class ScenarioError(ValueError):
    """Scenario schema violation; the message names the offending field path."""


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class Scenario:
    name: str
    protocol: ProtocolParams
    links: dict          # band -> LinkScenario
    detectors: dict      # band -> DetectorModel
    sweep: tuple = ()

    @property
    def bands(self):
        return tuple(b for b in BANDS if b in self.links)


@dataclass(frozen=True)
class ResultRow:
    """One evaluated grid point of one band block."""

    scenario: str
    axes: tuple          # (value per sweep axis), in axis order
    d_m: float
    tau: float
    nbar: float
    I_bits: float
    chi_bits: float
    K_bits: float
    R_bits_s: float
    flags: tuple = ()


def _require(cond, path, message):
    if not cond:
        raise ScenarioError(f"{path}: {message}")


def _check_keys(obj, path, allowed):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ScenarioError(
            f"unknown key{'s' if len(unknown) > 1 else ''} "
            + ", ".join(f"'{path}.{k}'" if path else f"'{k}'" for k in unknown))


def _parse_weather(obj, path):
    if obj is None:
        return WeatherCondition.clear()
    _check_keys(obj, path, ("kind", "rain_rate_mm_h", "visibility_km"))
    kind = obj.get("kind", "clear")
    _require(kind in ("clear", "rain", "haze"), f"{path}.kind",
             f"must be 'clear', 'rain' or 'haze', got {kind!r}")
    if kind == "rain":
        rate = obj.get("rain_rate_mm_h")
        _require(rate is not None and rate > 0, f"{path}.rain.rain_rate_mm_h",
                 "must be > 0")
        return WeatherCondition.rain(rate)
    if kind == "haze":
        vis = obj.get("visibility_km")
        _require(vis is not None and vis > 0, f"{path}.haze.visibility_km",
                 "must be > 0")
        return WeatherCondition.haze(vis)
    _require(obj.get("rain_rate_mm_h") is None and obj.get("visibility_km") is None,
             path, "clear weather takes no rate/visibility parameters")
    return WeatherCondition.clear()


def _parse_detector(obj, band, path):
    obj = obj or {}
    _check_keys(obj, path, ("bandwidth_hz", "efficiency", "amplifier_noise",
                            "noise_mode"))
    kwargs = dict(
        bandwidth_hz=obj.get("bandwidth_hz", DEFAULT_BANDWIDTH_HZ[band]),
        noise_mode=obj.get("noise_mode", DEFAULT_NOISE_MODE[band]),
    )
    if "efficiency" in obj:
        kwargs["efficiency"] = obj["efficiency"]
    if "amplifier_noise" in obj:
        kwargs["amplifier_noise"] = obj["amplifier_noise"]
    if "efficiency" not in obj and "amplifier_noise" not in obj:
        kwargs["efficiency"] = 1.0
    try:
        return DetectorModel(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def _parse_band(obj, band, path):
    _check_keys(obj, path, ("frequency_hz", "distance_m", "gain_tx", "gain_rx",
                            "temperature_k", "weather", "detector"))
    weather = _parse_weather(obj.get("weather"), f"{path}.weather")
    try:
        scen = LinkScenario(
            band=band,
            distance_m=obj.get("distance_m", 100.0),
            frequency_hz=obj.get("frequency_hz"),
            gain_tx=obj.get("gain_tx", 1.0),
            gain_rx=obj.get("gain_rx", 1.0),
            temperature_k=obj.get("temperature_k", 300.0),
            weather=weather,
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    det = _parse_detector(obj.get("detector"), band, f"{path}.detector")
    return scen, det


def _parse_protocol(obj, path):
    obj = obj or {}
    _check_keys(obj, path, ("squeezing_db", "basis", "beta", "reconciliation"))
    _require("squeezing_db" in obj, f"{path}.squeezing_db", "is required")
    try:
        return ProtocolParams(
            squeezing_db=obj["squeezing_db"],
            basis=obj.get("basis", "q"),
            beta=obj.get("beta", 1.0),
            reconciliation=obj.get("reconciliation", "RR"),
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def _parse_sweep(objs, path):
    axes = []
    for i, obj in enumerate(objs or []):
        apath = f"{path}[{i}]"
        _check_keys(obj, apath, ("variable", "min", "max", "points", "scale"))
        var = obj.get("variable")
        _require(var in SWEEP_VARIABLES, f"{apath}.variable",
                 f"must be one of {', '.join(SWEEP_VARIABLES)}; got {var!r}")
        lo, hi = obj.get("min"), obj.get("max")
        points = obj.get("points")
        scale = obj.get("scale", "linear")
        _require(lo is not None and hi is not None and lo < hi,
                 apath, "needs min < max")
        _require(isinstance(points, int) and points >= 2,
                 f"{apath}.points", "must be an integer >= 2")
        _require(scale in ("linear", "log"), f"{apath}.scale",
                 "must be 'linear' or 'log'")
        if scale == "log":
            _require(lo > 0, apath, "log scale needs min > 0")
        axes.append(SweepAxis(var, float(lo), float(hi), points, scale))
    return tuple(axes)


def validate_scenario(doc):
    """Build a Scenario from a parsed JSON document, applying defaults."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    _check_keys(doc, "", ("name", "protocol", "microwave", "telecom", "sweep"))
    _require("name" in doc and isinstance(doc["name"], str) and doc["name"],
             "name", "is required and must be a non-empty string")
    _require("protocol" in doc, "protocol", "block is required")
    protocol = _parse_protocol(doc["protocol"], "protocol")
    links, detectors = {}, {}
    for band in BANDS:
        if band in doc:
            links[band], detectors[band] = _parse_band(doc[band], band, band)
    _require(links, "", "at least one band block ('microwave' or 'telecom') is required")
    sweep = _parse_sweep(doc.get("sweep"), "sweep")
    return Scenario(name=doc["name"], protocol=protocol, links=links,
                    detectors=detectors, sweep=sweep)


def parse_scenario(path):
    """Load and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON ({exc})") from None
    return validate_scenario(doc)


# ---------------------------------------------------------------------------
# sweep evaluation

def _with_axis(scen, det, protocol, variable, value):
    """Apply one sweep value to a band's (link, detector, protocol) triple."""
    if variable == "distance_m":
        return replace(scen, distance_m=float(value)), det, protocol
    if variable == "squeezing_db":
        return scen, det, replace(protocol, squeezing_db=float(value))
    if variable == "beta":
        return scen, det, replace(protocol, beta=float(value))
    if variable == "efficiency":
        det = DetectorModel(bandwidth_hz=det.bandwidth_hz, efficiency=float(value),
                            noise_mode=det.noise_mode)
        return scen, det, protocol
    if variable == "rain_rate_mm_h":
        return replace(scen, weather=WeatherCondition.rain(float(value))), det, protocol
    if variable == "visibility_km":
        return replace(scen, weather=WeatherCondition.haze(float(value))), det, protocol
    raise ScenarioError(f"unsupported sweep variable {variable!r}")


def _evaluate_point(scenario, band, axis_values):
    scen = scenario.links[band]
    det = scenario.detectors[band]
    protocol = scenario.protocol
    for axis, value in zip(scenario.sweep, axis_values):
        scen, det, protocol = _with_axis(scen, det, protocol, axis.variable, value)
    chan = link.channel_params(scen)
    report = security.secret_key(protocol, chan, det)
    flags = ("insecure",) if report.secret_key <= 0 else ()
    return ResultRow(
        scenario=f"{scenario.name}/{band}",
        axes=tuple(float(v) for v in axis_values),
        d_m=scen.distance_m,
        tau=chan.tau,
        nbar=chan.nbar,
        I_bits=report.mutual_info,
        chi_bits=report.holevo,
        K_bits=report.secret_key,
        R_bits_s=report.rate_upper,
        flags=flags,
    )


def evaluate_sweep(scenario, threads=1):
    """Evaluate the scenario's sweep grid; returns rows in deterministic order.

    Rows are grouped by band block (microwave first), each group ordered
    lexicographically by axis index.  With no sweep axes a single point per
    band is evaluated at the scenario's own distances.
    """
    grids = [axis.values() for axis in scenario.sweep]
    points = list(itertools.product(*grids)) if grids else [()]
    tasks = [(band, values) for band in scenario.bands for values in points]
    if threads <= 1:
        return [_evaluate_point(scenario, band, values) for band, values in tasks]
    rows = [None] * len(tasks)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(_evaluate_point, scenario, band, values): i
                   for i, (band, values) in enumerate(tasks)}
        for fut, i in futures.items():
            rows[i] = fut.result()
    return rows
