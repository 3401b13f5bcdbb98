"""Command-line front end.

Every command reads a scenario file (``--scenario``), evaluates it, and
writes a delimited result table (CSV by default, JSON with
``--format json``) to ``--output`` or ``<name>.<command>.<ext>``.
Output is byte-identical across runs and thread counts: floats are
rendered with ``%.9g``, rows are emitted in a fixed order, and JSON keys
are sorted.

Result tables share one schema: a ``scenario`` column (``<name>/<band>``),
one column per sweep axis, then ``d_m,tau,nbar,I_bits,chi_bits,K_bits,
R_bits_s,flags``.  A distance axis is rendered once, as ``d_m`` in its
axis position.  ``flags`` is a semicolon-joined subset of
``insecure``/``multi_root``/``unbounded``.  The ``attenuation`` command
has its own schema (per-band dB/km budget).

Exit codes: 0 success (including insecure links), 2 validation error,
3 solver warning (``multi_root`` or ``unbounded``), 4 I/O error.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace

from . import link, security
from .scenario import ScenarioError, evaluate_sweep, parse_scenario

RESULT_FIELDS = ("d_m", "tau", "nbar", "I_bits", "chi_bits",
                 "K_bits", "R_bits_s", "flags")
SOLVER_EXIT_FLAGS = {"multi_root", "unbounded"}


def _fmt(value):
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def _axis_column(axis):
    return "d_m" if axis.variable == "distance_m" else axis.variable


def _result_columns(sweep):
    cols = ["scenario"] + [_axis_column(ax) for ax in sweep]
    cols += [f for f in RESULT_FIELDS if f not in cols]
    return cols


def _row_record(row, sweep):
    rec = {"scenario": row.scenario}
    for axis, value in zip(sweep, row.axes):
        rec[_axis_column(axis)] = float(value)
    rec.setdefault("d_m", float(row.d_m))
    rec.update(tau=float(row.tau), nbar=float(row.nbar),
               I_bits=float(row.I_bits), chi_bits=float(row.chi_bits),
               K_bits=float(row.K_bits), R_bits_s=float(row.R_bits_s),
               flags=";".join(row.flags))
    return rec


def _write_table(path, fmt, columns, records):
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for rec in records:
                writer.writerow([_fmt(rec[c]) for c in columns])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"columns": list(columns), "rows": records}, fh,
                      sort_keys=True, indent=2)
            fh.write("\n")


def _output_path(args, scenario, command):
    if args.output:
        return args.output
    ext = "json" if args.format == "json" else "csv"
    return f"{scenario.name}.{command}.{ext}"


def _exit_code(records):
    for rec in records:
        if SOLVER_EXIT_FLAGS & set(rec["flags"].split(";")):
            return 3
    return 0


def _report_record(name, band, report, d_m, extra_flags=(), nbar=None):
    flags = list(extra_flags)
    if report.secret_key <= 0.0 and "insecure" not in flags:
        flags.append("insecure")
    return {
        "scenario": f"{name}/{band}",
        "d_m": float(d_m),
        "tau": float(report.channel.tau),
        "nbar": float(report.channel.nbar if nbar is None else nbar),
        "I_bits": float(report.mutual_info),
        "chi_bits": float(report.holevo),
        "K_bits": float(report.secret_key),
        "R_bits_s": float(report.rate_upper),
        "flags": ";".join(flags),
    }


def _weather_token(weather):
    if weather.kind == "rain":
        return "rain=%s" % _fmt(float(weather.rain_rate_mm_h))
    if weather.kind == "haze":
        return "haze=%s" % _fmt(float(weather.visibility_km))
    return "clear"


# ---------------------------------------------------------------------------
# commands

def _cmd_key(args):
    scenario = parse_scenario(args.scenario)
    rows = evaluate_sweep(replace(scenario, sweep=()))
    columns = _result_columns(())
    records = [_row_record(r, ()) for r in rows]
    path = _output_path(args, scenario, "key")
    _write_table(path, args.format, columns, records)
    for rec in records:
        print("%s: d=%s m  K=%s bits  R=%s bit/s%s"
              % (rec["scenario"], _fmt(rec["d_m"]), _fmt(rec["K_bits"]),
                 _fmt(rec["R_bits_s"]),
                 "  [%s]" % rec["flags"] if rec["flags"] else ""))
    print(f"wrote {len(records)} rows -> {path}")
    return 0


def _cmd_sweep(args):
    scenario = parse_scenario(args.scenario)
    rows = evaluate_sweep(scenario, threads=args.threads)
    columns = _result_columns(scenario.sweep)
    records = [_row_record(r, scenario.sweep) for r in rows]
    path = _output_path(args, scenario, "sweep")
    _write_table(path, args.format, columns, records)
    message = f"wrote {len(records)} rows -> {path}"
    if args.plot:
        from . import figures
        png = figures.sweep_figure(scenario, rows, path)
        message += f" and {png}"
    print(message)
    return 0


def _cmd_secure_distance(args):
    scenario = parse_scenario(args.scenario)
    records = []
    for band in scenario.bands:
        scen, det = scenario.links[band], scenario.detectors[band]
        res = security.secure_distance(scen, scenario.protocol, det)
        at = max(res.value, security.SCAN_MIN_M)
        report = security.key_at_distance(scen, scenario.protocol, det, at)
        records.append(_report_record(scenario.name, band, report,
                                      res.value, res.flags))
        print("%s/%s: secure distance %s m%s"
              % (scenario.name, band, _fmt(res.value),
                 "  [%s]" % ";".join(res.flags) if res.flags else ""))
    path = _output_path(args, scenario, "secure-distance")
    _write_table(path, args.format, _result_columns(()), records)
    print(f"wrote {len(records)} rows -> {path}")
    return _exit_code(records)


def _cmd_noise_threshold(args):
    scenario = parse_scenario(args.scenario)
    records = []
    for band in scenario.bands:
        scen, det = scenario.links[band], scenario.detectors[band]
        chan = link.channel_params(scen)
        res = security.noise_threshold(chan.tau, scenario.protocol, det)
        at = res.value if res.value not in (0.0, float("inf")) else chan.nbar
        report = security.secret_key(
            scenario.protocol,
            link.ChannelParams(tau=chan.tau, nbar=at, nbar_th=0.0), det)
        records.append(_report_record(scenario.name, band, report,
                                      scen.distance_m, res.flags,
                                      nbar=res.value))
        print("%s/%s: noise threshold %s photons at tau=%s%s"
              % (scenario.name, band, _fmt(res.value), _fmt(chan.tau),
                 "  [%s]" % ";".join(res.flags) if res.flags else ""))
    path = _output_path(args, scenario, "noise-threshold")
    _write_table(path, args.format, _result_columns(()), records)
    print(f"wrote {len(records)} rows -> {path}")
    return _exit_code(records)


def _cmd_crossover(args):
    scenario = parse_scenario(args.scenario)
    if set(scenario.bands) != {"microwave", "telecom"}:
        raise ScenarioError(
            "crossover needs both a 'microwave' and a 'telecom' block")
    res = security.crossover_distance(
        scenario.protocol,
        scenario.links["microwave"], scenario.detectors["microwave"],
        scenario.links["telecom"], scenario.detectors["telecom"])
    at = max(res.value, security.SCAN_MIN_M)
    records = []
    for band in ("microwave", "telecom"):
        report = security.key_at_distance(
            scenario.links[band], scenario.protocol,
            scenario.detectors[band], at)
        records.append(_report_record(scenario.name, band, report,
                                      res.value, res.flags))
    path = _output_path(args, scenario, "crossover")
    _write_table(path, args.format, _result_columns(()), records)
    print("%s: crossover distance %s m%s"
          % (scenario.name, _fmt(res.value),
             "  [%s]" % ";".join(res.flags) if res.flags else ""))
    print(f"wrote {len(records)} rows -> {path}")
    return _exit_code(records)


def _cmd_attenuation(args):
    scenario = parse_scenario(args.scenario)
    columns = ["scenario", "band", "frequency_hz", "weather",
               "clear_air_db_km", "weather_excess_db_km", "total_db_km"]
    records = []
    for band in scenario.bands:
        scen = scenario.links[band]
        budget = link.specific_attenuation(band, scen.frequency_hz,
                                           scen.weather)
        records.append({
            "scenario": scenario.name,
            "band": band,
            "frequency_hz": float(scen.frequency_hz),
            "weather": _weather_token(scen.weather),
            "clear_air_db_km": float(budget.clear_air_db_km),
            "weather_excess_db_km": float(budget.weather_excess_db_km),
            "total_db_km": float(budget.total_db_km),
        })
        print("%s/%s: %s dB/km total (%s clear-air + %s weather)"
              % (scenario.name, band, _fmt(budget.total_db_km),
                 _fmt(budget.clear_air_db_km),
                 _fmt(budget.weather_excess_db_km)))
    path = _output_path(args, scenario, "attenuation")
    _write_table(path, args.format, columns, records)
    print(f"wrote {len(records)} rows -> {path}")
    return 0


def _cmd_selftest(args):
    from .selftest import run_selftest
    return 0 if run_selftest(verbose=True) else 1


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="airqkd",
        description="Secret-key analysis of squeezed-state QKD over "
                    "noisy open-air microwave and telecom links.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, scenario=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if scenario:
            p.add_argument("--scenario", required=True,
                           help="path to a scenario JSON file")
            p.add_argument("--output",
                           help="output path (default <name>.<command>.<ext>)")
            p.add_argument("--format", choices=("csv", "json"), default="csv",
                           help="output format (default csv)")
        return p

    add("key", _cmd_key,
        "secret key and rate at the scenario's own parameters")
    p = add("sweep", _cmd_sweep,
            "evaluate the scenario's sweep grid")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (results identical for any count)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the output")
    add("secure-distance", _cmd_secure_distance,
        "largest distance with a positive secret key, per band")
    add("noise-threshold", _cmd_noise_threshold,
        "channel noise where the key crosses zero, per band")
    add("crossover", _cmd_crossover,
        "largest distance where the microwave rate still beats telecom")
    add("attenuation", _cmd_attenuation,
        "per-band specific attenuation budget in dB/km")
    add("selftest", _cmd_selftest,
        "run built-in consistency checks", scenario=False)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        # ScenarioError, OutOfModelError and friends: bad input, not I/O
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
