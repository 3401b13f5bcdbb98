#!/usr/bin/env python3
"""Regenerate the bundled attenuation-coefficient tables.

Writes two CSVs into src/airqkd/data/ (or --outdir):

* rain_itu_p838.csv  -- ITU-R P.838-3 horizontal-polarization rain
  coefficients k_H(f), alpha_H(f), evaluated from the recommendation's
  log-Gaussian component sums on a 0.1 GHz grid over 1-100 GHz.
* cloud_lwc.csv      -- Rayleigh-regime cloud/fog liquid-water specific
  attenuation K_l(f) in (dB/km)/(g/m^3) from the double-Debye
  permittivity model at 300 K, 0.1 GHz grid over 1-30 GHz.

The library interpolates these tables in log-frequency; regenerating with
this script reproduces the shipped files byte for byte.
"""

import argparse
import csv
import os

import numpy as np

# ITU-R P.838-3, Table 1 (k_H) and Table 3 (alpha_H)
KH_A = (-5.33980, -0.35351, -0.23789, -0.94158)
KH_B = (-0.10008, 1.26970, 0.86036, 0.64552)
KH_C = (1.13098, 0.45400, 0.15354, 0.16817)
KH_M, KH_CK = -0.18961, 0.71147

AH_A = (-0.14318, 0.29591, 0.32177, -5.37610, 16.1721)
AH_B = (1.82442, 0.77564, 0.63773, -0.96230, -3.29980)
AH_C = (-0.55187, 0.19822, 0.13164, 1.47828, 3.43990)
AH_M, AH_CA = 0.67849, -1.95537


def rain_kh(f_ghz):
    lf = np.log10(f_ghz)
    s = sum(a * np.exp(-(((lf - b) / c) ** 2))
            for a, b, c in zip(KH_A, KH_B, KH_C))
    return 10.0 ** (s + KH_M * lf + KH_CK)


def rain_alpha_h(f_ghz):
    lf = np.log10(f_ghz)
    s = sum(a * np.exp(-(((lf - b) / c) ** 2))
            for a, b, c in zip(AH_A, AH_B, AH_C))
    return s + AH_M * lf + AH_CA


def cloud_kl(f_ghz, temperature_k=300.0):
    """Liquid-water specific attenuation via the double-Debye model."""
    theta = 300.0 / temperature_k
    eps0 = 77.66 + 103.3 * (theta - 1.0)
    eps1 = 0.0671 * eps0
    eps2 = 3.52
    fp = 20.20 - 146.0 * (theta - 1.0) + 316.0 * (theta - 1.0) ** 2
    fs = 39.8 * fp
    f = f_ghz
    eps_im = (f * (eps0 - eps1) / (fp * (1.0 + (f / fp) ** 2))
              + f * (eps1 - eps2) / (fs * (1.0 + (f / fs) ** 2)))
    eps_re = ((eps0 - eps1) / (1.0 + (f / fp) ** 2)
              + (eps1 - eps2) / (1.0 + (f / fs) ** 2) + eps2)
    eta = (2.0 + eps_re) / eps_im
    return 0.819 * f / (eps_im * (1.0 + eta ** 2))


def _write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows -> {path}")


def main():
    default_out = os.path.join(os.path.dirname(__file__), os.pardir,
                               "src", "airqkd", "data")
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default=os.path.normpath(default_out))
    args = parser.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    freqs = np.round(np.arange(10, 1001) * 0.1, 1)     # 1.0 .. 100.0 GHz
    rows = [("%.1f" % f, "%.9e" % rain_kh(f), "%.9f" % rain_alpha_h(f))
            for f in freqs]
    _write(os.path.join(args.outdir, "rain_itu_p838.csv"),
           ("frequency_ghz", "k_h", "alpha_h"), rows)

    freqs = np.round(np.arange(10, 301) * 0.1, 1)      # 1.0 .. 30.0 GHz
    rows = [("%.1f" % f, "%.9e" % cloud_kl(f)) for f in freqs]
    _write(os.path.join(args.outdir, "cloud_lwc.csv"),
           ("frequency_ghz", "K_l"), rows)


if __name__ == "__main__":
    main()
