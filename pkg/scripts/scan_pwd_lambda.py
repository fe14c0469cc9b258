#!/usr/bin/env python3
"""Scan power-divergence orders against the tabulated PWD row.

The tabulated distance rows pair KW(alpha, 2.5) with an unspecified LNGB
law and an unspecified divergence order. This scan evaluates every
Cressie-Read order in {-2, -1, -0.5, 0, 1}, both directions, at the
pseudo-true pairing, and reports the closest value per column so the
(mis)match is documented rather than assumed.

Usage:
    python scripts/scan_pwd_lambda.py
"""

from kwlngb.discrimination import kw_null, null_analysis
from kwlngb.divergence import KW_FROM_LNGB, LNGB_FROM_KW, hellinger, power_divergence
from kwlngb.errors import KwLngbError

TABULATED_PWD = {1.5: 0.0364, 2.0: 0.0273, 2.5: 0.0211, 3.0: 0.0157, 3.5: 0.0123, 4.0: 0.0098}
TABULATED_H = {1.5: 0.0022, 2.0: 0.0004, 2.5: 0.0001, 3.0: 0.0002, 3.5: 0.0004, 4.0: 0.0005}


def main():
    print(f"{'alpha':>6} {'tab PWD':>9} {'closest':>11} {'lambda':>7} {'direction':>14}"
          f" {'tab H':>8} {'ours H':>9}")
    for alpha, ref in TABULATED_PWD.items():
        an = null_analysis(kw_null(alpha, 2.5))
        kw, lngb = an.null.params, an.pseudo_true
        best = None
        for lam in (-2.0, -1.0, -0.5, 0.0, 1.0):
            for direction in (KW_FROM_LNGB, LNGB_FROM_KW):
                try:
                    v = power_divergence(kw, lngb, lam, direction).value
                except KwLngbError:
                    continue
                if best is None or abs(v - ref) < abs(best[0] - ref):
                    best = (v, lam, direction)
        h = hellinger(kw, lngb).value
        print(f"{alpha:>6} {ref:>9.4f} {best[0]:>11.3e} {best[1]:>7} {best[2]:>14}"
              f" {TABULATED_H[alpha]:>8.4f} {h:>9.3e}")
    print("\nEvery Cressie-Read order gives ~chi^2/2 between these nearly")
    print("coincident laws, orders of magnitude below the tabulated row;")
    print("the tabulated PWD/H ratio (~68 at alpha=2) is impossible for any")
    print("order at any pairing of nearby laws (the ratio tends to 2).")


if __name__ == "__main__":
    main()
