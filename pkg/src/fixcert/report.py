"""Tabular export of orbits: rows, CSV, aligned text."""

import csv
import math

from .errors import FixcertError
from .picard import certify_at, observed_ratio, window_max

COLUMNS = ("n", "d(z_n,z_{n-1})", "r_n", "q_hat_{n,m}", "bound", "true_dist")


def orbit_rows(orbit, m, z_star=None, tail=None):
    """One row per step ``n >= 1``; undefined entries are None."""
    true = None
    if z_star is not None:
        true = [orbit.space.distance(z, z_star) for z in orbit.zs]
    rows = []
    for n in range(1, orbit.last + 1):
        row = {"n": n, "d(z_n,z_{n-1})": float(orbit.step_dists[n]),
               "r_n": None, "q_hat_{n,m}": None, "bound": None, "true_dist": None}
        if n >= 2 and orbit.step_dists[n - 1] > 0:
            row["r_n"] = observed_ratio(orbit, n)
        if n >= m + 1:
            try:
                row["q_hat_{n,m}"] = window_max(orbit, n, m)
                cert = certify_at(orbit, n, m, tail)
                if cert.status != "violated-at":
                    row["bound"] = cert.bound
            except FixcertError:
                pass
        if true is not None:
            row["true_dist"] = float(true[n])
        rows.append(row)
    return rows


def fmt_sci(x):
    """Three significant figures, compact exponent: ``2.51e-7``."""
    if x is None:
        return "---"
    if x == 0:
        return "0"
    e = math.floor(math.log10(abs(x)))
    mant = x / 10 ** e
    if round(abs(mant), 2) >= 10:
        mant, e = mant / 10, e + 1
    return f"{mant:.2f}e{e}"


def fmt_ratio(x):
    return "---" if x is None else f"{x:.4f}"


_FORMATTERS = {"n": str, "d(z_n,z_{n-1})": fmt_sci, "r_n": fmt_ratio,
               "q_hat_{n,m}": fmt_ratio, "bound": fmt_sci, "true_dist": fmt_sci}


def formatted_rows(rows, columns=COLUMNS):
    return [[_FORMATTERS[c](r[c]) for c in columns] for r in rows]


def write_csv(rows, fh, columns=COLUMNS, rounded=False):
    """CSV with full-precision numbers, or the rounded table presentation."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    if rounded:
        w.writerows(formatted_rows(rows, columns))
        return
    for r in rows:
        w.writerow(["" if r[c] is None else repr(r[c]) for c in columns])


def text_table(rows, columns=COLUMNS):
    body = formatted_rows(rows, columns)
    widths = [max(len(c), *(len(b[i]) for b in body)) if body else len(c)
              for i, c in enumerate(columns)]
    lines = [" | ".join(c.rjust(w) for c, w in zip(columns, widths)),
             "-+-".join("-" * w for w in widths)]
    lines += [" | ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines) + "\n"
