"""Optimal-sequence compositions and CNBD efficiency factors as tables."""

from __future__ import annotations

import csv
import io

from .optimality import cnbd_efficiency, round2
from .sequences import optimal_composition

TABLE_RANGES = {1: range(3, 17), 2: range(3, 16), 3: range(4, 15)}

TABLE_HEADERS = {
    1: ["k", "v_star", "v_minus", "v_plus", "n_minus", "n_plus"],
    2: ["k", "efficiency"],
    3: ["k", "efficiency"],
}


def table1_rows():
    """One row per optimal one-sided composition, ties as separate rows."""
    rows = []
    for k in TABLE_RANGES[1]:
        for c in optimal_composition(k, k, "m1").compositions:
            rows.append([k, c.v, c.v_minus, c.v_plus, c.n_minus, c.n_plus])
    return rows


def efficiency_rows(which: int):
    model = "m1" if which == 2 else "m2"
    return [[k, cnbd_efficiency(k, model)] for k in TABLE_RANGES[which]]


def table_rows(which: int):
    if which == 1:
        return table1_rows()
    if which in (2, 3):
        return efficiency_rows(which)
    raise ValueError(f"no table {which}")


def table_csv(which: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADERS[which])
    for row in table_rows(which):
        if which == 1:
            w.writerow(row)
        else:
            w.writerow([row[0], round2(row[1])])
    return buf.getvalue()


def table_text(which: int) -> str:
    rows = table_rows(which)
    if which == 1:
        header = ["k", "v*", "v-", "v+", "n-", "n+"]
        body = [[str(x) for x in r] for r in rows]
    else:
        header = ["k", "Eff", "exact"]
        body = [[str(k), str(round2(e)), str(e)] for k, e in rows]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in [header] + body]
    return "\n".join(lines) + "\n"
