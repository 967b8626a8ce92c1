#!/usr/bin/env python3
"""Independent CVSS v3.1 base-score oracle.

Follows the structure of FIRST's reference calculator (cvsscalc31.js):
weight tables keyed by metric letter, Roundup via Math.round(x * 100000),
scope-dependent PR weights. Used once to freeze tests/data/cvss_oracle.csv;
the C++ implementation is checked against that file, never against itself.

Usage: cvss31_oracle.py [--count N] [--seed S] > tests/data/cvss_oracle.csv
"""
import argparse
import math
import random

WEIGHTS = {
    "AV": {"N": 0.85, "A": 0.62, "L": 0.55, "P": 0.2},
    "AC": {"H": 0.44, "L": 0.77},
    "PR": {"U": {"N": 0.85, "L": 0.62, "H": 0.27},
           "C": {"N": 0.85, "L": 0.68, "H": 0.5}},
    "UI": {"N": 0.85, "R": 0.62},
    "CIA": {"H": 0.56, "L": 0.22, "N": 0.0},
}
EXPLOITABILITY_COEFFICIENT = 8.22
SCOPE_COEFFICIENT = 1.08

ORDER = ["AV", "AC", "PR", "UI", "S", "C", "I", "A"]
VALUES = {
    "AV": "NALP", "AC": "LH", "PR": "NLH", "UI": "NR", "S": "UC",
    "C": "HLN", "I": "HLN", "A": "HLN",
}


def js_round(x):
    # JavaScript Math.round: round half up toward +infinity.
    return math.floor(x + 0.5)


def roundup(value):
    int_input = js_round(value * 100000)
    if int_input % 10000 == 0:
        return int_input / 100000.0
    return (math.floor(int_input / 10000) + 1) / 10.0


def score(metrics):
    scope = metrics["S"]
    iss = 1 - ((1 - WEIGHTS["CIA"][metrics["C"]]) *
               (1 - WEIGHTS["CIA"][metrics["I"]]) *
               (1 - WEIGHTS["CIA"][metrics["A"]]))
    if scope == "U":
        impact = 6.42 * iss
    else:
        impact = 7.52 * (iss - 0.029) - 3.25 * math.pow(iss - 0.02, 15)
    exploitability = (EXPLOITABILITY_COEFFICIENT * WEIGHTS["AV"][metrics["AV"]] *
                      WEIGHTS["AC"][metrics["AC"]] *
                      WEIGHTS["PR"][scope][metrics["PR"]] *
                      WEIGHTS["UI"][metrics["UI"]])
    if impact <= 0:
        return 0.0
    if scope == "U":
        return roundup(min(impact + exploitability, 10))
    return roundup(min(SCOPE_COEFFICIENT * (impact + exploitability), 10))


def parse(vector):
    body = vector.split("/", 1)[1]
    return dict(part.split(":") for part in body.split("/"))


def render(metrics):
    return "CVSS:3.1/" + "/".join(f"{k}:{metrics[k]}" for k in ORDER)


# Scores published by NVD / the FIRST calculator for common vectors. The
# oracle must agree with all of them before its output is trusted.
PUBLISHED = [
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8),
    ("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:C/C:H/I:H/A:H", 9.9),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N", 0.0),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H", 10.0),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:R/S:C/C:L/I:L/A:N", 6.1),
    ("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:C/C:L/I:L/A:N", 6.4),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N", 7.5),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:H", 7.5),
    ("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H", 7.8),
    ("CVSS:3.1/AV:L/AC:L/PR:N/UI:R/S:U/C:H/I:H/A:H", 7.8),
    ("CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H", 8.1),
    ("CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H", 8.8),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:R/S:U/C:H/I:H/A:H", 8.8),
    ("CVSS:3.1/AV:A/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 8.8),
    ("CVSS:3.1/AV:P/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 6.8),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:L/I:L/A:L", 7.3),
    ("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:L/I:N/A:N", 5.3),
    ("CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:N/A:N", 5.9),
    ("CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:N/A:N", 5.5),
    ("CVSS:3.1/AV:N/AC:L/PR:H/UI:N/S:U/C:H/I:H/A:H", 7.2),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240716)
    args = ap.parse_args()

    for vector, expected in PUBLISHED:
        got = score(parse(vector))
        if got != expected:
            raise SystemExit(f"oracle disagrees with published score for {vector}: {got} != {expected}")

    rng = random.Random(args.seed)
    print("vector,score")
    for vector, _ in PUBLISHED:
        print(f"{vector},{score(parse(vector)):.1f}")
    seen = set(v for v, _ in PUBLISHED)
    emitted = 0
    while emitted < args.count:
        metrics = {k: rng.choice(VALUES[k]) for k in ORDER}
        vector = render(metrics)
        if vector in seen:
            continue
        seen.add(vector)
        print(f"{vector},{score(metrics):.1f}")
        emitted += 1


if __name__ == "__main__":
    main()
