#!/usr/bin/env python3
"""Independent calculator for the Alergia Hoeffding compatibility test.

Writes tests/data/hoeffding_table.json: 20 random frequency-vector pairs
(the last component is the termination count) and, for each alpha in
{0.05, 0.5, 0.95}, whether the two states differ.
"""
import json
import math
import random
import sys


def differ(fa, fb, alpha):
    na, nb = sum(fa), sum(fb)
    bound = math.sqrt(0.5 * math.log(2.0 / alpha)) * (1.0 / math.sqrt(na) + 1.0 / math.sqrt(nb))
    return any(abs(x / na - y / nb) > bound for x, y in zip(fa, fb))


def main(out):
    rng = random.Random(20240917)
    alphas = [0.05, 0.5, 0.95]
    rows = []
    while len(rows) < 20:
        width = rng.randint(2, 5)
        scale_a = rng.choice([3, 10, 40, 200])
        scale_b = rng.choice([3, 10, 40, 200])
        fa = [rng.randint(0, scale_a) for _ in range(width)]
        fb = [rng.randint(0, scale_b) for _ in range(width)]
        if sum(fa) == 0 or sum(fb) == 0:
            continue
        rows.append({"a": fa, "b": fb,
                     "differ": {str(al): differ(fa, fb, al) for al in alphas}})
    with open(out, "w") as fh:
        json.dump({"alphas": alphas, "rows": rows}, fh, indent=1)
        fh.write("\n")
    n_true = sum(v for r in rows for v in r["differ"].values())
    print(f"wrote {len(rows)} rows, {n_true} differing verdicts")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "hoeffding_table.json")
