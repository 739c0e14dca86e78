#!/usr/bin/env python3
"""DMM and DCM straight from a change-table CSV.

Rows are grouped by (object, unit). DMM is the mean over groups of the
entropy (nats) of the softmax of the per-factor flip counts; DCM is the mean
over groups of the mean |flips - 1|. Prints a JSON object.
"""
import csv
import json
import math
import sys
from collections import defaultdict


def main(path):
    with open(path, newline="") as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        header = next(reader)
        n = len(header) - 3
        counts = defaultdict(lambda: [0] * n)
        compact = defaultdict(list)
        for row in reader:
            key = (int(row[0]), int(row[1]))
            bits = [int(b) for b in row[3:]]
            counts[key] = [c + b for c, b in zip(counts[key], bits)]
            compact[key].append(abs(sum(bits) - 1))
    entropies = []
    for c in counts.values():
        top = max(c)
        w = [math.exp(x - top) for x in c]
        z = sum(w)
        entropies.append(-sum((x / z) * math.log(x / z) for x in w))
    dmm = sum(entropies) / len(entropies)
    dcm = sum(sum(v) / len(v) for v in compact.values()) / len(compact)
    print(json.dumps({"dmm": dmm, "dcm": dcm, "groups": len(counts)}))


if __name__ == "__main__":
    main(sys.argv[1])
