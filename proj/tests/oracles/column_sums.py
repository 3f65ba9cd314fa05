"""Line-by-line column sums for tests/fixtures/numeric12.csv (frozen into test_observations.cpp)."""
import sys
from fractions import Fraction

path = sys.argv[1]
with open(path) as fh:
    header = fh.readline().strip().split(",")
    sums = {h: Fraction(0) for h in header}
    rows = 0
    for line in fh:
        if not line.strip():
            continue
        rows += 1
        for h, cell in zip(header, line.strip().split(",")):
            sums[h] += Fraction(cell)
print("rows", rows)
for h in header:
    print(h, repr(float(sums[h])))
