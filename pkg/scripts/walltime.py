"""Mapping time of SR33 with butterfly vs dense Haar rotations, and butterfly apply scaling.

    python3 scripts/walltime.py [--repeats 50]
"""

import argparse
import time

import numpy as np

from quadfeat.bench import walltime_mapping
from quadfeat.linalg import sample_butterfly
from quadfeat.quadrature import feature_dim


def apply_time(d, repeats, batch=16):
    B = sample_butterfly(d, 0)
    x = np.random.default_rng(0).standard_normal((batch, d))
    B.apply(x)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        B.apply(x)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--batch", type=int, default=16)
    args = parser.parse_args()

    print("butterfly apply, median seconds")
    ds = [2**k for k in range(8, 15)]
    ts = [apply_time(d, args.repeats) for d in ds]
    for d, t in zip(ds, ts):
        print(f"  d={d:>6}  {t:.3e}")
    slope = np.polyfit(np.log(ds), np.log(ts), 1)[0]
    print(f"  log-log slope {slope:.3f}")

    print("\nSR33 mapping, one block, median seconds")
    for d in (256, 1024, 4096):
        D = feature_dim(1, d)
        for method in ("sr33-butterfly", "sr33-haar"):
            s = walltime_mapping(method, d, D, args.batch, args.repeats)
            print(f"  d={d:>5} {method:>15}  {s.median:.3e}")


if __name__ == "__main__":
    main()
