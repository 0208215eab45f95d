"""Time the compiled Pfaffian kernels against the numpy fallback."""

import argparse
import sys
import timeit

import numpy as np

from curvid import _backend, models
from curvid.pfaffian import euler_form, pfaffian_two_tensor

CASES = {
    "E_66": (6, lambda R, b: euler_form(R, 6, backend=b)),
    "T2_66": (7, lambda R, b: pfaffian_two_tensor(R, 6, backend=b)),
}


def bench(name, repeat, number, seed):
    dim, fn = CASES[name]
    R = models.random_act(dim, seed, 3)
    backends = ["python"] + (["cython"] if _backend.compiled_available() else [])
    times, values = {}, {}
    for b in backends:
        values[b] = np.asarray(fn(R, b))
        times[b] = min(timeit.repeat(lambda: fn(R, b), repeat=repeat, number=number)) / number
    ref = values["python"]
    gap = float(np.max(np.abs(values[backends[-1]] - ref))) / max(float(np.max(np.abs(ref))), 1e-300)
    return dim, times, gap


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--case", choices=sorted(CASES), action="append", help="default: all cases")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--number", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not _backend.compiled_available():
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)
    print(f"{'case':<7} {'dim':>3} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'rel gap':>9}")
    for name in args.case or sorted(CASES):
        dim, times, gap = bench(name, args.repeat, args.number, args.seed)
        cy = times.get("cython")
        speed = f"{times['python'] / cy:8.1f}" if cy else f"{'-':>8}"
        cy_text = f"{cy:11.4f}" if cy else f"{'-':>11}"
        print(f"{name:<7} {dim:>3} {times['python']:11.4f} {cy_text} {speed} {gap:9.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
