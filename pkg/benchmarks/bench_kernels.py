"""Compare the compiled and pure-Python word-scan kernels.

    python benchmarks/bench_kernels.py [--max-len 10] [--repeat 3]
"""

import argparse
import time
from fractions import Fraction

from schottky import _kernels_py
from schottky.exact_arith import Matrix
from schottky.word_oracle import _letters

try:
    from schottky import _kernels
except ImportError:
    _kernels = None

CASES = {
    "sanov freeness": ([Matrix([[1, 2], [0, 1]]), Matrix([[1, 0], [2, 1]])], 0, False),
    "demo pair displacement": (
        [Matrix.diag(5, Fraction(1, 5)), Matrix([[Fraction(49, 5), Fraction(-24, 5)], [Fraction(48, 5), Fraction(-23, 5)]])],
        5,
        True,
    ),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-len", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernel not built; only the pure-Python timing is shown")
    print(f"{'case':<26}{'words':>10}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, (mats, p, disp) in CASES.items():
        letters, dens, dets = _letters(mats, p)
        call = (letters, dens, dets, args.max_len, p, disp)
        py_t, py_r = best_of(lambda: _kernels_py.scan_words(*call), args.repeat)
        words = sum(py_r["counts"])
        if _kernels is None:
            print(f"{name:<26}{words:>10}{py_t:>12.3f}{'-':>12}{'-':>10}")
            continue
        c_t, c_r = best_of(lambda: _kernels.scan_words(*call), args.repeat)
        assert c_r == py_r, "backends disagree"
        print(f"{name:<26}{words:>10}{py_t:>12.3f}{c_t:>12.3f}{py_t / c_t:>9.1f}x")


if __name__ == "__main__":
    main()
