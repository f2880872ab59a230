"""Compare the compiled feasibility kernel with its pure-Python twin.

    python benchmarks/bench_lp.py [--systems 2000] [--seed 0]

Both kernels run on the same random integer systems ``A z = b, z >= 0``
(the shapes that membership tests produce) and must agree on every answer.
"""

from __future__ import annotations

import argparse
import random
import time

from svtakagi import _lpcore_py

try:
    from svtakagi import _lpcore
except ImportError:  # extension not built
    _lpcore = None


def random_system(rng: random.Random) -> tuple[list[list[int]], list[int]]:
    rows = rng.randint(2, 5)
    cols = rng.randint(2, 12)
    A = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows - 1)]
    A.append([1] * cols)  # convexity row, as in point-in-hull tests
    b = [rng.randint(-9, 9) for _ in range(rows - 1)] + [1]
    return A, b


def time_kernel(fn, systems) -> tuple[float, list[bool]]:
    start = time.perf_counter()
    answers = [fn(A, b) for A, b in systems]
    return time.perf_counter() - start, answers


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--systems", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    systems = [random_system(rng) for _ in range(args.systems)]
    py_time, py_ans = time_kernel(_lpcore_py.feasible, systems)
    print(f"python  : {py_time:8.4f} s  ({1e6 * py_time / len(systems):7.1f} us/system)")
    if _lpcore is None:
        print("cython  : extension not built")
        return
    cy_time, cy_ans = time_kernel(_lpcore.feasible, systems)
    print(f"cython  : {cy_time:8.4f} s  ({1e6 * cy_time / len(systems):7.1f} us/system)")
    print(f"speedup : {py_time / cy_time:8.2f}x")
    print(f"feasible: {sum(py_ans)}/{len(systems)}; answers agree: {py_ans == cy_ans}")


if __name__ == "__main__":
    main()
