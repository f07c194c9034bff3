"""Compare the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
timed on random inputs of several sizes; the search row times one multi-start
weak-violation search with each backend patched in.
"""

import argparse
import timeit

import numpy as np

from qndsim import _kernels_py, search
from qndsim.linalg import haar_unitary, random_state

try:
    from qndsim import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(rng, d_s, d_p):
    u = haar_unitary(d_s * d_p, rng)
    a, b = random_state(d_s, rng), random_state(d_p, rng)
    p = np.abs(u[:d_s, :d_p]) ** 2
    p /= p.sum()
    return {
        "joint_amplitudes": lambda k: k.joint_amplitudes(u, a, b),
        "weak_residual": lambda k: k.weak_residual(u, a, b),
        "moderate_residual": lambda k: k.moderate_residual(u, b, d_s),
        "mutual_information": lambda k: k.mutual_information(p),
    }


def _per_call(fn, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def _time_search(backend, u, b, restarts):
    saved = search.kernels
    search.kernels = backend
    try:
        return min(timeit.repeat(lambda: search.max_weak_violation(u, b, restarts, seed=0),
                                 number=1, repeat=3))
    finally:
        search.kernels = saved


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000, help="calls per timing sample")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = [("python", _kernels_py)]
    if _compiled is None:
        print("compiled extension not built; timing the fallback only")
    else:
        backends.append(("compiled", _compiled))

    rng = np.random.default_rng(args.seed)
    header = f"{'kernel':<20}{'dims':>8}" + "".join(f"{n + ' (us)':>16}" for n, _ in backends)
    if _compiled is not None:
        header += f"{'speedup':>10}"
    print(header)
    for d_s, d_p in [(2, 2), (4, 4), (8, 8)]:
        for name, call in _cases(rng, d_s, d_p).items():
            times = [_per_call(lambda k=k: call(k), args.repeat) for _, k in backends]
            row = f"{name:<20}{f'{d_s}x{d_p}':>8}" + "".join(f"{t * 1e6:>16.2f}" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)

    u, b = haar_unitary(16, rng), random_state(4, rng)
    times = [_time_search(k, u, b, restarts=4) for _, k in backends]
    row = f"{'search (4 restarts)':<20}{'4x4':>8}" + "".join(f"{t * 1e6:>16.0f}" for t in times)
    if len(times) == 2:
        row += f"{times[0] / times[1]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
