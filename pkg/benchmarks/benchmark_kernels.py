"""Compare the compiled kernels against the pure-Python fallback.

Runs the equivalence-theorem sweep in two worker processes, one with
numba enabled and one with CHAINCOVER_NO_NUMBA=1, and reports median wall
times and the speedup. Both workers must agree on the verdict and the
instance count; a mismatch is a hard error.

Usage: python benchmarks/benchmark_kernels.py [--max-s N] [--max-r N]
       [--repeat K] [--jobs N]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys

_WORKER = r"""
import json, sys, time
from chaincover import _kernels as K
from chaincover.theorems import TheoremId, exhaustive_verify

max_s, max_r, repeat, jobs = json.loads(sys.argv[1])
exhaustive_verify(TheoremId.C_EQUIVALENT, 1, 1, jobs=jobs)  # warm the kernels
times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    v = exhaustive_verify(TheoremId.C_EQUIVALENT, max_s, max_r, jobs=jobs)
    times.append(time.perf_counter() - t0)
print(json.dumps({
    "numba": K.NUMBA_ENABLED,
    "holds": v.holds,
    "instances": v.instances_checked,
    "times": times,
}))
"""


def run_mode(no_numba: bool, args) -> dict:
    env = dict(os.environ)
    env["CHAINCOVER_NO_NUMBA"] = "1" if no_numba else "0"
    payload = json.dumps([args.max_s, args.max_r, args.repeat, args.jobs])
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, payload],
        capture_output=True,
        text=True,
        env=env,
    )
    if proc.returncode != 0:
        raise SystemExit(f"worker failed:\n{proc.stderr}")
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-s", type=int, default=3)
    parser.add_argument("--max-r", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    compiled = run_mode(no_numba=False, args=args)
    fallback = run_mode(no_numba=True, args=args)

    if not compiled["numba"]:
        print("note: numba is not importable here; both runs interpreted")
    if (compiled["holds"], compiled["instances"]) != (
        fallback["holds"],
        fallback["instances"],
    ):
        raise SystemExit(
            f"paths disagree: compiled {compiled}, fallback {fallback}"
        )

    t_compiled = statistics.median(compiled["times"])
    t_fallback = statistics.median(fallback["times"])
    print(
        f"C_EQUIVALENT sweep, |s| <= {args.max_s}, |r| <= {args.max_r}, "
        f"{compiled['instances']} instances, jobs={args.jobs}, "
        f"median of {args.repeat}"
    )
    print(f"  compiled: {t_compiled:.3f}s")
    print(f"  fallback: {t_fallback:.3f}s")
    print(f"  speedup:  {t_fallback / t_compiled:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
