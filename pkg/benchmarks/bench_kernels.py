"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--p P]
"""
import argparse
import random
import timeit

from fqapprox import _pykernels

try:
    from fqapprox import _ckernels
except ImportError:
    _ckernels = None


def _cases(p, rng):
    a = [rng.randrange(p) for _ in range(400)]
    b = [rng.randrange(p) for _ in range(300)]
    b[-1] = 1
    den = [rng.randrange(p) for _ in range(120)] + [1]
    series = [1] + [rng.randrange(p) for _ in range(199)]
    n = 1
    while p ** (n + 1) <= 4096:
        n += 1
    V = [[rng.randrange(p) for _ in range(40)] for _ in range(n)]
    t = [rng.randrange(p) for _ in range(40)]
    return {
        "conv_mod 400x300": lambda m: m.conv_mod(a, b, p),
        "divmod_mod 400/121": lambda m: m.divmod_mod(a, den, p),
        "inv_series_mod n=200": lambda m: m.inv_series_mod(series, 200, p),
        f"lead_positions {n}x40": lambda m: m.lead_positions(V, t, p),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--p", type=int, default=2)
    args = ap.parse_args()
    rng = random.Random(0)
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'kernel':24s}" + "".join(f"{name:>12s}" for name, _ in backends) + "   speedup")
    for label, fn in _cases(args.p, rng).items():
        times = []
        for _, mod in backends:
            t = timeit.timeit(lambda: fn(mod), number=args.repeat) / args.repeat
            times.append(t)
        cells = "".join(f"{t * 1e3:10.3f}ms" for t in times)
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) > 1 else ""
        print(f"{label:24s}{cells} {speed}")


if __name__ == "__main__":
    main()
