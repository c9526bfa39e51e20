"""Compare the compiled kernels against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import random
import timeit

from revrec._kernels import pure

try:
    from revrec._kernels import _native as native
except ImportError:
    native = None


def make_cosine_inputs(rng, pairs=200, vocab=60, size=25):
    tokens = [f"tok{i}" for i in range(vocab)]
    out = []
    for _ in range(pairs):
        a = {t: rng.randint(1, 9) for t in rng.sample(tokens, size)}
        b = {t: rng.randint(1, 9) for t in rng.sample(tokens, size)}
        out.append((a, b))
    return out


def make_fps_inputs(rng, pairs=50, files=20):
    dirs = ["web", "api", "jobs", "infra", "core", "util"]
    out = []
    for _ in range(pairs):
        pa = [tuple(rng.choices(dirs, k=rng.randint(2, 5))) for _ in range(files)]
        pb = [tuple(rng.choices(dirs, k=rng.randint(2, 5))) for _ in range(files)]
        out.append((pa, pb))
    return out


def bench(label, fn, inputs, repeat=5, number=20):
    def run():
        for a, b in inputs:
            fn(a, b)

    best = min(timeit.repeat(run, repeat=repeat, number=number)) / number
    print(f"  {label:8s} {best * 1e3:8.3f} ms/pass")
    return best


def main():
    rng = random.Random(1)
    cosine_inputs = make_cosine_inputs(rng)
    fps_inputs = make_fps_inputs(rng)

    print(f"cosine over {len(cosine_inputs)} bag pairs:")
    t_pure = bench("pure", pure.cosine, cosine_inputs)
    if native is not None:
        t_native = bench("native", native.cosine, cosine_inputs)
        print(f"  speedup  {t_pure / t_native:8.2f}x")

    print(f"fps_mean over {len(fps_inputs)} path-set pairs:")
    t_pure = bench("pure", pure.fps_mean, fps_inputs)
    if native is not None:
        t_native = bench("native", native.fps_mean, fps_inputs)
        print(f"  speedup  {t_pure / t_native:8.2f}x")

    if native is None:
        print("compiled backend unavailable; rebuild with Cython to compare")


if __name__ == "__main__":
    main()
