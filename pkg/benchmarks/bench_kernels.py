"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Each row reports the best of
several repeats in milliseconds and the speedup of the compiled core.
"""

import argparse
import timeit

import numpy as np

from gwlab import gwcore, kernels, mmspace


def best_ms(fn, repeat):
    number = 1
    while min(timeit.repeat(fn, number=number, repeat=1)) < 0.05 and number < 10_000:
        number *= 4
    return 1e3 * min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def cases(rng):
    for k in (6, 10, 14):
        X = mmspace.point_cloud_space(rng.standard_normal((k, 3)))
        Y = mmspace.point_cloud_space(rng.standard_normal((k, 3)))
        G = gwcore.build_gamma(X, Y, 1.0)
        plan = np.full((k, k), 1.0 / k**2)
        tol = 1e-12 * np.linalg.norm(G)
        yield f"jacobi  dim={k * k}", lambda b, G=G, tol=tol: kernels.jacobi_eigenvalues(G, tol, backend=b)
        yield f"objective m=n={k}", lambda b, X=X, Y=Y, plan=plan: kernels.tensor_objective(
            X.dist, Y.dist, 1.0, plan, backend=b
        )
        yield f"gradient  m=n={k}", lambda b, X=X, Y=Y, plan=plan: kernels.tensor_gradient(
            X.dist, Y.dist, 1.0, plan, backend=b
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled core not built; only the python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases(rng):
        times = [best_ms(lambda: fn(b), args.repeat) for b in backends]
        line = f"{name:<22}" + "".join(f"{t:>10.3f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[1] / times[0]:>11.1f}x"
        print(line, flush=True)


if __name__ == "__main__":
    main()
