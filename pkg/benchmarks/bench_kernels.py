"""Time the Monte-Carlo kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Each backend runs once to warm up (numba compiles or loads its cache), then the
best of R timings is reported per kernel together with the max relative
difference between the two backends on identical raw variates.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from triflag.analysis import kernels, montecarlo as mc, set_backend


def _stages(raw, u):
    tr = kernels.transform(raw, u, mc.DEFAULT_PROPOSAL)
    vals = kernels.i_integrand(tr)
    k = kernels.rotations(raw["gk"])
    coords, _ = kernels.iwasawa_parts(tr, k)
    return {"transform": tr, "i_integrand": vals, "rotations": k, "iwasawa_parts": coords}


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1 << 16)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--u", type=float, default=2.0)
    args = ap.parse_args()

    prop = mc.DEFAULT_PROPOSAL
    raw = mc._raw(np.random.default_rng(0), args.samples, prop.nu, with_k=True)
    # the sampler zeroes variates outside its box before the kernels see them
    dead = (np.abs(prop.mu_p + prop.sig_p * raw["tp"]) > mc.CLIP) | (np.abs(prop.mu_q + prop.sig_q * raw["tq"]) > mc.CLIP)
    raw["tp"][dead] = 0.0
    raw["tq"][dead] = 0.0
    outputs, timings = {}, {}
    for name in ("numba", "numpy"):
        set_backend(name)
        outputs[name] = _stages(raw, args.u)
        tr = outputs[name]["transform"]
        k = outputs[name]["rotations"]
        timings[name] = {
            "transform": _time(lambda: kernels.transform(raw, args.u, mc.DEFAULT_PROPOSAL), args.repeat),
            "i_integrand": _time(lambda: kernels.i_integrand(tr), args.repeat),
            "rotations": _time(lambda: kernels.rotations(raw["gk"]), args.repeat),
            "iwasawa_parts": _time(lambda: kernels.iwasawa_parts(tr, k), args.repeat),
        }

    print(f"{args.samples} samples, best of {args.repeat}, u = {args.u}")
    # per-sample agreement; the stragglers are cancellation points such as d' ~ 0
    # assembled from terms near 1e30, where the backends part by rounding
    print(f"{'kernel':<15}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}{'agree 1e-9':>12}")
    for stage in timings["numba"]:
        a, b = timings["numba"][stage], timings["numpy"][stage]
        x, y = outputs["numba"][stage], outputs["numpy"][stage]
        ok = np.isclose(x, y, rtol=1e-9, atol=0.0) | (np.isnan(x) & np.isnan(y))
        print(f"{stage:<15}{a * 1e3:>11.2f}{b * 1e3:>11.2f}{b / a:>9.1f}{ok.mean():>12.6f}")
    vn, vp = outputs["numba"]["i_integrand"], outputs["numpy"]["i_integrand"]
    print(f"I-integrand sums: numba {vn.sum():.12g}, numpy {vp.sum():.12g}, rel diff {abs(vn.sum() - vp.sum()) / abs(vp.sum()):.2e}")


if __name__ == "__main__":
    main()
