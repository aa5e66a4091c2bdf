"""Per-iteration wall time versus block length for random (3,6)-regular codes."""

import argparse
import time

import numpy as np

from nbpadmm.codeio import regular_code
from nbpadmm.config import DecoderConfig
from nbpadmm.padmm import cost_offset, init_state, iterate
from nbpadmm.qpbuild import assemble_model


def per_iteration(model, lam, cfg, iters, reps, batch):
    lam = np.broadcast_to(lam, (batch, model.N)).copy()
    off = cost_offset(lam, cfg)
    best = np.inf
    for _ in range(reps):
        s = init_state(model, batch)
        t0 = time.perf_counter()
        for _ in range(iters):
            iterate(s, model, lam, cfg, off)
        best = min(best, (time.perf_counter() - t0) / iters)
    return best / batch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[2])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 200, 400, 800, 1600])
    ap.add_argument("--iters", type=int, default=20)
    ap.add_argument("--reps", type=int, default=7)
    ap.add_argument("--batch", type=int, default=1, help="frames iterated together")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = DecoderConfig()
    print("q,n,N,M,us_per_frame_iteration,us_per_column")
    for q in args.q:
        ns, ts = [], []
        for n in args.n:
            model = assemble_model(regular_code(n, q, rng=rng), cfg)
            lam = model.extend_cost(rng.standard_normal(n * model.block))
            t = per_iteration(model, lam, cfg, args.iters, args.reps, args.batch)
            ns.append(n)
            ts.append(t)
            print(f"{q},{n},{model.N},{model.M},{t * 1e6:.1f},{t * 1e6 / model.N:.4f}")
        ns, ts = np.array(ns), np.array(ts)
        slope, icpt = np.polyfit(ns, ts, 1)
        r2 = 1 - np.sum((ts - slope * ns - icpt) ** 2) / np.sum((ts - ts.mean()) ** 2)
        print(f"# q={q} linear fit R2={r2:.4f} doubling ratios={np.round(ts[1:] / ts[:-1], 2).tolist()}")


if __name__ == "__main__":
    main()
