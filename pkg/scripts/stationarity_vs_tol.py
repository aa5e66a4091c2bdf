"""KKT diagnostics of converged frames as the residual tolerance is tightened.

Decodes the same noisy frames at several stopping tolerances and reports the
box-direction stationarity residual together with the individual KKT terms.
"""

import argparse

import numpy as np

from nbpadmm import channel
from nbpadmm.cli import tiny_code
from nbpadmm.codeio import derive_encoder
from nbpadmm.config import DecoderConfig
from nbpadmm.padmm import decode_batch, kkt_report
from nbpadmm.qpbuild import assemble_model
from nbpadmm.sim import _transmit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--esn0", type=float, default=6.0)
    ap.add_argument("--frames", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, nargs="+", default=[1e-5, 1e-6, 1e-7, 1e-8])
    ap.add_argument("--max-iter", type=int, default=20000)
    args = ap.parse_args()

    code = tiny_code()
    scheme = channel.get_scheme("qpsk")
    enc = derive_encoder(code)
    gammas = np.array([_transmit(f, (code, enc, scheme, args.esn0, args.seed))[1]
                       for f in range(args.frames)])
    keys = ("box_stationarity", "primal_infeasibility", "dual_infeasibility", "complementarity",
            "full_gradient")
    print("tol,converged,mean_iter,frac_stat_gt_1e-3," + ",".join(f"max_{k}" for k in keys))
    for tol in args.tol:
        cfg = DecoderConfig(tol=tol, max_iter=args.max_iter)
        model = assemble_model(code, cfg)
        lam = model.extend_cost(gammas)
        out = decode_batch(model, lam, cfg)
        reps = [kkt_report(out.state.take(i), model, lam[i], cfg)
                for i in np.flatnonzero(out.converged)]
        stat = np.array([r["box_stationarity"] for r in reps])
        worst = [max(r[k] for r in reps) for k in keys]
        print(f"{tol:g},{out.converged.mean():.3f},{out.iterations.mean():.0f},"
              f"{np.mean(stat > 1e-3):.3f}," + ",".join(f"{w:.2e}" for w in worst))


if __name__ == "__main__":
    main()
