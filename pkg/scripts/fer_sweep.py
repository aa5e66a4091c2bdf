"""FER/SER versus Es/N0 for a code file (default: the bundled tiny GF(4) code).

    python3 scripts/fer_sweep.py --esn0 2 4 6 8 --frames 10000 --workers 4
"""

import argparse
import time

import numpy as np

from nbpadmm import channel
from nbpadmm.cli import tiny_code
from nbpadmm.codeio import load_code
from nbpadmm.config import DecoderConfig
from nbpadmm.sim import run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code")
    ap.add_argument("--esn0", type=float, nargs="+", default=[2, 4, 6, 8])
    ap.add_argument("--frames", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--source", choices=("random", "zeros"), default="random")
    args = ap.parse_args()

    code = tiny_code() if args.code is None else load_code(args.code)
    cfg = DecoderConfig.for_field(code.q)
    scheme = channel.scheme_for_field(code.q)
    print(f"# code={code.name or args.code} n={code.n} q={code.q} modulation={scheme.name}")
    print("esn0_db,frames,fer,fer_sigma,ser,mean_iterations,converged_rate,seconds")
    for snr in args.esn0:
        t0 = time.perf_counter()
        s = run_trials(code, scheme, snr, args.frames, cfg, args.seed,
                       source=args.source, workers=args.workers)
        conv = np.mean([r.converged for r in s.records])
        sig = np.sqrt(s.fer * (1 - s.fer) / s.frames)
        print(f"{snr},{s.frames},{s.fer:.6g},{sig:.2g},{s.ser:.6g},{s.mean_iterations:.1f},"
              f"{conv:.4f},{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
