"""Command line front end: validate, decode, simulate, oracle-compare.

Exit status: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from . import channel
from .codeio import CodeFormatError, load_code, parse_code
from .config import ConfigError, DecoderConfig
from .field import apply_permutation, permutation_matrix, symbol_to_binary
from .oracle import all_codewords, codeword_costs, dense_inverse, ml_decode_bruteforce
from .padmm import decode, decode_batch
from .qpbuild import QpModel, UnsupportedCheckDegree, assemble_model
from .sim import format_csv, run_trials

log = logging.getLogger("nbpadmm")


def tiny_code_text() -> str:
    return resources.files("nbpadmm").joinpath("data/tiny_gf4.nbc").read_text(encoding="utf-8")


def tiny_code():
    return parse_code(tiny_code_text(), name="tiny_gf4")


def validate_model(model: QpModel, A: sp.spmatrix | None = None, spot_checks: int = 8) -> list[str]:
    """Structural checks on an assembled model; returns failure messages."""
    failures = []
    if A is None:
        A = model.to_sparse()
    A = sp.csr_matrix(A)
    if A.shape != (model.M, model.N):
        failures.append(f"A has shape {A.shape}, expected {(model.M, model.N)}")
        return failures
    vals = A.data
    if not np.all(np.isin(vals, (-1, 0, 1))):
        bad = vals[~np.isin(vals, (-1, 0, 1))][0]
        failures.append(f"entries of A must be 0, 1 or -1; found {bad}")

    half = model.ctx.order // 2
    pos = (A[:model.M_check] > 0).sum(axis=1).A1
    neg = (A[:model.M_check] < 0).sum(axis=1).A1
    # rows 0-2 of each group: one slot positive, two negative; row 3: all positive
    expect_pos = np.tile([half, half, half, 3 * half], model.M_check // 4)
    expect_neg = np.tile([2 * half, 2 * half, 2 * half, 0], model.M_check // 4)
    if not (np.array_equal(pos, expect_pos) and np.array_equal(neg, expect_neg)):
        failures.append("check rows do not have balanced bit-row supports of size 2^(q-1)")
    simplex = A[model.M_check:]
    if not np.array_equal(simplex.sum(axis=1).A1, np.full(model.n_vars, model.block)):
        failures.append("simplex rows must each sum a full (2^q-1) block")

    ctx = model.ctx
    for h in range(1, ctx.order):
        perm = permutation_matrix(h, ctx)
        for u in range(ctx.order):
            if not np.array_equal(apply_permutation(perm, symbol_to_binary(u, ctx)),
                                  symbol_to_binary(ctx.mul(h, u), ctx)):
                failures.append(f"permutation of symbol {u} by {h} is not the product embedding")
                break

    AtA = (A.T @ A).tocsr()
    Q = model.block
    blk = np.arange(model.N) // Q
    coo = AtA.tocoo()
    if np.any((blk[coo.row] != blk[coo.col]) & (coo.data != 0)):
        failures.append("A^T A is not block diagonal")
    rng = np.random.default_rng(0)
    for i in rng.choice(model.n_vars, size=min(spot_checks, model.n_vars), replace=False):
        sl = slice(i * Q, (i + 1) * Q)
        block = AtA[sl, sl].toarray() + model.eps * np.eye(Q)
        closed = (model.theta[i] - model.omega[i]) * np.eye(Q) + model.omega[i]
        if np.max(np.abs(closed - dense_inverse(block))) > 1e-9:
            failures.append(f"closed-form block inverse disagrees with elimination at variable {i}")
    return failures


def _config_from(args, q: int) -> DecoderConfig:
    return DecoderConfig.for_field(q, mu=args.mu, alpha=args.alpha, rho=args.rho,
                                   beta=args.beta, tol=args.tol, max_iter=args.max_iter)


def _load_code(args):
    return tiny_code() if args.code is None else load_code(args.code)


def _scheme(args, q: int):
    return channel.scheme_for_field(q) if args.mod is None else channel.get_scheme(args.mod)


def _write_trajectory(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("frame,iteration,r1sq,r2sq\n")
        for f, k, a, b in rows:
            fh.write(f"{f},{k},{a!r},{b!r}\n")


def cmd_validate(args) -> int:
    code = _load_code(args)
    model = assemble_model(code, _config_from(args, code.q))
    A = None
    if args.matrix:
        A = scipy.io.mmread(args.matrix)
    failures = validate_model(model, A)
    for msg in failures:
        print(f"FAIL {msg}")
    if failures:
        return 1
    print(f"OK n={code.n} m={code.m} q={code.q} Gc={model.gamma_c} Ga={model.gamma_a} "
          f"M={model.M} N={model.N}")
    if args.dump_matrix:
        model.dump_matrix_market(args.dump_matrix)
    return 0


def cmd_decode(args) -> int:
    code = _load_code(args)
    gamma, n, q = channel.load_cost_vector(args.cost)
    if (n, q) != (code.n, code.q):
        print(f"cost vector is for n={n} q={q}, code has n={code.n} q={code.q}", file=sys.stderr)
        return 2
    config = _config_from(args, q)
    model = assemble_model(code, config)
    traj = [] if args.dump_trajectory else None
    word, res, _ = decode(model, model.extend_cost(gamma), config, traj)
    print(" ".join(str(int(s)) for s in word))
    print(f"# iterations={res.iterations} converged={int(res.converged)} "
          f"syndrome_valid={int(res.syndrome_valid)} r1sq={res.r1sq:.3e} r2sq={res.r2sq:.3e}")
    if traj is not None:
        _write_trajectory(args.dump_trajectory, traj)
    return 0


def cmd_simulate(args) -> int:
    code = _load_code(args)
    config = _config_from(args, code.q)
    scheme = _scheme(args, code.q)
    traj = [] if args.dump_trajectory else None
    summary = run_trials(code, scheme, args.esn0, args.frames, config, args.seed,
                         source=args.source, workers=args.workers, trajectory=traj)
    text = format_csv(summary)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"fer={summary.fer:.6g} ser={summary.ser:.6g} "
              f"mean_iterations={summary.mean_iterations:.2f} -> {args.out}")
    else:
        sys.stdout.write(text)
    if traj is not None:
        _write_trajectory(args.dump_trajectory, traj)
    return 0


def oracle_compare(code, scheme, esn0_db, frames, config, seed, source="random"):
    """Run the decoder and the brute-force ML decoder on the same frames.

    Returns (agreement rate, number of valid decoder outputs that cost more
    than the ML codeword by over 1e-6, summary).
    """
    from .sim import _transmit
    from .codeio import derive_encoder

    model = assemble_model(code, config)
    enc = derive_encoder(code) if source == "random" else None
    book = all_codewords(code)
    sent, gammas = zip(*(_transmit(f, (code, enc, scheme, esn0_db, seed)) for f in range(frames)))
    gammas = np.array(gammas)
    out = decode_batch(model, model.extend_cost(gammas), config)
    agree, worse = 0, 0
    for i in range(frames):
        ml = ml_decode_bruteforce(code, gammas[i], book)
        agree += bool(np.array_equal(ml, out.words[i]))
        if out.syndrome_valid[i]:
            c_dec = codeword_costs(out.words[i][None], gammas[i], code.q)[0]
            c_ml = codeword_costs(ml[None], gammas[i], code.q)[0]
            worse += c_dec < c_ml - 1e-6
    return agree / frames, worse, out


def cmd_oracle_compare(args) -> int:
    code = _load_code(args)
    config = _config_from(args, code.q)
    scheme = _scheme(args, code.q)
    t0 = time.perf_counter()
    rate, worse, _ = oracle_compare(code, scheme, args.esn0, args.frames, config, args.seed, args.source)
    print(f"agreement={rate:.4f} frames={args.frames} esn0_db={args.esn0} "
          f"better_than_ml={worse} elapsed_s={time.perf_counter() - t0:.1f}")
    return 0 if worse == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nbpadmm", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_channel=False):
        p.add_argument("--code", help="code file (default: bundled tiny GF(4) code)")
        p.add_argument("--mu", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", type=int)
        if needs_channel:
            p.add_argument("--mod", choices=("bpsk", "qpsk", "qam16"))
            p.add_argument("--esn0", type=float, required=True, help="Es/N0 in dB")
            p.add_argument("--frames", type=int, default=100)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--source", choices=("zeros", "random"), default="random")

    p = sub.add_parser("validate", help="structural checks of the QP model of a code")
    common(p)
    p.add_argument("--matrix", help="Matrix Market dump of A to check instead of the assembled one")
    p.add_argument("--dump-matrix", help="write A as Matrix Market text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decode", help="decode one dumped cost vector")
    common(p)
    p.add_argument("--cost", required=True)
    p.add_argument("--dump-trajectory")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo FER/SER run, CSV output")
    common(p, needs_channel=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump-trajectory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-compare", help="decoder vs brute-force ML on a small code")
    common(p, needs_channel=True)
    p.set_defaults(func=cmd_oracle_compare)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CodeFormatError, UnsupportedCheckDegree, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
