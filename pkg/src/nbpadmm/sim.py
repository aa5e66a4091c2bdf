"""Monte Carlo FER/SER harness.

Frame f draws all its randomness from SeedSequence(master_seed,
spawn_key=(f,)), and frames are decoded in fixed chunks of consecutive
indices, so results do not depend on how many workers share the chunks.
"""

from __future__ import annotations

import io
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ModulationScheme, awgn, cost_vector, modulate
from .codeio import ParityCheckCode, derive_encoder
from .config import ConfigError, DecoderConfig
from .padmm import FrameResult, decode_batch
from .qpbuild import QpModel, assemble_model

log = logging.getLogger(__name__)

CSV_COLUMNS = ("frame", "iterations", "converged", "syndrome_valid", "symbol_errors", "frame_error")
CHUNK = 256


@dataclass
class RunSummary:
    frames: int
    fer: float
    ser: float
    mean_iterations: float
    config: DecoderConfig
    code_name: str
    seed: int
    esn0_db: float
    modulation: str
    source: str
    records: list[FrameResult] = field(default_factory=list, repr=False)

    @property
    def frame_errors(self) -> int:
        return sum(r.frame_error for r in self.records)


def frame_rng(master_seed: int, frame_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(frame_index,)))


def _transmit(frame: int, ctx_args):
    code, enc, scheme, esn0_db, seed = ctx_args
    rng = frame_rng(seed, frame)
    if enc is None:
        word = np.zeros(code.n, dtype=np.int64)
    else:
        word = enc.encode(rng.integers(0, 1 << code.q, size=enc.k))
    r = awgn(modulate(word, scheme, code.q), esn0_db, rng)
    return word, cost_vector(r, scheme, esn0_db)


def _run_chunk(args):
    frames, model, enc, scheme, esn0_db, seed, config, want_traj = args
    code = model.code
    sent, gammas = zip(*(_transmit(f, (code, enc, scheme, esn0_db, seed)) for f in frames))
    sent = np.array(sent)
    lam = model.extend_cost(np.array(gammas))
    traj = [] if want_traj else None
    out = decode_batch(model, lam, config, traj)
    errs = np.count_nonzero(out.words != sent, axis=1)
    records = [FrameResult(int(f), int(out.iterations[i]), bool(out.converged[i]),
                           bool(out.syndrome_valid[i]), int(errs[i]),
                           float(out.r1sq[i]), float(out.r2sq[i]))
               for i, f in enumerate(frames)]
    if traj is not None:
        traj = [(int(frames[i]), k, a, b) for i, k, a, b in traj]
    return records, traj


def run_trials(code: ParityCheckCode, scheme: ModulationScheme, esn0_db: float, frames: int,
               config: DecoderConfig, master_seed: int, source: str = "random",
               workers: int = 1, model: QpModel | None = None,
               trajectory: list | None = None) -> RunSummary:
    if frames < 1:
        raise ValueError("need at least one frame")
    if scheme.q != code.q:
        raise ConfigError(f"modulation {scheme.name} needs q={scheme.q}, code has q={code.q}")
    if source not in ("random", "zeros"):
        raise ValueError(f"unknown source {source!r}")
    if model is None:
        model = assemble_model(code, config)
    enc = None
    if source == "random":
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                enc = derive_encoder(code)
        except ValueError:
            warnings.warn("no encoder for this code; transmitting all-zeros words", stacklevel=2)
            source = "zeros"

    idx = np.arange(frames)
    jobs = [(idx[s:s + CHUNK], model, enc, scheme, esn0_db, master_seed, config,
             trajectory is not None) for s in range(0, frames, CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    records = [r for recs, _ in results for r in recs]
    if trajectory is not None:
        for _, t in results:
            trajectory.extend(t)
    n_err = sum(r.frame_error for r in records)
    sym = sum(r.symbol_errors for r in records)
    return RunSummary(frames, n_err / frames, sym / (frames * code.n),
                      float(np.mean([r.iterations for r in records])),
                      config, code.name, master_seed, esn0_db, scheme.name, source, records)


def format_csv(summary: RunSummary) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in summary.records:
        buf.write(f"{r.frame_index},{r.iterations},{int(r.converged)},{int(r.syndrome_valid)},"
                  f"{r.symbol_errors},{int(r.frame_error)}\n")
    cfg = summary.config
    buf.write(f"# frames={summary.frames}\n")
    buf.write(f"# fer={summary.fer!r}\n")
    buf.write(f"# ser={summary.ser!r}\n")
    buf.write(f"# mean_iterations={summary.mean_iterations!r}\n")
    buf.write(f"# code={summary.code_name} modulation={summary.modulation} "
              f"esn0_db={summary.esn0_db!r} seed={summary.seed} source={summary.source}\n")
    buf.write(f"# config mu={cfg.mu!r} alpha={cfg.alpha!r} rho={cfg.rho!r} beta={cfg.beta!r} "
              f"tol={cfg.tol!r} max_iter={cfg.max_iter}\n")
    return buf.getvalue()


def read_csv_records(text: str) -> tuple[list[dict], dict]:
    """Parse a CSV written by ``format_csv``; returns (rows, summary fields)."""
    rows, meta = [], {}
    lines = text.splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        rows.append(dict(zip(header, (int(x) for x in line.split(",")))))
    return rows, meta
