"""Proximal-ADMM decoder for the relaxed QP

    min  lambda^T v - (alpha/2) ||v - 0.5||^2   s.t.  A v <= b,  0 <= v <= 1

split as A v + e1 = b (e1 >= 0) and v = e2 (0 <= e2 <= 1).

Duals are kept scaled (u = y / mu). Every state array carries a leading
batch axis so several frames can be iterated together; frames never
interact, and a frame's trajectory does not depend on its batch mates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import DecoderConfig
from .qpbuild import QpModel

log = logging.getLogger(__name__)


@dataclass
class DecoderState:
    v: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    p: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    u1: np.ndarray   # y1 / mu
    u2: np.ndarray   # y2 / mu
    iter: int = 0
    r1sq: np.ndarray | None = None
    r2sq: np.ndarray | None = None

    def y1(self, mu: float) -> np.ndarray:
        return mu * self.u1

    def y2(self, mu: float) -> np.ndarray:
        return mu * self.u2

    def copy(self) -> "DecoderState":
        arrays = {k: getattr(self, k).copy() for k in ("v", "e1", "e2", "p", "z1", "z2", "u1", "u2")}
        return DecoderState(**arrays, iter=self.iter,
                            r1sq=None if self.r1sq is None else self.r1sq.copy(),
                            r2sq=None if self.r2sq is None else self.r2sq.copy())

    def take(self, idx) -> "DecoderState":
        """Sub-batch view (copy) for frames ``idx``."""
        arrays = {k: getattr(self, k)[idx] for k in ("v", "e1", "e2", "p", "z1", "z2", "u1", "u2")}
        return DecoderState(**arrays, iter=self.iter,
                            r1sq=None if self.r1sq is None else self.r1sq[idx],
                            r2sq=None if self.r2sq is None else self.r2sq[idx])


@dataclass
class FrameResult:
    frame_index: int
    iterations: int
    converged: bool
    syndrome_valid: bool
    symbol_errors: int = 0
    r1sq: float = float("nan")
    r2sq: float = float("nan")

    @property
    def frame_error(self) -> bool:
        return self.symbol_errors > 0


def init_state(model: QpModel, batch: int | None = None) -> DecoderState:
    lead = () if batch is None else (batch,)
    N, M = model.N, model.M
    z = np.zeros
    return DecoderState(z(lead + (N,)), z(lead + (M,)), z(lead + (N,)), z(lead + (N,)),
                        z(lead + (M,)), z(lead + (N,)), z(lead + (M,)), z(lead + (N,)))


def residuals(state: DecoderState, model: QpModel, Av: np.ndarray | None = None):
    """Squared norms ||Av + e1 - b||^2 and ||v - e2||^2 (per frame)."""
    if Av is None:
        Av = model.matvec(state.v)
    r1 = Av + state.e1 - model.b
    r2 = state.v - state.e2
    return np.einsum("...i,...i->...", r1, r1), np.einsum("...i,...i->...", r2, r2)


def cost_offset(lam: np.ndarray, config: DecoderConfig) -> np.ndarray:
    """(lambda + alpha/2) / mu, fixed for a frame."""
    return (lam + 0.5 * config.alpha) / config.mu


def phi_vector(state: DecoderState, model: QpModel, lam: np.ndarray, config: DecoderConfig,
               offset: np.ndarray | None = None) -> np.ndarray:
    if offset is None:
        offset = cost_offset(lam, config)
    return (model.rmatvec(model.b - state.e1 - state.u1)
            + (state.e2 - state.u2)
            + (config.rho / config.mu) * state.p
            - offset)


def v_update(model: QpModel, phi: np.ndarray) -> np.ndarray:
    """Solve (A^T A + eps I) v = phi block by block."""
    lead = phi.shape[:-1]
    blocks = phi.reshape(lead + (model.n_vars, model.block))
    sums = blocks.sum(axis=-1, keepdims=True)
    v = (model.theta - model.omega)[:, None] * blocks + model.omega[:, None] * sums
    return v.reshape(phi.shape)


def e1_update(state: DecoderState, model: QpModel, config: DecoderConfig,
              Av: np.ndarray | None = None) -> np.ndarray:
    if Av is None:
        Av = model.matvec(state.v)
    mu, rho = config.mu, config.rho
    arg = model.b - Av - state.u1 + (rho / mu) * state.z1
    return np.maximum(mu / (rho + mu) * arg, 0.0)


def e2_update(state: DecoderState, config: DecoderConfig) -> np.ndarray:
    mu, rho = config.mu, config.rho
    arg = state.v + state.u2 + (rho / mu) * state.z2
    return np.clip(mu / (rho + mu) * arg, 0.0, 1.0)


def relax_and_dual_update(state: DecoderState, model: QpModel, config: DecoderConfig,
                          Av: np.ndarray | None = None) -> None:
    """p, z1, z2 relaxation and scaled dual steps; refreshes the residuals in place."""
    if Av is None:
        Av = model.matvec(state.v)
    beta = config.beta
    state.p = state.p + beta * (state.v - state.p)
    state.z1 = state.z1 + beta * (state.e1 - state.z1)
    state.z2 = state.z2 + beta * (state.e2 - state.z2)
    r1 = Av + state.e1 - model.b
    r2 = state.v - state.e2
    state.u1 = state.u1 + r1
    state.u2 = state.u2 + r2
    state.r1sq = np.einsum("...i,...i->...", r1, r1)
    state.r2sq = np.einsum("...i,...i->...", r2, r2)


def iterate(state: DecoderState, model: QpModel, lam: np.ndarray, config: DecoderConfig,
            offset: np.ndarray | None = None) -> DecoderState:
    """One full proximal-ADMM sweep, in place."""
    phi = phi_vector(state, model, lam, config, offset)
    state.v = v_update(model, phi)
    Av = model.matvec(state.v)
    state.e1 = e1_update(state, model, config, Av)
    state.e2 = e2_update(state, config)
    relax_and_dual_update(state, model, config, Av)
    state.iter += 1
    return state


def hard_decision(v: np.ndarray, model: QpModel) -> np.ndarray:
    """Per original symbol: argmax of its block if >= 0.5, else 0."""
    v = np.asarray(v)
    lead = v.shape[:-1]
    blocks = v[..., :model.n * model.block].reshape(lead + (model.n, model.block))
    best = np.argmax(blocks, axis=-1)
    top = np.take_along_axis(blocks, best[..., None], axis=-1)[..., 0]
    return np.where(top >= 0.5, best + 1, 0).astype(np.int64)


def _syndrome_ok(model: QpModel, words: np.ndarray) -> np.ndarray:
    if model.code is None:
        return np.zeros(words.shape[:-1], dtype=bool)
    return ~np.any(model.code.syndrome(words), axis=-1)


@dataclass
class BatchOutcome:
    words: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    syndrome_valid: np.ndarray
    r1sq: np.ndarray
    r2sq: np.ndarray
    state: DecoderState     # final state of every frame, batch order preserved


def decode_batch(model: QpModel, lam: np.ndarray, config: DecoderConfig,
                 trajectory: list | None = None) -> BatchOutcome:
    """Decode a (B, N) batch of extended cost vectors.

    Frames leave the batch as soon as both squared residuals are <= tol (or,
    with ``stop_on_codeword``, once the hard decision is a codeword).
    ``trajectory`` collects (frame, iteration, r1sq, r2sq) rows.
    """
    lam = np.atleast_2d(np.asarray(lam, dtype=np.float64))
    B = lam.shape[0]
    final = init_state(model, B)
    final.r1sq, final.r2sq = residuals(final, model)
    iters = np.zeros(B, dtype=np.int64)
    conv = np.zeros(B, dtype=bool)

    active = np.arange(B)
    state = init_state(model, B)
    offset = cost_offset(lam, config)
    for k in range(1, config.max_iter + 1):
        iterate(state, model, lam[active], config, offset[active])
        if trajectory is not None:
            trajectory.extend((int(f), k, float(a), float(b))
                              for f, a, b in zip(active, state.r1sq, state.r2sq))
        done = (state.r1sq <= config.tol) & (state.r2sq <= config.tol)
        conv[active[done]] = True
        if config.stop_on_codeword:
            done |= _syndrome_ok(model, hard_decision(state.v, model))
        if k == config.max_iter:
            done[:] = True
        if done.any():
            idx = active[done]
            iters[idx] = k
            for name in ("v", "e1", "e2", "p", "z1", "z2", "u1", "u2", "r1sq", "r2sq"):
                getattr(final, name)[idx] = getattr(state, name)[done]
            keep = ~done
            active = active[keep]
            if active.size == 0:
                break
            state = state.take(keep)
    final.iter = int(iters.max(initial=0))
    words = hard_decision(final.v, model)
    return BatchOutcome(words, iters, conv, _syndrome_ok(model, words),
                        final.r1sq, final.r2sq, final)


def decode(model: QpModel, lam: np.ndarray, config: DecoderConfig,
           trajectory: list | None = None) -> tuple[np.ndarray, FrameResult, DecoderState]:
    """Decode one frame; returns (hard word, result, final state)."""
    lam = np.asarray(lam, dtype=np.float64)
    if lam.shape != (model.N,):
        raise ValueError(f"extended cost vector must have length {model.N}")
    out = decode_batch(model, lam[None], config, trajectory)
    res = FrameResult(0, int(out.iterations[0]), bool(out.converged[0]),
                      bool(out.syndrome_valid[0]), r1sq=float(out.r1sq[0]),
                      r2sq=float(out.r2sq[0]))
    st = out.state.take(0)
    st.iter = res.iterations
    return out.words[0], res, st


def lagrangian_gradient(state: DecoderState, model: QpModel, lam: np.ndarray,
                        config: DecoderConfig, v: np.ndarray | None = None) -> np.ndarray:
    """grad g(v) + A^T y1 with g(v) = lambda^T v - (alpha/2)||v - 0.5||^2."""
    if v is None:
        v = np.clip(state.v, 0.0, 1.0)
    return lam - config.alpha * (v - 0.5) + model.rmatvec(config.mu * state.u1)


def stationarity_residual(state: DecoderState, model: QpModel, lam: np.ndarray,
                          config: DecoderConfig) -> float:
    """Largest violation of (w - v)^T r >= 0 over the 2N box-coordinate moves.

    v is the final iterate clipped to [0, 1] and r = grad g(v) + A^T y1 the
    gradient of the Lagrangian of the linear constraints; the box
    multiplier y2 is accounted for by restricting to moves that stay inside
    [0, 1]. Moving coordinate l to 1 or to 0 violates the inequality by
    -(1 - v_l) r_l or v_l r_l respectively. Zero at a KKT point.
    """
    v = np.clip(state.v, 0.0, 1.0)
    r = lagrangian_gradient(state, model, lam, config, v)
    return float(max(0.0, np.max(-(1.0 - v) * r), np.max(v * r)))


def kkt_report(state: DecoderState, model: QpModel, lam: np.ndarray,
               config: DecoderConfig) -> dict:
    """Individual KKT violations at the clipped final iterate (diagnostics)."""
    v = np.clip(state.v, 0.0, 1.0)
    y1 = config.mu * state.u1
    y2 = config.mu * state.u2
    slack = model.b - model.matvec(v)
    grad = lam - config.alpha * (v - 0.5)
    return {
        "box_stationarity": stationarity_residual(state, model, lam, config),
        "primal_infeasibility": float(np.max(np.maximum(-slack, 0.0))),
        "dual_infeasibility": float(np.max(np.maximum(-y1, 0.0))),
        "complementarity": float(np.max(np.minimum(np.maximum(y1, 0.0), np.maximum(slack, 0.0)))),
        "full_gradient": float(np.max(np.abs(grad + model.rmatvec(y1) + y2))),
    }
