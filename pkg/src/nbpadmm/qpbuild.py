"""Relaxed QP decoding model: three-variable checks, constraint matrix A, b.

Row layout of A (M = 4(2^q-1)Gc + n + Ga rows, N = (2^q-1)(n + Ga) columns):

* for each three-variable check tau, for each nonzero ell in GF(2^q), four
  rows with sign pattern P = [+--, -+-, --+, +++] and RHS (0, 0, 0, 2);
* then one simplex row per extended variable (block sum <= 1).

Each check row touches, for slot k, the 2^(q-1) columns j of that variable's
block where parity(ell & (j * h_k)) = 1. A is stored as those index sets
("slot groups") so A @ v and A.T @ y are signed gathers with no
multiplications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.io
import scipy.sparse as sp

from .codeio import ParityCheckCode
from .config import DecoderConfig
from .field import FieldContext, bit_row_after_permutation, bit_rows_table, get_field

P_SIGNS = np.array([[1, -1, -1], [-1, 1, -1], [-1, -1, 1], [1, 1, 1]], dtype=np.int64)
T_RHS = np.array([0, 0, 0, 2], dtype=np.int64)


class UnsupportedCheckDegree(ValueError):
    pass


class ThreeVarCheck(NamedTuple):
    variables: tuple[int, int, int]
    coefs: tuple[int, int, int]
    origin: int


def decompose(code: ParityCheckCode) -> tuple[list[ThreeVarCheck], int]:
    """Chain every check of degree d into d-2 three-variable checks.

    Auxiliaries get indices n, n+1, ... in order of creation and always
    carry coefficient 1:
        (h1 u1, h2 u2, g1), (g_t, h_{t+2} u_{t+2}, g_{t+1}) for t=1..d-4,
        (g_{d-3}, h_{d-1} u_{d-1}, h_d u_d).
    """
    checks: list[ThreeVarCheck] = []
    next_aux = code.n
    for j, row in enumerate(code.rows):
        d = len(row)
        if d < 3:
            raise UnsupportedCheckDegree(f"check {j} has degree {d}; the decomposer needs degree >= 3")
        cols = [c for c, _ in row]
        hs = [h for _, h in row]
        if d == 3:
            checks.append(ThreeVarCheck(tuple(cols), tuple(hs), j))
            continue
        aux = list(range(next_aux, next_aux + d - 3))
        next_aux += d - 3
        checks.append(ThreeVarCheck((cols[0], cols[1], aux[0]), (hs[0], hs[1], 1), j))
        for t in range(d - 4):
            checks.append(ThreeVarCheck((aux[t], cols[t + 2], aux[t + 1]), (1, hs[t + 2], 1), j))
        checks.append(ThreeVarCheck((aux[-1], cols[-2], cols[-1]), (1, hs[-2], hs[-1]), j))
    return checks, next_aux - code.n


def build_check_block(chk: ThreeVarCheck, ctx: FieldContext) -> tuple[np.ndarray, np.ndarray]:
    """Local (4(2^q-1)) x (3(2^q-1)) block and its RHS for one check.

    Local columns are the three one-hot blocks in slot order.
    """
    Q = ctx.nonzero
    block = np.zeros((4 * Q, 3 * Q), dtype=np.int64)
    for ell in range(1, ctx.order):
        r = [bit_row_after_permutation(ell, h, ctx) for h in chk.coefs]
        for p in range(4):
            row = 4 * (ell - 1) + p
            for k in range(3):
                block[row, k * Q:(k + 1) * Q] = P_SIGNS[p, k] * r[k]
    return block, np.tile(T_RHS, Q)


def compute_theta_omega(d, eps: float, q: int):
    """Entries of the inverse of one diagonal block of A^T A + eps I.

    The block has diagonal 2^(q+1) d + 1 + eps and off-diagonal 2^q d + 1,
    i.e. (2^q d + eps) I + (2^q d + 1) J, whose inverse is
    (theta - omega) I + omega J.
    """
    if not eps > 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("degrees must be nonnegative")
    size = (1 << q) - 1
    a = (1 << q) * d + eps
    c = (1 << q) * d + 1.0
    omega = -c / (a * (a + size * c))
    theta = omega + 1.0 / a
    return theta, omega


@dataclass(frozen=True, eq=False)
class QpModel:
    ctx: FieldContext
    n: int
    gamma_a: int
    checks: tuple[ThreeVarCheck, ...]
    check_vars: np.ndarray       # (Gc, 3)
    check_coefs: np.ndarray      # (Gc, 3)
    slot_cols: np.ndarray        # (Gc*Q*3, 2^(q-1)) column sets, group g = (tau*Q + ell-1)*3 + k
    col_groups: np.ndarray       # (N, width) groups touching each column, padded with G
    b: np.ndarray
    degrees: np.ndarray
    eps: float
    theta: np.ndarray
    omega: np.ndarray
    code: ParityCheckCode | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def block(self) -> int:
        return self.ctx.nonzero

    @property
    def gamma_c(self) -> int:
        return len(self.checks)

    @property
    def n_vars(self) -> int:
        return self.n + self.gamma_a

    @property
    def N(self) -> int:
        return self.block * self.n_vars

    @property
    def M_check(self) -> int:
        return 4 * self.block * self.gamma_c

    @property
    def M(self) -> int:
        return self.M_check + self.n_vars

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """A @ v for v of shape (N,) or (batch, N)."""
        v = np.asarray(v, dtype=np.float64)
        lead = v.shape[:-1]
        s = v[..., self.slot_cols].sum(axis=-1).reshape(lead + (-1, 3))
        s1, s2, s3 = s[..., 0], s[..., 1], s[..., 2]
        rows = np.stack([s1 - s2 - s3, s2 - s1 - s3, s3 - s1 - s2, s1 + s2 + s3], axis=-1)
        simplex = v.reshape(lead + (self.n_vars, self.block)).sum(axis=-1)
        return np.concatenate([rows.reshape(lead + (-1,)), simplex], axis=-1)

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        """A.T @ y for y of shape (M,) or (batch, M)."""
        y = np.asarray(y, dtype=np.float64)
        lead = y.shape[:-1]
        yc = y[..., :self.M_check].reshape(lead + (-1, 4))
        y1, y2, y3, y4 = yc[..., 0], yc[..., 1], yc[..., 2], yc[..., 3]
        t = np.stack([y1 - y2 - y3 + y4, y2 - y1 - y3 + y4, y3 - y1 - y2 + y4], axis=-1)
        t = np.concatenate([t.reshape(lead + (-1,)), np.zeros(lead + (1,))], axis=-1)
        out = t[..., self.col_groups].sum(axis=-1)
        out += np.repeat(y[..., self.M_check:], self.block, axis=-1)
        return out

    def to_sparse(self) -> sp.csr_matrix:
        Q, H = self.block, self.slot_cols.shape[1]
        G = self.slot_cols.shape[0]
        g = np.arange(G)
        k = g % 3
        rowbase = 4 * (g // 3)
        rows, cols, vals = [], [], []
        for p in range(4):
            rows.append(np.repeat(rowbase + p, H))
            cols.append(self.slot_cols.ravel())
            vals.append(np.repeat(P_SIGNS[p, k], H))
        rows.append(self.M_check + np.repeat(np.arange(self.n_vars), Q))
        cols.append(np.arange(self.N))
        vals.append(np.ones(self.N, dtype=np.int64))
        A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(self.M, self.N))
        return A.tocsr()

    def dump_matrix_market(self, path) -> None:
        scipy.io.mmwrite(str(path), self.to_sparse().tocoo(), field="integer",
                         comment="constraint matrix A of the relaxed decoding QP")

    def extend_cost(self, gamma: np.ndarray) -> np.ndarray:
        """lambda = [gamma; 0]: auxiliaries carry no channel cost."""
        gamma = np.asarray(gamma, dtype=np.float64)
        pad = np.zeros(gamma.shape[:-1] + (self.block * self.gamma_a,))
        return np.concatenate([gamma, pad], axis=-1)


def _ones_positions(ctx: FieldContext) -> np.ndarray:
    """pos[h, ell-1] = sorted j-1 with parity(ell & (j*h)) = 1; h = 0 unused."""
    Q, half = ctx.nonzero, ctx.order // 2
    R = bit_rows_table(ctx)
    pos = np.zeros((ctx.order, Q, half), dtype=np.int64)
    j = np.arange(1, ctx.order)
    for h in range(1, ctx.order):
        rows = R[:, ctx.mul_table[j, h] - 1]
        pos[h] = np.nonzero(rows)[1].reshape(Q, half)
    return pos


def assemble_model(code: ParityCheckCode, config: DecoderConfig | None = None,
                   eps: float | None = None) -> QpModel:
    """Build A, b, degrees and the block-inverse coefficients for ``code``."""
    ctx = get_field(code.q)
    if eps is None:
        eps = (config or DecoderConfig.for_field(code.q)).epsilon
    if not eps > 0:
        raise ValueError(f"epsilon = {eps} is not positive; need rho > alpha")
    checks, gamma_a = decompose(code)
    Q = ctx.nonzero
    n_vars = code.n + gamma_a
    N = Q * n_vars
    check_vars = np.array([c.variables for c in checks], dtype=np.int64).reshape(-1, 3)
    check_coefs = np.array([c.coefs for c in checks], dtype=np.int64).reshape(-1, 3)

    pos = _ones_positions(ctx)
    local = pos[check_coefs]                                # (Gc, 3, Q, H)
    slot = check_vars[:, :, None, None] * Q + local
    slot_cols = slot.transpose(0, 2, 1, 3).reshape(-1, local.shape[-1])
    G = slot_cols.shape[0]

    flat = slot_cols.ravel()
    group_of = np.repeat(np.arange(G), slot_cols.shape[1])
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat, minlength=N)
    width = max(int(counts.max(initial=0)), 1)
    col_groups = np.full((N, width), G, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    within = np.arange(flat.size) - np.repeat(starts, counts)
    col_groups[flat[order], within] = group_of[order]

    degrees = np.bincount(check_vars.ravel(), minlength=n_vars)
    theta, omega = compute_theta_omega(degrees, eps, ctx.q)
    b = np.concatenate([np.tile(T_RHS, Q * len(checks)), np.ones(n_vars, dtype=np.int64)])

    arrays = (check_vars, check_coefs, slot_cols, col_groups, b, degrees, theta, omega)
    for arr in arrays:
        arr.setflags(write=False)
    return QpModel(ctx, code.n, gamma_a, tuple(checks), check_vars, check_coefs, slot_cols,
                   col_groups, b, degrees, float(eps), theta, omega, code)
