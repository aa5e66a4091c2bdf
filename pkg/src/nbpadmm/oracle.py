"""Slow, independent references used to arbitrate the fast paths.

Nothing here imports qpbuild or padmm: the dense constraint matrix is built
from the matrix definitions (bit matrix, sign pattern, permutation matrices,
Kronecker selectors) rather than from the gather structures the decoder uses.
"""

from __future__ import annotations

import itertools

import numpy as np

from .codeio import ParityCheckCode, derive_encoder
from .field import FieldContext, bit_matrix, permutation_dense

MAX_CODEBOOK = 1 << 20

_P = np.array([[1, -1, -1], [-1, 1, -1], [-1, -1, 1], [1, 1, 1]])
_T = np.array([0, 0, 0, 2])


class SingularMatrixError(ArithmeticError):
    pass


class CodebookTooLarge(ValueError):
    pass


def poly_mulmod(a: int, b: int, poly: int, q: int) -> int:
    """Carry-less product reduced modulo ``poly`` (bit-serial, no tables)."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
    for bit in range(acc.bit_length() - 1, q - 1, -1):
        if acc >> bit & 1:
            acc ^= poly << (bit - q)
    return acc


def dense_inverse(mat, pivot_tol: float = 1e-12, check_tol: float = 1e-9) -> np.ndarray:
    """Gauss-Jordan inversion with partial pivoting."""
    A = np.array(mat, dtype=np.float64)
    n, m = A.shape
    if n != m:
        raise ValueError("matrix must be square")
    aug = np.hstack([A, np.eye(n)])
    for c in range(n):
        p = c + int(np.argmax(np.abs(aug[c:, c])))
        if abs(aug[p, c]) < pivot_tol:
            raise SingularMatrixError(f"pivot {aug[p, c]:.3e} below threshold in column {c}")
        if p != c:
            aug[[c, p]] = aug[[p, c]]
        aug[c] /= aug[c, c]
        for r in range(n):
            if r != c and aug[r, c] != 0.0:
                aug[r] -= aug[r, c] * aug[c]
    inv = aug[:, n:]
    err = np.max(np.abs(A @ inv - np.eye(n)), initial=0.0)
    if err > check_tol:
        raise SingularMatrixError(f"inverse check failed: max |M M^-1 - I| = {err:.3e}")
    return inv


def enumerate_three_var_solutions(h1: int, h2: int, h3: int, ctx: FieldContext) -> set:
    sols = set()
    for u in itertools.product(range(ctx.order), repeat=3):
        if ctx.mul(h1, u[0]) ^ ctx.mul(h2, u[1]) ^ ctx.mul(h3, u[2]) == 0:
            sols.add(u)
    return sols


def enumerate_check_solutions(coefs, ctx: FieldContext):
    """All assignments of a single check sum h_k u_k = 0 (exponential)."""
    for u in itertools.product(range(ctx.order), repeat=len(coefs)):
        acc = 0
        for h, x in zip(coefs, u):
            acc ^= ctx.mul(h, x)
        if acc == 0:
            yield u


def dense_check_block(coefs, ctx: FieldContext, redundant: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Rows for one three-variable check from the matrix definitions.

    ``redundant=False`` gives the 4q single-bit rows P T_i D; otherwise the
    4(2^q-1) rows P ((sum_{i in K_ell} T_i) mod 2) D for every nonzero ell.
    """
    q, Q = ctx.q, ctx.nonzero
    Bm = bit_matrix(ctx)
    D = np.zeros((3 * Q, 3 * Q), dtype=np.int64)
    for k, h in enumerate(coefs):
        D[k * Q:(k + 1) * Q, k * Q:(k + 1) * Q] = permutation_dense(h, ctx)
    T = [np.kron(np.eye(3, dtype=np.int64), Bm[i][None, :]) for i in range(q)]
    if redundant:
        combos = [[i for i in range(q) if ell >> i & 1] for ell in range(1, ctx.order)]
    else:
        combos = [[i] for i in range(q)]
    rows = [_P @ (sum(T[i] for i in K) % 2) @ D for K in combos]
    W = np.vstack(rows)
    return W, np.tile(_T, len(combos))


def dense_constraint_matrix(check_vars, check_coefs, n_vars: int, ctx: FieldContext):
    """Dense (A, b) with explicit Kronecker selectors and simplex rows."""
    Q = ctx.nonzero
    I = np.eye(Q, dtype=np.int64)
    blocks, rhs = [], []
    for vars_, coefs in zip(check_vars, check_coefs):
        sel = np.zeros((3, n_vars), dtype=np.int64)
        sel[np.arange(3), list(vars_)] = 1
        W, w = dense_check_block(coefs, ctx)
        blocks.append(W @ np.kron(sel, I))
        rhs.append(w)
    S = np.kron(np.eye(n_vars, dtype=np.int64), np.ones((1, Q), dtype=np.int64))
    A = np.vstack(blocks + [S])
    b = np.concatenate(rhs + [np.ones(n_vars, dtype=np.int64)])
    return A, b


def codeword_costs(words: np.ndarray, gamma: np.ndarray, q: int) -> np.ndarray:
    """gamma^T x for the one-hot embedding of each word (rows of ``words``)."""
    Q = (1 << q) - 1
    g = np.asarray(gamma, dtype=np.float64).reshape(-1, Q)
    padded = np.concatenate([np.zeros((g.shape[0], 1)), g], axis=1)
    return padded[np.arange(g.shape[0]), words].sum(axis=-1)


def all_codewords(code: ParityCheckCode) -> np.ndarray:
    enc = derive_encoder(code)
    size = (1 << code.q) ** enc.k
    if size > MAX_CODEBOOK:
        raise CodebookTooLarge(f"{size} codewords exceeds the enumeration bound {MAX_CODEBOOK}")
    msgs = np.array(list(itertools.product(range(1 << code.q), repeat=enc.k)), dtype=np.int64)
    return enc.encode(msgs.reshape(size, enc.k))


def ml_decode_bruteforce(code: ParityCheckCode, gamma, codebook: np.ndarray | None = None) -> np.ndarray:
    """Minimum-cost codeword; ties go to the lexicographically smallest word."""
    if codebook is None:
        codebook = all_codewords(code)
    costs = codeword_costs(codebook, gamma, code.q)
    best = costs.min()
    tied = codebook[costs == best]
    order = np.lexsort(tied.T[::-1])
    return tied[order[0]].copy()


def ml_decode_exhaustive(code: ParityCheckCode, gamma) -> np.ndarray:
    """Same minimiser found by scanning every word of GF(2^q)^n in lex order."""
    best, best_cost = None, np.inf
    for u in itertools.product(range(1 << code.q), repeat=code.n):
        w = np.array(u)
        if np.any(code.syndrome(w)):
            continue
        c = codeword_costs(w[None], gamma, code.q)[0]
        if c < best_cost:
            best, best_cost = w, c
    return best
