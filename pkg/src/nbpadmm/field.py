"""Arithmetic in GF(2^q), q <= 8.

Elements are unsigned integers below 2^q whose bits are polynomial
coefficients. Addition is XOR. Multiplication uses log/antilog tables built
from a fixed primitive polynomial per q:

    q=1  x + 1                     (GF(2), multiplication is AND)
    q=2  x^2 + x + 1               0x7
    q=3  x^3 + x + 1               0xB
    q=4  x^4 + x + 1               0x13
    q=5  x^5 + x^2 + 1             0x25
    q=6  x^6 + x^4 + x^3 + x + 1   0x5B
    q=7  x^7 + x + 1               0x83
    q=8  x^8 + x^4 + x^3 + x^2 + 1 0x11D

All but q=1 are the Conway polynomials. The choice pins the field labelling;
any irreducible polynomial gives an isomorphic field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1011011,
    7: 0b10000011,
    8: 0b100011101,
}

MAX_Q = 8


@dataclass(frozen=True, eq=False)
class FieldContext:
    """Tables for one field GF(2^q). Immutable; share freely."""

    q: int
    primitive_poly: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return 1 << self.q

    @property
    def nonzero(self) -> int:
        """Number of nonzero elements, 2^q - 1 (the one-hot block length)."""
        return (1 << self.q) - 1

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^q)")
        return int(self.antilog_table[(self.nonzero - self.log_table[a]) % self.nonzero])


def _build_tables(q: int, poly: int):
    size = 1 << q
    period = size - 1
    antilog = np.zeros(size, dtype=np.int64)
    log = np.zeros(size, dtype=np.int64)
    x = 1
    for k in range(period):
        antilog[k] = x
        log[x] = k
        x <<= 1
        if x & size:
            x ^= poly
        # q=1: x + 1 reduces 2 -> 1, so the generator is 1 itself
    antilog[period] = antilog[0]
    log[0] = -1
    mul = np.zeros((size, size), dtype=np.int64)
    nz = np.arange(1, size)
    mul[1:, 1:] = antilog[(log[nz][:, None] + log[nz][None, :]) % period]
    return log, antilog, mul


@lru_cache(maxsize=None)
def get_field(q: int) -> FieldContext:
    """Return the (cached) field context for GF(2^q)."""
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_Q:
        raise ValueError(f"field exponent q must be in 1..{MAX_Q}, got {q!r}")
    q = int(q)
    poly = PRIMITIVE_POLYS[q]
    log, antilog, mul = _build_tables(q, poly)
    for t in (log, antilog, mul):
        t.setflags(write=False)
    return FieldContext(q, poly, log, antilog, mul)


def gf_mul(a: int, b: int, ctx: FieldContext) -> int:
    return ctx.mul(a, b)


def symbol_to_binary(u: int, ctx: FieldContext) -> np.ndarray:
    """One-hot embedding: position u-1 set for nonzero u, all zeros for u = 0."""
    if not 0 <= u < ctx.order:
        raise ValueError(f"symbol {u} outside GF(2^{ctx.q})")
    x = np.zeros(ctx.nonzero, dtype=np.int64)
    if u:
        x[u - 1] = 1
    return x


def symbols_to_binary(word, ctx: FieldContext) -> np.ndarray:
    """Concatenated one-hot embedding of a whole word (length n*(2^q-1))."""
    word = np.asarray(word, dtype=np.int64)
    x = np.zeros((word.size, ctx.nonzero), dtype=np.int64)
    nz = np.flatnonzero(word)
    x[nz, word[nz] - 1] = 1
    return x.ravel()


def permutation_matrix(h: int, ctx: FieldContext) -> np.ndarray:
    """Index map of D(h): entry j-1 holds the (1-based) row of column j's one.

    Column j of D(h) has its single one in row j*h, so D(h) applied to the
    embedding of u gives the embedding of h*u.
    """
    if h == 0:
        raise ValueError("permutation matrix needs a nonzero coefficient")
    if not 0 < h < ctx.order:
        raise ValueError(f"coefficient {h} outside GF(2^{ctx.q})")
    return ctx.mul_table[np.arange(1, ctx.order), h].copy()


def apply_permutation(perm: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Compute D x for D given as an index map."""
    out = np.zeros_like(x)
    out[perm - 1] = x
    return out


def permutation_dense(h: int, ctx: FieldContext) -> np.ndarray:
    """Dense 0/1 form of D(h); debugging and oracle comparisons only."""
    perm = permutation_matrix(h, ctx)
    d = np.zeros((ctx.nonzero, ctx.nonzero), dtype=np.int64)
    d[perm - 1, np.arange(ctx.nonzero)] = 1
    return d


def bit_matrix(ctx: FieldContext) -> np.ndarray:
    """q x (2^q-1) matrix whose column alpha-1 is the binary expansion of alpha.

    Row i holds bit i (least significant first).
    """
    alphas = np.arange(1, ctx.order)
    return (alphas[None, :] >> np.arange(ctx.q)[:, None]) & 1


def _popcount_parity(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64).copy()
    p = np.zeros_like(x)
    while np.any(x):
        p ^= x & 1
        x >>= 1
    return p


def bit_row_after_permutation(ell: int, h: int, ctx: FieldContext) -> np.ndarray:
    """Row r with r[j-1] = parity(ell & (j*h)) for j = 1..2^q-1.

    This is the bit-combination selected by ell (XOR of the bits in ell)
    of the product j*h; it has exactly 2^(q-1) ones.
    """
    if not 0 < ell < ctx.order:
        raise ValueError(f"combination index {ell} must be a nonzero field element")
    perm = permutation_matrix(h, ctx)
    return _popcount_parity(perm & ell)


def bit_rows_table(ctx: FieldContext) -> np.ndarray:
    """parity(ell & alpha) for every nonzero ell, alpha; shape (2^q-1, 2^q-1)."""
    a = np.arange(1, ctx.order)
    return _popcount_parity(a[:, None] & a[None, :])
