"""Nonbinary parity-check codes: text format, syndrome check, systematic encoder.

File format (whitespace separated integers, UTF-8)::

    n m q
    deg  i1 h1  i2 h2 ... ideg hdeg      # one line per check, 1-based columns

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .field import MAX_Q, FieldContext, get_field

log = logging.getLogger(__name__)


class CodeFormatError(ValueError):
    """Base class for code-file problems; ``line`` is 1-based (0 if unknown)."""

    def __init__(self, msg: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


class MalformedHeaderError(CodeFormatError):
    pass


class MalformedRowError(CodeFormatError):
    pass


class CoefficientOutOfFieldError(CodeFormatError):
    pass


class ZeroCoefficientError(CodeFormatError):
    pass


class DuplicateEntryError(CodeFormatError):
    pass


@dataclass(frozen=True, eq=False)
class ParityCheckCode:
    """Sparse m x n parity-check matrix over GF(2^q)."""

    n: int
    m: int
    q: int
    rows: tuple[tuple[tuple[int, int], ...], ...]  # per check: ((col, coef), ...)
    name: str = ""
    _dense: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.q <= MAX_Q:
            raise ValueError(f"unsupported field exponent q={self.q}")
        if len(self.rows) != self.m:
            raise ValueError("row count does not match m")
        H = np.zeros((self.m, self.n), dtype=np.int64)
        for j, row in enumerate(self.rows):
            cols = [c for c, _ in row]
            if len(set(cols)) != len(cols):
                raise DuplicateEntryError(f"check {j} repeats a column")
            if len(cols) < 2:
                raise MalformedRowError(f"check {j} touches fewer than 2 columns")
            for c, h in row:
                if not 0 <= c < self.n:
                    raise MalformedRowError(f"check {j}: column {c} out of range")
                if h == 0:
                    raise ZeroCoefficientError(f"check {j}: zero coefficient")
                if not 0 < h < (1 << self.q):
                    raise CoefficientOutOfFieldError(f"check {j}: coefficient {h} out of field")
                H[j, c] = h
        H.setflags(write=False)
        object.__setattr__(self, "_dense", H)

    @property
    def ctx(self) -> FieldContext:
        return get_field(self.q)

    @property
    def H(self) -> np.ndarray:
        return self._dense

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(j, c, h) for j, row in enumerate(self.rows) for c, h in row]

    @property
    def check_degrees(self) -> list[int]:
        return [len(r) for r in self.rows]

    def syndrome(self, word) -> np.ndarray:
        word = np.asarray(word, dtype=np.int64)
        if word.shape[-1] != self.n:
            raise ValueError(f"word length {word.shape[-1]} != n={self.n}")
        prods = self.ctx.mul_table[self._dense, word[..., None, :]]
        return np.bitwise_xor.reduce(prods, axis=-1)


def parse_code(text: str, name: str = "") -> ParityCheckCode:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise MalformedHeaderError("empty code file", 1)

    lineno, head = lines[0]
    try:
        n, m, q = (int(t) for t in head)
    except ValueError:
        raise MalformedHeaderError("header must be three integers 'n m q'", lineno) from None
    if n < 1 or m < 1:
        raise MalformedHeaderError("n and m must be positive", lineno)
    if not 1 <= q <= MAX_Q:
        raise MalformedHeaderError(f"q must be in 1..{MAX_Q}", lineno)
    if len(lines) - 1 != m:
        raise MalformedHeaderError(f"expected {m} check lines, found {len(lines) - 1}", lineno)

    rows = []
    for lineno, toks in lines[1:]:
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise MalformedRowError("non-integer token", lineno) from None
        deg = vals[0]
        if deg < 2 or len(vals) != 1 + 2 * deg:
            raise MalformedRowError(f"degree {deg} does not match {len(vals) - 1} entries", lineno)
        seen = set()
        row = []
        for col, h in zip(vals[1::2], vals[2::2]):
            if not 1 <= col <= n:
                raise MalformedRowError(f"column {col} outside 1..{n}", lineno)
            if h == 0:
                raise ZeroCoefficientError("zero coefficient", lineno)
            if not 0 < h < (1 << q):
                raise CoefficientOutOfFieldError(f"coefficient {h} out of field GF(2^{q})", lineno)
            if col in seen:
                raise DuplicateEntryError(f"duplicate entry for column {col}", lineno)
            seen.add(col)
            row.append((col - 1, h))
        rows.append(tuple(row))
    return ParityCheckCode(n, m, q, tuple(rows), name=name)


def load_code(path) -> ParityCheckCode:
    path = Path(path)
    return parse_code(path.read_text(encoding="utf-8"), name=path.stem)


def regular_code(n: int, q: int, dv: int = 3, dc: int = 6, rng=None, name: str = "") -> ParityCheckCode:
    """Random (dv, dc)-regular code with uniform nonzero coefficients.

    Sockets are matched by a random permutation, redrawn until no check
    touches the same column twice.
    """
    if (n * dv) % dc:
        raise ValueError("n * dv must be divisible by dc")
    rng = np.random.default_rng(rng)
    m = n * dv // dc
    while True:
        rows = rng.permutation(np.repeat(np.arange(n), dv)).reshape(m, dc)
        if all(len(set(r)) == dc for r in rows):
            break
    return ParityCheckCode(n, m, q, tuple(
        tuple((int(c), int(rng.integers(1, 1 << q))) for c in r) for r in rows),
        name=name or f"regular_{dv}_{dc}_n{n}_q{q}")


def serialize_code(code: ParityCheckCode) -> str:
    out = [f"{code.n} {code.m} {code.q}"]
    for row in code.rows:
        out.append(" ".join([str(len(row))] + [f"{c + 1} {h}" for c, h in row]))
    return "\n".join(out) + "\n"


def check_syndrome(code: ParityCheckCode, word) -> bool:
    return not np.any(code.syndrome(word))


@dataclass(frozen=True, eq=False)
class SystematicEncoder:
    """Encoder from the reduced row-echelon form of H.

    ``parity_map[r, f]`` gives the coefficient of message symbol f in pivot
    symbol r (characteristic two, so no sign flips).
    """

    ctx: FieldContext
    n: int
    pivots: np.ndarray
    free: np.ndarray
    parity_map: np.ndarray

    @property
    def k(self) -> int:
        return len(self.free)

    def encode(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64)
        if msg.shape[-1] != self.k:
            raise ValueError(f"message length {msg.shape[-1]} != k={self.k}")
        word = np.zeros(msg.shape[:-1] + (self.n,), dtype=np.int64)
        word[..., self.free] = msg
        prods = self.ctx.mul_table[self.parity_map, msg[..., None, :]]
        word[..., self.pivots] = np.bitwise_xor.reduce(prods, axis=-1)
        return word


def row_reduce(H: np.ndarray, ctx: FieldContext):
    """Reduced row-echelon form over GF(2^q); returns (R, pivot_cols)."""
    R = np.array(H, dtype=np.int64)
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        R[[r, p]] = R[[p, r]]
        R[r] = ctx.mul_table[ctx.inv(int(R[r, c])), R[r]]
        for i in range(m):
            if i != r and R[i, c]:
                R[i] ^= ctx.mul_table[R[i, c], R[r]]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def derive_encoder(code: ParityCheckCode) -> SystematicEncoder:
    ctx = code.ctx
    R, pivots = row_reduce(code.H, ctx)
    rank = len(pivots)
    if rank < code.m:
        warnings.warn(f"parity-check matrix has rank {rank} < m={code.m}; "
                      f"dropping {code.m - rank} dependent rows", stacklevel=2)
    if rank == code.n:
        raise ValueError("code contains only the zero codeword; nothing to encode")
    free = np.array([c for c in range(code.n) if c not in set(pivots)], dtype=np.int64)
    # pivot + sum R[r,f] u_f = 0  =>  pivot = sum R[r,f] u_f
    parity_map = R[:, free]
    return SystematicEncoder(ctx, code.n, np.array(pivots, dtype=np.int64), free, parity_map)
