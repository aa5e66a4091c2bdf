"""Modulation, AWGN and the per-symbol cost vector.

Noise convention: Es = 1, N0 = 10^(-EsN0/10), complex noise with variance
N0/2 per real dimension. Cost entry (i, sigma) is the log-likelihood ratio
log p(r_i | u_i = 0) - log p(r_i | u_i = sigma) = (|r - s_sigma|^2 - |r - s_0|^2) / N0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

COST_MAGIC = b"NBGAMMA1"
_HEADER = struct.Struct("<8sII")

# Gray-coded 4-PAM levels indexed by the 2-bit label.
_GRAY_PAM4 = np.array([-3.0, -1.0, 3.0, 1.0])


@dataclass(frozen=True, eq=False)
class ModulationScheme:
    name: str
    q: int
    constellation: np.ndarray = field(repr=False)  # indexed by field symbol

    @property
    def size(self) -> int:
        return len(self.constellation)


def _bpsk():
    return np.array([1.0 + 0j, -1.0 + 0j])


def _qpsk():
    s = np.arange(4)
    return ((1 - 2 * (s & 1)) + 1j * (1 - 2 * ((s >> 1) & 1))) / np.sqrt(2)


def _qam16():
    s = np.arange(16)
    return (_GRAY_PAM4[s & 3] + 1j * _GRAY_PAM4[(s >> 2) & 3]) / np.sqrt(10)


_SCHEMES = {"bpsk": (1, _bpsk), "qpsk": (2, _qpsk), "qam16": (4, _qam16)}


def get_scheme(name: str) -> ModulationScheme:
    key = name.lower()
    if key not in _SCHEMES:
        raise ValueError(f"unknown modulation {name!r}; choose from {sorted(_SCHEMES)}")
    q, make = _SCHEMES[key]
    pts = make()
    pts.setflags(write=False)
    return ModulationScheme(key, q, pts)


def scheme_for_field(q: int) -> ModulationScheme:
    for name, (sq, _) in _SCHEMES.items():
        if sq == q:
            return get_scheme(name)
    raise ValueError(f"no built-in modulation with 2^{q} points")


def noise_variance(esn0_db: float) -> float:
    """N0 for unit symbol energy (total complex variance)."""
    return 10.0 ** (-esn0_db / 10.0)


def modulate(word, scheme: ModulationScheme, q: int | None = None) -> np.ndarray:
    if q is not None and scheme.q != q:
        raise ValueError(f"{scheme.name} carries 2^{scheme.q} symbols, field has 2^{q}")
    word = np.asarray(word, dtype=np.int64)
    if word.size and (word.min() < 0 or word.max() >= scheme.size):
        raise ValueError("symbol outside constellation")
    return scheme.constellation[word]


def awgn(samples, esn0_db: float, rng) -> np.ndarray:
    """Add circular complex Gaussian noise; ``rng`` is a Generator or a seed."""
    rng = np.random.default_rng(rng)
    samples = np.asarray(samples, dtype=np.complex128)
    sd = np.sqrt(noise_variance(esn0_db) / 2)
    noise = rng.standard_normal(samples.shape) + 1j * rng.standard_normal(samples.shape)
    return samples + sd * noise


def cost_vector(received, scheme: ModulationScheme, esn0_db: float,
                clip: float | None = None) -> np.ndarray:
    """Flattened cost vector, blocks of 2^q - 1 per received sample."""
    r = np.asarray(received, dtype=np.complex128)
    pts = scheme.constellation
    dist = np.abs(r[..., None] - pts) ** 2
    gamma = (dist[..., 1:] - dist[..., :1]) / noise_variance(esn0_db)
    if clip is not None:
        gamma = np.clip(gamma, -clip, clip)
    return gamma.reshape(r.shape[:-1] + (-1,))


def hard_demap(received, scheme: ModulationScheme) -> np.ndarray:
    r = np.asarray(received, dtype=np.complex128)
    return np.argmin(np.abs(r[..., None] - scheme.constellation) ** 2, axis=-1)


def save_cost_vector(path, gamma, n: int, q: int) -> None:
    gamma = np.asarray(gamma, dtype="<f8").ravel()
    if gamma.size != n * ((1 << q) - 1):
        raise ValueError("cost vector length does not match n and q")
    Path(path).write_bytes(_HEADER.pack(COST_MAGIC, n, q) + gamma.tobytes())


def load_cost_vector(path) -> tuple[np.ndarray, int, int]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("cost file too short")
    magic, n, q = _HEADER.unpack_from(raw)
    if magic != COST_MAGIC:
        raise ValueError("bad cost file magic")
    gamma = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if gamma.size != n * ((1 << q) - 1):
        raise ValueError("cost file payload length does not match header")
    return gamma.astype(np.float64), n, q
