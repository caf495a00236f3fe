"""Seedable, splittable random sampling primitives.

Every draw in the package comes from a Philox counter-based bit generator
keyed by ``(seed, stream)``.  Sub-streams are derived by hashing labels into
a new 64-bit stream id, so any (experiment, sweep point, run, document)
addresses its own independent sequence without shared mutable state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ParameterError

__all__ = [
    "RngState",
    "stream_id",
    "as_generator",
    "gamma_sample",
    "log_gamma_sample",
    "dirichlet_sample",
    "categorical_sample",
    "gaussian_vector_sample",
]

_U64 = (1 << 64) - 1


def stream_id(*labels) -> int:
    """Stable 64-bit hash of a tuple of labels (str, int or float)."""
    h = hashlib.blake2b(digest_size=8)
    for label in labels:
        if isinstance(label, float):
            token = repr(float(label))
        else:
            token = str(label)
        h.update(type(label).__name__.encode())
        h.update(b"\x1f")
        h.update(token.encode())
        h.update(b"\x1e")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class RngState:
    """Address of one random stream: a user seed plus a derived stream id."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _U64:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    def child(self, *labels) -> "RngState":
        """Derive an independent sub-stream named by ``labels``."""
        return RngState(self.seed, stream_id(self.stream, *labels))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = (self.stream << 64) | self.seed
        return np.random.Generator(np.random.Philox(key=key))


RngLike = Union[RngState, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    # An RngState always restarts its stream, which makes calls pure; a
    # Generator is advanced in place.
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ParameterError(f"expected RngState or numpy Generator, got {type(rng).__name__}")


def _check_shape(shape):
    shape = np.asarray(shape, dtype=np.float64)
    if shape.size == 0:
        raise ParameterError("shape parameters must be non-empty")
    if not np.all(np.isfinite(shape)) or np.any(shape <= 0):
        raise ParameterError("gamma shape parameters must be finite and > 0")
    return shape


def log_gamma_sample(shape, rng: RngLike, size=None) -> np.ndarray:
    """Logarithm of Gamma(shape, 1) draws.

    For shape >= 1 this is the Marsaglia-Tsang squeeze/rejection sampler.
    For shape < 1 the draw is boosted: ``G(shape + 1) * U**(1/shape)``,
    evaluated in log space so tiny shapes never underflow to zero.
    """
    shape = _check_shape(shape)
    gen = as_generator(rng)
    if size is None:
        size = shape.shape
    shape = np.broadcast_to(shape, size)
    small = shape < 1.0
    return _log_gamma_unchecked(shape, small, bool(small.any()), gen, size)


def _log_gamma_unchecked(shape, small, any_small, gen, size):
    # hot path shared with the corpus sampler; inputs already validated
    base = gen.standard_gamma(np.where(small, shape + 1.0, shape) if any_small else shape, size=size)
    out = np.log(base)
    if any_small:
        u = gen.random(size=size)
        # 1 - u lies in (0, 1], so the log is finite
        boost = np.log1p(-u) / shape
        out = np.where(small, out + boost, out)
    return out


def _normalize_logs(logs):
    logs -= logs.max(axis=-1, keepdims=True)
    x = np.exp(logs)
    x /= x.sum(axis=-1, keepdims=True)
    return x


def gamma_sample(shape, rng: RngLike, size=None):
    """Draw from Gamma(shape, 1).

    Returns a float when ``shape`` is scalar and ``size`` is None, otherwise
    an array.
    """
    scalar = np.ndim(shape) == 0 and size is None
    draws = np.exp(log_gamma_sample(shape, rng, size=size))
    return float(draws) if scalar else draws


def dirichlet_sample(alphas: Sequence[float], rng: RngLike, size=None) -> np.ndarray:
    """Draw from Dir(alphas) by normalising independent Gamma draws.

    With ``size=n`` an ``(n, len(alphas))`` array of independent draws is
    returned.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=np.float64))
    if alphas.ndim != 1 or alphas.size < 1:
        raise ParameterError("alphas must be a non-empty 1-d sequence")
    _check_shape(alphas)
    out_shape = alphas.shape if size is None else (int(size), alphas.size)
    return _normalize_logs(log_gamma_sample(alphas, rng, size=out_shape))


def _cdf(probs) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise ParameterError("probability vector must be non-empty and 1-d")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise ParameterError("probabilities must be finite and non-negative")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ParameterError(f"probabilities sum to {total!r}, not 1")
    cdf = np.cumsum(probs)
    return cdf / cdf[-1]


def categorical_sample(probs, rng: RngLike, size=None):
    """Inverse-CDF draw of an index from a probability vector.

    Zero-probability entries are never returned: the index is the number of
    CDF entries at or below a uniform in [0, 1).
    """
    cdf = _cdf(probs)
    gen = as_generator(rng)
    u = gen.random(size=size)
    idx = np.searchsorted(cdf, u, side="right")
    return int(idx) if size is None else idx.astype(np.int64)


def gaussian_vector_sample(mean, variance: float, rng: RngLike, size=None) -> np.ndarray:
    """Draw ``x ~ N(mean, variance * I)``; ``size=n`` stacks n draws."""
    if not np.isfinite(variance) or variance <= 0:
        raise ParameterError("variance must be finite and > 0")
    mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
    gen = as_generator(rng)
    shape = mean.shape if size is None else (int(size),) + mean.shape
    return mean + np.sqrt(variance) * gen.standard_normal(shape)
