"""Floating-point entropies of explicit finite joint distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import EntropyVector


@dataclass(frozen=True)
class Distribution:
    """Outcome ``k`` has probability ``p[k]`` and variable values ``values[k, :]``."""

    p: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != self.p.shape[0]:
            raise ValueError("values must be (outcomes, variables)")
        if np.any(self.p < 0) or not np.isclose(self.p.sum(), 1.0):
            raise ValueError("p is not a probability vector")

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def entropy(self, mask: int) -> float:
        cols = [i for i in range(self.n) if mask >> i & 1]
        if not cols:
            return 0.0
        _, inverse = np.unique(self.values[:, cols], axis=0, return_inverse=True)
        q = np.bincount(inverse.ravel(), weights=self.p)
        q = q[q > 0]
        return float(-(q * np.log2(q)).sum())

    def evaluate(self, v: EntropyVector) -> float:
        if v.n != self.n:
            raise ValueError("variable count mismatch")
        return float(sum(float(c) * self.entropy(s) for s, c in v.coeffs.items()))


def grid(bits: int) -> np.ndarray:
    """All binary tuples of length ``bits``, one per row."""
    return (np.arange(1 << bits)[:, None] >> np.arange(bits)[None, :]) & 1


def random_joint(rng: np.random.Generator, bits: int) -> Distribution:
    """Arbitrary joint law over ``bits`` binary variables; some draws are sparse."""
    p = rng.dirichlet(np.full(1 << bits, rng.choice([0.2, 1.0])))
    return Distribution(p, grid(bits))


def random_product(rng: np.random.Generator, bits: int) -> Distribution:
    """Independent binary variables with random biases."""
    g = grid(bits)
    bias = rng.uniform(0.05, 0.95, size=bits)
    p = np.prod(np.where(g == 1, bias, 1 - bias), axis=1)
    return Distribution(p / p.sum(), g)


def add_function(d: Distribution, rng: np.random.Generator, of: list[int], arity: int = 2) -> Distribution:
    """Append a variable that is a random function of columns ``of``."""
    if of:
        _, key = np.unique(d.values[:, of], axis=0, return_inverse=True)
        table = rng.integers(0, arity, size=key.max() + 1)
        col = table[key.ravel()]
    else:
        col = np.full(d.p.shape[0], rng.integers(0, arity))
    return Distribution(d.p, np.column_stack([d.values, col]))


def add_channel(d: Distribution, rng: np.random.Generator, arity: int = 3) -> Distribution:
    """Append a variable drawn from a random conditional law given every existing column."""
    _, key = np.unique(d.values, axis=0, return_inverse=True)
    key = key.ravel()
    law = rng.dirichlet(np.ones(arity), size=key.max() + 1)
    p = (d.p[:, None] * law[key]).ravel()
    values = np.repeat(d.values, arity, axis=0)
    y = np.tile(np.arange(arity), d.p.shape[0])
    return Distribution(p, np.column_stack([values, y]))


def pair(d: Distribution, a: int, b: int) -> np.ndarray:
    """A single column encoding the pair of columns ``a`` and ``b``."""
    return d.values[:, a] * (int(d.values[:, b].max()) + 1) + d.values[:, b]
