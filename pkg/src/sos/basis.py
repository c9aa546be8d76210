"""
Homogeneous monomial bases.

[x]_kappa lists every monomial of total degree exactly kappa in x = (x1, ..., xn),
ordered lexicographically by variable index: x1^k, x1^(k-1) x2, ..., xn^k. With the
homogenizing coordinate x1 = 1 this is the usual basis of all monomials up to degree kappa.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from src.utils.errors import InputError


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    kappa: int
    exponents: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.exponents.shape[0])

    def codes(self, base: int) -> np.ndarray:
        """Integer key of each exponent row in the given base (base > max total degree)"""
        return self.exponents @ _powers(self.n, base)

    def index_of(self, exponents: np.ndarray) -> np.ndarray:
        """Positions of exponent rows (all of degree kappa) in this basis"""
        exponents = np.atleast_2d(np.asarray(exponents, dtype=np.int64))
        base = self.kappa + 1
        keys = exponents @ _powers(self.n, base)
        return self._lookup(keys, base)

    def _lookup(self, keys: np.ndarray, base: int) -> np.ndarray:
        own = self.codes(base)
        order = np.argsort(own)
        pos = np.searchsorted(own, keys, sorter=order)
        pos = np.clip(pos, 0, own.size - 1)
        found = order[pos]
        if np.any(own[found] != keys):
            raise InputError("exponent not present in monomial basis")
        return found

    def lookup_codes(self, keys: np.ndarray, base: int) -> np.ndarray:
        """Positions of monomials given by their keys in the given base"""
        return self._lookup(np.asarray(keys, dtype=np.int64), base)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Vector of monomial values at a point (or rows for a batch of points)"""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return np.prod(x[None, :] ** self.exponents, axis=1)
        return np.prod(x[:, None, :] ** self.exponents[None, :, :], axis=2)


def _powers(n: int, base: int) -> np.ndarray:
    return np.power(np.int64(base), np.arange(n, dtype=np.int64))


@lru_cache(maxsize=64)
def _exponents(n: int, kappa: int) -> np.ndarray:
    rows = []
    for combo in combinations_with_replacement(range(n), kappa):
        e = np.zeros(n, dtype=np.int64)
        for i in combo:
            e[i] += 1
        rows.append(e)
    out = np.array(rows, dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


def monomial_basis(n: int, kappa: int) -> MonomialBasis:
    """
    Basis [x]_kappa over n variables

    Args:
        n: number of variables including the homogenizing coordinate
        kappa: degree

    Returns:
        MonomialBasis with dim C(n + kappa - 1, kappa)
    """
    if n < 1:
        raise InputError(f"need at least one variable, got n={n}")
    if kappa < 0:
        raise InputError(f"degree must be nonnegative, got kappa={kappa}")
    basis = MonomialBasis(n=n, kappa=kappa, exponents=_exponents(n, kappa))
    assert basis.dim == comb(n + kappa - 1, kappa)
    return basis
