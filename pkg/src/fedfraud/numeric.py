"""Dense array primitives and a splittable deterministic RNG.

Matrices are 2-D float64 numpy arrays, row-major; operations are pure and
check shapes explicitly so callers get precise errors instead of silent
broadcasting.
"""

from __future__ import annotations

import zlib

import numpy as np

from . import kernels
from .errors import DomainError, ShapeError


def as_matrix(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return a @ b


def _check_same_shape(a: np.ndarray, b: np.ndarray, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op} shape mismatch: {a.shape} vs {b.shape}")


def add(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _check_same_shape(a, b, "add")
    return a + b


def sub(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _check_same_shape(a, b, "sub")
    return a - b


def mul(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _check_same_shape(a, b, "mul")
    return a * b


def scale(a, c: float):
    return as_matrix(a) * float(c)


def elementwise_map(a, fn):
    a = as_matrix(a)
    return np.vectorize(fn, otypes=[np.float64])(a)


def relu(x):
    return np.maximum(as_matrix(x), 0.0)


def relu_deriv(x):
    return (as_matrix(x) > 0.0).astype(np.float64)


def sigmoid(x):
    return kernels.sigmoid(as_matrix(x))


def sigmoid_deriv(x):
    s = sigmoid(x)
    return s * (1.0 - s)


class Rng:
    """Seedable generator with deterministic child-stream splitting.

    Children are derived from the master seed plus a label path, so the
    stream a worker sees depends only on its label, never on scheduling
    order.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._path = tuple(_path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self._path)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def split(self, *labels) -> "Rng":
        path = self._path
        for label in labels:
            if isinstance(label, (int, np.integer)):
                h = int(label) & 0xFFFFFFFF
            else:
                h = zlib.crc32(str(label).encode())
            path = path + (h,)
        return Rng(self.seed, path)

    def uniform(self, lo: float, hi: float, shape) -> np.ndarray:
        if lo >= hi:
            raise DomainError(f"uniform bounds require lo < hi, got [{lo}, {hi})")
        return self._gen.uniform(lo, hi, size=shape)

    def normal(self, mean: float, std: float, shape) -> np.ndarray:
        return self._gen.normal(mean, std, size=shape)

    def permutation(self, n: int) -> np.ndarray:
        if n < 0:
            raise DomainError(f"permutation length must be >= 0, got {n}")
        return self._gen.permutation(n)

    def choice(self, n: int, size: int) -> np.ndarray:
        """`size` indices sampled from range(n) without replacement."""
        return self._gen.choice(n, size=size, replace=False)

    def integers(self, lo: int, hi: int) -> int:
        return int(self._gen.integers(lo, hi))

    def dirichlet(self, alpha) -> np.ndarray:
        return self._gen.dirichlet(np.asarray(alpha, dtype=np.float64))
