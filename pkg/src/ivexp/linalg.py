"""Dense real vectors and matrices, the induced infinity norm and the matrix exponential.

Vectors and matrices are plain float64 numpy arrays; ``as_vector`` and
``as_matrix`` are the validating constructors used at every API boundary.
"""

import numpy as np

from .errors import DimensionError, MatrixExpError

NORM_NAME = "inf"

# Taylor degree after scaling to norm <= 1/2: remainder < 0.5**19 / 19! ~ 2e-23.
_TAYLOR_DEGREE = 18
_MAX_SQUARINGS = 64


def as_vector(x, n=None):
    """Return ``x`` as a finite 1-D float64 array, optionally checking its length."""
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty vector, got shape {v.shape}")
    if n is not None and v.size != n:
        raise DimensionError(f"expected vector of length {n}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(a, n=None):
    """Return ``a`` as a finite square 2-D float64 array."""
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionError(f"expected {n}x{n} matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def inf_norm(a):
    """Operator norm induced by the max-norm: the largest absolute row sum."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=1)))


def vec_norm(x):
    return float(np.max(np.abs(np.asarray(x, dtype=float))))


def mat_vec(a, x):
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {x.shape}")
    return a @ x


def mat_mul(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def matrix_exp(a):
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The argument is halved until its norm is at most 1/2, the series is
    summed by Horner's rule and the result squared back up.

    Raises:
        MatrixExpError: if more than 64 halvings would be needed.
    """
    a = as_matrix(a)
    n = a.shape[0]
    norm = inf_norm(a)
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
    if squarings > _MAX_SQUARINGS:
        raise MatrixExpError(f"norm {norm:g} needs {squarings} squarings (cap {_MAX_SQUARINGS})")
    b = a / (2.0 ** squarings)
    eye = np.eye(n)
    result = eye.copy()
    for k in range(_TAYLOR_DEGREE, 0, -1):
        result = eye + (b @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result
