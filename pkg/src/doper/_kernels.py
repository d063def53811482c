"""Batch kernels for the finite-field enumeration.

Each kernel has a numba version and a pure-numpy version with identical
outputs.  Set ``DOPER_DISABLE_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("DOPER_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")

# status codes for series_coefficients
DEFINED = 0
UNDEFINED = 1


def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    return inv


def all_triples(p: int) -> np.ndarray:
    """Every ``(a, b, c)`` in ``F_p^3`` in lexicographic order, shape ``(p^3, 3)``."""
    g = np.indices((p, p, p), dtype=np.int64).reshape(3, -1).T
    return np.ascontiguousarray(g)


# ---------------------------------------------------------------- numpy

def admissible_mask_numpy(triples: np.ndarray, p: int) -> np.ndarray:
    t = np.where(triples == 0, p, triples)
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    return ((b >= c) & (c > a)) | ((a >= c) & (c > b))


def series_coefficients_numpy(triples: np.ndarray, p: int):
    """Truncated hypergeometric series for each row.

    Returns ``(coeffs, lengths, status)``: ``coeffs[i, :lengths[i]]`` are the
    coefficients of ``x^0, x^1, ...``.
    """
    n = len(triples)
    inv = inverse_table(p)
    a, b, c = triples[:, 0] % p, triples[:, 1] % p, triples[:, 2] % p
    coeffs = np.zeros((n, p), dtype=np.int64)
    lengths = np.zeros(n, dtype=np.int64)
    status = np.full(n, DEFINED, dtype=np.int64)
    cur = np.ones(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    for k in range(p):
        coeffs[alive, k] = cur[alive]
        lengths[alive] = k + 1
        num = ((a + k) % p) * ((b + k) % p) % p
        den = ((k + 1) % p) * ((c + k) % p) % p
        stop = alive & (num == 0)
        bad = alive & (num != 0) & (den == 0)
        status[bad] = UNDEFINED
        alive = alive & ~stop & ~bad
        cur = cur * num % p * inv[den] % p
    return coeffs, lengths, status


def operator_residual_numpy(triples: np.ndarray, coeffs: np.ndarray, lengths: np.ndarray,
                            shifts: np.ndarray, p: int) -> np.ndarray:
    """True where ``x^shift * sum coeffs x^k`` is killed by the cleared operator of the row."""
    n, width = coeffs.shape
    a, b, c = triples[:, 0:1], triples[:, 1:2], triples[:, 2:3]
    padded = np.zeros((n, width + 2), dtype=np.int64)
    padded[:, 1:width + 1] = coeffs
    k = np.arange(width + 2)[None, :] - 1
    mask = k < lengths[:, None]
    padded = np.where(mask, padded, 0)
    m = (shifts[:, None] + k) % p
    f_m = padded
    f_next = np.zeros_like(padded)
    f_next[:, :-1] = padded[:, 1:]
    res = ((m + a) * (m + b) % p * f_m - (m + 1) * (m + c) % p * f_next) % p
    return ~np.any(res != 0, axis=1)


# ---------------------------------------------------------------- numba

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def admissible_mask_numba(triples, p):
        n = triples.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            a = triples[i, 0] if triples[i, 0] != 0 else p
            b = triples[i, 1] if triples[i, 1] != 0 else p
            c = triples[i, 2] if triples[i, 2] != 0 else p
            out[i] = (b >= c and c > a) or (a >= c and c > b)
        return out

    @numba.njit(cache=True)
    def _series_numba(triples, p, inv):
        n = triples.shape[0]
        coeffs = np.zeros((n, p), dtype=np.int64)
        lengths = np.zeros(n, dtype=np.int64)
        status = np.zeros(n, dtype=np.int64)
        for i in range(n):
            a = triples[i, 0] % p
            b = triples[i, 1] % p
            c = triples[i, 2] % p
            cur = 1
            for k in range(p):
                coeffs[i, k] = cur
                lengths[i] = k + 1
                num = ((a + k) % p) * ((b + k) % p) % p
                den = ((k + 1) % p) * ((c + k) % p) % p
                if num == 0:
                    break
                if den == 0:
                    status[i] = 1
                    break
                cur = cur * num % p * inv[den] % p
        return coeffs, lengths, status

    @numba.njit(cache=True)
    def operator_residual_numba(triples, coeffs, lengths, shifts, p):
        n = coeffs.shape[0]
        out = np.ones(n, dtype=np.bool_)
        for i in range(n):
            a = triples[i, 0]
            b = triples[i, 1]
            c = triples[i, 2]
            L = lengths[i]
            for k in range(-1, L):
                m = (shifts[i] + k) % p
                fm = coeffs[i, k] if 0 <= k < L else 0
                fn = coeffs[i, k + 1] if k + 1 < L else 0
                r = ((m + a) * (m + b) % p * fm - (m + 1) * (m + c) % p * fn) % p
                if r != 0:
                    out[i] = False
                    break
        return out

    def series_coefficients_numba(triples, p):
        return _series_numba(triples, p, inverse_table(p))


def admissible_mask(triples: np.ndarray, p: int, use_numba: bool | None = None) -> np.ndarray:
    if USE_NUMBA if use_numba is None else use_numba:
        return admissible_mask_numba(triples, p)
    return admissible_mask_numpy(triples, p)


def series_coefficients(triples: np.ndarray, p: int, use_numba: bool | None = None):
    if USE_NUMBA if use_numba is None else use_numba:
        return series_coefficients_numba(triples, p)
    return series_coefficients_numpy(triples, p)


def operator_residual(triples, coeffs, lengths, shifts, p: int, use_numba: bool | None = None) -> np.ndarray:
    if USE_NUMBA if use_numba is None else use_numba:
        return operator_residual_numba(triples, coeffs, lengths, shifts, p)
    return operator_residual_numpy(triples, coeffs, lengths, shifts, p)
