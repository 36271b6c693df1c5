"""Truncated power series in one variable (numpy complex arrays)."""

from __future__ import annotations

import numpy as np


def trunc(a, L):
    a = np.asarray(a, dtype=complex)
    if len(a) >= L + 1:
        return a[: L + 1].copy()
    out = np.zeros(L + 1, dtype=complex)
    out[: len(a)] = a
    return out


def mul(a, b, L):
    return trunc(np.convolve(a[: L + 1], b[: L + 1]), L)


def inv(a, L):
    a = trunc(a, L)
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    out = np.zeros(L + 1, dtype=complex)
    out[0] = 1 / a[0]
    for k in range(1, L + 1):
        out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1][:k]) / a[0]
    return out


def div(a, b, L):
    return mul(a, inv(b, L), L)


def shift(a, k, L):
    """U^k * a (k >= 0)."""
    out = np.zeros(L + 1, dtype=complex)
    if k <= L:
        n = min(len(a), L + 1 - k)
        out[k : k + n] = a[:n]
    return out


def powers(a, n, L):
    out = [trunc([1.0], L)]
    for _ in range(n):
        out.append(mul(out[-1], a, L))
    return out


def deriv(a):
    a = np.asarray(a, dtype=complex)
    if len(a) <= 1:
        return np.zeros(1, dtype=complex)
    return a[1:] * np.arange(1, len(a))


def evaluate(a, x):
    acc = 0j
    for c in a[::-1]:
        acc = acc * x + c
    return acc


def log1p_series(x, L):
    """log(1 + x) for a series with x[0] = 0."""
    x = trunc(x, L)
    dx = trunc(deriv(x), L)
    q = div(dx, trunc(x, L) + trunc([1.0], L), L)
    out = np.zeros(L + 1, dtype=complex)
    out[1:] = q[:L] / np.arange(1, L + 1)
    return out


def exp_series(x, L):
    """exp(x) for a series with x[0] = 0."""
    x = trunc(x, L)
    out = np.zeros(L + 1, dtype=complex)
    out[0] = 1.0
    dx = deriv(x)
    for k in range(1, L + 1):
        # k e_k = sum_{j=1}^k j x_j e_{k-j}
        s = 0j
        for j in range(1, k + 1):
            if j - 1 < len(dx):
                s += dx[j - 1] * out[k - j]
        out[k] = s / k
    return out


def real_power(a, p, L, lead=None):
    """a^p for a[0] != 0; ``lead`` fixes the branch of a[0]^p."""
    a = trunc(a, L)
    a0 = a[0]
    lead = a0**p if lead is None else lead
    return lead * exp_series(p * log1p_series(a / a0 - trunc([1.0], L), L), L)


def compose(a, b, L):
    """a(b(x)) for b[0] = 0."""
    b = trunc(b, L)
    out = np.zeros(L + 1, dtype=complex)
    for c in np.asarray(a, dtype=complex)[::-1]:
        out = mul(out, b, L)
        out[0] += c
    return out


def revert(a, L):
    """Compositional inverse of a series with a[0] = 0, a[1] != 0."""
    a = trunc(a, L)
    if a[0] != 0 or a[1] == 0:
        raise ValueError("series not invertible")
    b = np.zeros(L + 1, dtype=complex)
    b[1] = 1 / a[1]
    # Newton on a(b(x)) = x
    x = trunc([0.0, 1.0], L)
    for _ in range(int(np.ceil(np.log2(L + 1))) + 2):
        ab = compose(a, b, L)
        dab = compose(trunc(deriv(a), L), b, L)
        b = b - div(ab - x, dab, L)
    return b
