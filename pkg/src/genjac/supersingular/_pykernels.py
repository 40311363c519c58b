"""Numpy versions of the F_{p^2} scans, used when the extension is absent."""

from __future__ import annotations

import numpy as np


def _grid(p: int) -> tuple[np.ndarray, np.ndarray]:
    u, v = np.divmod(np.arange(p * p, dtype=np.int64), p)
    return u, v


def poly_roots(p: int, s: int, cu: list[int], cv: list[int]) -> list[tuple[int, int]]:
    u, v = _grid(p)
    ru = np.zeros_like(u)
    rv = np.zeros_like(u)
    for a, b in zip(reversed(cu), reversed(cv)):
        tu = (ru * u + s * (rv * v % p)) % p
        tv = (ru * v + rv * u) % p
        ru = (tu + int(a) % p) % p
        rv = (tv + int(b) % p) % p
    hit = np.nonzero((ru == 0) & (rv == 0))[0]
    return [(int(u[k]), int(v[k])) for k in hit]


def char_sum(p: int, s: int, a_u: int, a_v: int, b_u: int, b_v: int) -> int:
    u, v = _grid(p)
    a_u, a_v, b_u, b_v = a_u % p, a_v % p, b_u % p, b_v % p
    x2u = (u * u + s * (v * v % p)) % p
    x2v = 2 * u * v % p
    x3u = (x2u * u + s * (x2v * v % p)) % p
    x3v = (x2u * v + x2v * u) % p
    fu = (x3u + (a_u * u + s * (a_v * v % p)) + b_u) % p
    fv = (x3v + (a_u * v + a_v * u) + b_v) % p
    nrm = (fu * fu - s * (fv * fv % p)) % p
    chi = np.full(p, -1, dtype=np.int64)
    chi[0] = 0
    chi[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    return int(chi[nrm].sum())
