# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled F_{p^2} scans.  Elements are u + v*w with w^2 = s; p < 2^20."""

from libc.stdint cimport int64_t


def poly_roots(int64_t p, int64_t s, list cu, list cv):
    """All roots in F_{p^2} of sum (cu[i] + cv[i] w) X^i, sorted by (u, v)."""
    cdef Py_ssize_t n = len(cu), i
    cdef int64_t u, v, ru, rv, tu
    cdef int64_t[::1] au = _vec(cu, p), av = _vec(cv, p)
    out = []
    for u in range(p):
        for v in range(p):
            ru = 0
            rv = 0
            # every product is below 2^40, so one reduction per step suffices
            for i in range(n - 1, -1, -1):
                tu = (ru * u + s * ((rv * v) % p) + au[i]) % p
                rv = (ru * v + rv * u + av[i]) % p
                ru = tu
            if ru == 0 and rv == 0:
                out.append((u, v))
    return out


def char_sum(int64_t p, int64_t s, int64_t a_u, int64_t a_v, int64_t b_u, int64_t b_v):
    """Sum over x in F_{p^2} of the quadratic character of x^3 + a x + b."""
    cdef int64_t u, v, x2u, x2v, fu, fv, nrm, total = 0
    cdef Py_ssize_t k
    cdef signed char[::1] chi = _chi_table(p)
    a_u %= p
    a_v %= p
    b_u %= p
    b_v %= p
    for u in range(p):
        for v in range(p):
            x2u = (u * u + s * ((v * v) % p)) % p
            x2v = (2 * u * v) % p
            fu = (x2u * u + s * ((x2v * v) % p) + a_u * u + s * ((a_v * v) % p) + b_u) % p
            fv = (x2u * v + x2v * u + a_u * v + a_v * u + b_v) % p
            nrm = (fu * fu + (p - s) * ((fv * fv) % p)) % p
            total += chi[nrm]
    return total


cdef int64_t[::1] _vec(list c, int64_t p):
    import array
    return array.array("q", [int(x) % p for x in c])


cdef signed char[::1] _chi_table(int64_t p):
    import array
    t = array.array("b", [-1] * p)
    t[0] = 0
    cdef int64_t x
    for x in range(1, p):
        t[(x * x) % p] = 1
    return t
