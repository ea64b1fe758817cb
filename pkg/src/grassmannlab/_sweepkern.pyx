# cython: boundscheck=False, wraparound=False, initializedcheck=False
# cython: cdivision=True, language_level=3
"""Compiled inner loop for the diametric-sweep transform.

One sweep of a radial profile is a windowed max-times circular correlation
with a cosine kernel; only offsets within a quarter turn contribute (the
kernel is negative beyond them and the profile is nonnegative).  The caller
supplies the profile extended by ``half`` wrapped samples on both sides, the
cosine table for offsets 0..half, and the same table reversed for the
backward scan, so both inner loops walk memory forward.
"""


def max_correlate(const double[::1] ext, const double[::1] ct,
                  const double[::1] ct_rev, double[::1] out):
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t half = ct.shape[0] - 1
    cdef Py_ssize_t j, m, base
    cdef double best, v
    for j in range(n):
        base = j + half
        best = ext[base]
        for m in range(1, half + 1):
            v = ext[base + m] * ct[m]
            if v > best:
                best = v
        for m in range(half):
            v = ext[base - half + m] * ct_rev[m]
            if v > best:
                best = v
        out[j] = best
