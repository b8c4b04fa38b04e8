# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for kNN scoring and Modified Adsorption sweeps.

Signatures mirror ``langprop._kernels_py``; see that module for semantics.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline bint _worse(double s1, long r1, double s2, long r2) noexcept nogil:
    # lower similarity is worse; on ties the larger id rank is worse
    return s1 < s2 or (s1 == s2 and r1 > r2)


cdef void _sift_down(double[::1] hs, long[::1] hr, long[::1] hi, Py_ssize_t size, Py_ssize_t pos) noexcept nogil:
    cdef Py_ssize_t child, right
    cdef double ts
    cdef long tr, ti
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        right = child + 1
        if right < size and _worse(hs[right], hr[right], hs[child], hr[child]):
            child = right
        if _worse(hs[child], hr[child], hs[pos], hr[pos]):
            ts = hs[pos]; hs[pos] = hs[child]; hs[child] = ts
            tr = hr[pos]; hr[pos] = hr[child]; hr[child] = tr
            ti = hi[pos]; hi[pos] = hi[child]; hi[child] = ti
            pos = child
        else:
            break


cdef void _sift_up(double[::1] hs, long[::1] hr, long[::1] hi, Py_ssize_t pos) noexcept nogil:
    cdef Py_ssize_t parent
    cdef double ts
    cdef long tr, ti
    while pos > 0:
        parent = (pos - 1) // 2
        if _worse(hs[pos], hr[pos], hs[parent], hr[parent]):
            ts = hs[pos]; hs[pos] = hs[parent]; hs[parent] = ts
            tr = hr[pos]; hr[pos] = hr[parent]; hr[parent] = tr
            ti = hi[pos]; hi[pos] = hi[parent]; hi[parent] = ti
            pos = parent
        else:
            break


def topk_cosine(
    const long[::1] indptr,
    const int[::1] indices,
    const double[::1] data,
    const long[::1] t_indptr,
    const int[::1] t_indices,
    const double[::1] t_data,
    const double[::1] norms,
    const long[::1] rank,
    Py_ssize_t k,
    Py_ssize_t start,
    Py_ssize_t stop,
):
    cdef Py_ssize_t n = norms.shape[0]
    cdef Py_ssize_t m = stop - start
    counts_arr = np.zeros(m, dtype=np.int64)
    nbr_arr = np.full(m * k, -1, dtype=np.int64)
    sim_arr = np.zeros(m * k, dtype=np.float64)
    cdef long[::1] counts = counts_arr
    cdef long[::1] nbr = nbr_arr
    cdef double[::1] sim = sim_arr

    cdef double[::1] acc = np.zeros(n, dtype=np.float64)
    cdef long[::1] mark = np.full(n, -1, dtype=np.int64)
    cdef long[::1] touched = np.empty(n, dtype=np.int64)
    cdef double[::1] hs = np.empty(max(k, 1), dtype=np.float64)
    cdef long[::1] hr = np.empty(max(k, 1), dtype=np.int64)
    cdef long[::1] hi = np.empty(max(k, 1), dtype=np.int64)

    cdef Py_ssize_t i, p, q, j, t, a, ntouched, size, base
    cdef double c, dot, s
    with nogil:
        for i in range(start, stop):
            ntouched = 0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                c = data[p]
                for q in range(t_indptr[j], t_indptr[j + 1]):
                    t = t_indices[q]
                    if mark[t] != i:
                        mark[t] = i
                        acc[t] = 0.0
                        touched[ntouched] = t
                        ntouched += 1
                    acc[t] += c * t_data[q]
            size = 0
            for a in range(ntouched):
                t = touched[a]
                if t == i:
                    continue
                dot = acc[t]
                if dot <= 0.0:
                    continue
                s = dot / (norms[i] * norms[t])
                if size < k:
                    hs[size] = s; hr[size] = rank[t]; hi[size] = t
                    size += 1
                    _sift_up(hs, hr, hi, size - 1)
                elif k > 0 and _worse(hs[0], hr[0], s, rank[t]):
                    hs[0] = s; hr[0] = rank[t]; hi[0] = t
                    _sift_down(hs, hr, hi, size, 0)
            base = (i - start) * k
            counts[i - start] = size
            # pop the worst entry into the last free slot until empty
            while size > 0:
                sim[base + size - 1] = hs[0]
                nbr[base + size - 1] = hi[0]
                size -= 1
                hs[0] = hs[size]; hr[0] = hr[size]; hi[0] = hi[size]
                _sift_down(hs, hr, hi, size, 0)
    return counts_arr, nbr_arr, sim_arr


def mad_sweep(
    const long[::1] indptr,
    const int[::1] indices,
    const double[::1] wdata,
    const double[:, ::1] Y,
    const double[:, ::1] base,
    const double[::1] inv_m,
    double mu2,
    double[:, ::1] out,
):
    cdef Py_ssize_t n = Y.shape[0]
    cdef Py_ssize_t L = Y.shape[1]
    cdef Py_ssize_t v, p, u, l
    cdef double w, delta = 0.0, d
    cdef double[::1] acc = np.zeros(L, dtype=np.float64)
    with nogil:
        for v in range(n):
            for l in range(L):
                acc[l] = 0.0
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                w = wdata[p]
                for l in range(L):
                    acc[l] += w * Y[u, l]
            for l in range(L):
                out[v, l] = inv_m[v] * (base[v, l] + mu2 * acc[l])
                d = fabs(out[v, l] - Y[v, l])
                if d > delta:
                    delta = d
    return delta
