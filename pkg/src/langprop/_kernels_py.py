"""Pure numpy/scipy versions of the compiled kernels.

Used when the Cython extension is not built, or when
``LANGPROP_PURE_PYTHON=1`` is set.  Results match the compiled kernels
exactly for ``topk_cosine`` (integer counts make every dot product
exact) and to rounding for ``mad_sweep``.
"""
import numpy as np
import scipy.sparse as sp


def topk_cosine(indptr, indices, data, t_indptr, t_indices, t_data, norms, rank, k, start, stop):
    """Top-``k`` cosine neighbours for rows ``start:stop`` of a count matrix.

    ``(indptr, indices, data)`` is the CSR tweet x word matrix and
    ``(t_indptr, t_indices, t_data)`` its transpose (the inverted index).
    Returns ``(counts, nbr, sim)`` where row ``r`` owns slots
    ``r*k : r*k + counts[r]`` of ``nbr``/``sim``, best first.  Ties in
    similarity go to the smaller ``rank``; self and zero similarities are
    never returned.
    """
    n = norms.shape[0]
    n_words = t_indptr.shape[0] - 1
    m = stop - start
    counts = np.zeros(m, dtype=np.int64)
    nbr = np.full(m * k, -1, dtype=np.int64)
    sim = np.zeros(m * k, dtype=np.float64)
    if m == 0 or k == 0:
        return counts, nbr, sim
    lo, hi = indptr[start], indptr[stop]
    rows = sp.csr_matrix(
        (data[lo:hi], indices[lo:hi], indptr[start:stop + 1] - lo), shape=(m, n_words)
    )
    inverted = sp.csr_matrix((t_data, t_indices, t_indptr), shape=(n_words, n))
    dots = (rows @ inverted).tocsr()
    for r in range(m):
        i = start + r
        cols = dots.indices[dots.indptr[r]:dots.indptr[r + 1]].astype(np.int64)
        vals = dots.data[dots.indptr[r]:dots.indptr[r + 1]]
        keep = (cols != i) & (vals > 0)
        cols, vals = cols[keep], vals[keep]
        sims = vals / (norms[i] * norms[cols])
        order = np.lexsort((rank[cols], -sims))[:k]
        counts[r] = order.size
        nbr[r * k:r * k + order.size] = cols[order]
        sim[r * k:r * k + order.size] = sims[order]
    return counts, nbr, sim


def mad_sweep(indptr, indices, wdata, Y, base, inv_m, mu2, out):
    """One synchronous Modified Adsorption update.

    Writes ``out[v] = inv_m[v] * (base[v] + mu2 * sum_u W'(v,u) Y[u])`` for
    every node and returns the largest absolute change from ``Y``.
    """
    n = Y.shape[0]
    W = sp.csr_matrix((wdata, indices, indptr), shape=(n, n))
    np.multiply(inv_m[:, None], base + mu2 * (W @ Y), out=out)
    return float(np.abs(out - Y).max()) if n else 0.0
