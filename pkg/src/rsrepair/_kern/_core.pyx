# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for F_q elimination and scaled-intersection sums.

Must stay semantically identical to ``_pyref``; the parity test suite
compares the two on random instances.
"""

from libc.stdlib cimport free, malloc


cdef inline int fq_add(int a, int b, int p, int e) noexcept nogil:
    cdef int out = 0
    cdef int shift = 1
    cdef int i
    if p == 2:
        return a ^ b
    for i in range(e):
        out += ((a % p + b % p) % p) * shift
        a //= p
        b //= p
        shift *= p
    return out


cdef int rank_digit_matrix(
    int* mat,
    int nrows,
    int ell,
    int p,
    int e,
    const int[::1] fq_exp,
    const int[::1] fq_log,
    const int[::1] fq_inv,
    const int[::1] fq_neg,
) noexcept nogil:
    cdef int rank = 0
    cdef int col, r, c, pivot, v, f, w, inv_p, tmp
    for col in range(ell):
        pivot = -1
        for r in range(rank, nrows):
            if mat[r * ell + col] != 0:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for c in range(ell):
                tmp = mat[rank * ell + c]
                mat[rank * ell + c] = mat[pivot * ell + c]
                mat[pivot * ell + c] = tmp
        inv_p = fq_inv[mat[rank * ell + col]]
        for r in range(rank + 1, nrows):
            v = mat[r * ell + col]
            if v != 0:
                f = fq_exp[fq_log[v] + fq_log[inv_p]]
                for c in range(col, ell):
                    w = mat[rank * ell + c]
                    if w != 0:
                        mat[r * ell + c] = fq_add(
                            mat[r * ell + c],
                            fq_neg[fq_exp[fq_log[f] + fq_log[w]]],
                            p,
                            e,
                        )
        rank += 1
        if rank == nrows:
            break
    return rank


cdef void decompose_into(
    long long code, int* row, int q, int ell
) noexcept nogil:
    cdef int i
    for i in range(ell):
        row[i] = <int> (code % q)
        code //= q


def rank_codes(
    long long[::1] codes,
    int q,
    int p,
    int e,
    int ell,
    const int[::1] fq_exp,
    const int[::1] fq_log,
    const int[::1] fq_inv,
    const int[::1] fq_neg,
):
    """F_q-rank of the coordinate vectors of the given top-field codes."""
    cdef int nrows = codes.shape[0]
    if nrows == 0:
        return 0
    cdef int* mat = <int*> malloc(nrows * ell * sizeof(int))
    if mat == NULL:
        raise MemoryError()
    cdef int r, rank
    with nogil:
        for r in range(nrows):
            decompose_into(codes[r], mat + r * ell, q, ell)
        rank = rank_digit_matrix(mat, nrows, ell, p, e, fq_exp, fq_log, fq_inv, fq_neg)
    free(mat)
    return rank


def sum_scaled_intersections(
    long long[::1] t_codes,
    long long[::1] w_codes,
    long long[::1] gammas,
    int q,
    int p,
    int e,
    int ell,
    const long long[::1] top_exp,
    const long long[::1] top_log,
    const int[::1] fq_exp,
    const int[::1] fq_log,
    const int[::1] fq_inv,
    const int[::1] fq_neg,
):
    """Sum over gamma of dim(gamma*T intersect W) for basis codes of T, W."""
    cdef int dim_t = t_codes.shape[0]
    cdef int dim_w = w_codes.shape[0]
    cdef int nrows = dim_t + dim_w
    cdef int ngamma = gammas.shape[0]
    if ngamma == 0:
        return 0
    cdef int* mat = <int*> malloc(max(nrows, 1) * ell * sizeof(int))
    cdef int* w_block = <int*> malloc(max(dim_w, 1) * ell * sizeof(int))
    cdef long long* t_logs = <long long*> malloc(max(dim_t, 1) * sizeof(long long))
    if mat == NULL or w_block == NULL or t_logs == NULL:
        free(mat)
        free(w_block)
        free(t_logs)
        raise MemoryError()
    cdef long long total = 0
    cdef long long lg, scaled
    cdef int g, r, c, rank
    with nogil:
        for r in range(dim_w):
            decompose_into(w_codes[r], w_block + r * ell, q, ell)
        for r in range(dim_t):
            t_logs[r] = top_log[t_codes[r]]
        for g in range(ngamma):
            lg = top_log[gammas[g]]
            for r in range(dim_t):
                scaled = top_exp[lg + t_logs[r]]
                decompose_into(scaled, mat + r * ell, q, ell)
            for r in range(dim_w):
                for c in range(ell):
                    mat[(dim_t + r) * ell + c] = w_block[r * ell + c]
            rank = rank_digit_matrix(
                mat, nrows, ell, p, e, fq_exp, fq_log, fq_inv, fq_neg
            )
            total += dim_t + dim_w - rank
    free(mat)
    free(w_block)
    free(t_logs)
    return total
