"""Pure-Python reference kernels.

Semantically identical to the compiled kernels in ``_core.pyx``; selected at
import time when the extension is unavailable (or forced via RSREPAIR_PURE).
Tables are plain indexable sequences: ``fq_exp`` doubled exp table of the
F_q multiplicative group, ``fq_log`` with log[0] = -1, element-wise ``fq_inv``
and ``fq_neg``, and for the top field the doubled ``top_exp`` / ``top_log``.
"""

from __future__ import annotations


def _fq_add(a, b, p, e):
    if p == 2:
        return a ^ b
    out, shift = 0, 1
    for _ in range(e):
        out += ((a % p + b % p) % p) * shift
        a //= p
        b //= p
        shift *= p
    return out


def _rank_of_digit_rows(rows, ell, q, p, e, fq_exp, fq_log, fq_inv, fq_neg):
    nrows = len(rows)
    rank = 0
    for col in range(ell):
        pivot = -1
        for r in range(rank, nrows):
            if rows[r][col]:
                pivot = r
                break
        if pivot < 0:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        inv_p = fq_inv[prow[col]]
        for r in range(rank + 1, nrows):
            v = rows[r][col]
            if v:
                f = fq_exp[fq_log[v] + fq_log[inv_p]]
                row = rows[r]
                for c in range(col, ell):
                    w = prow[c]
                    if w:
                        row[c] = _fq_add(
                            row[c], fq_neg[fq_exp[fq_log[f] + fq_log[w]]], p, e
                        )
        rank += 1
        if rank == nrows:
            break
    return rank


def _decompose(codes, q, ell):
    rows = []
    for code in codes:
        code = int(code)
        row = [0] * ell
        for i in range(ell):
            row[i] = code % q
            code //= q
        rows.append(row)
    return rows


def rank_codes(codes, q, p, e, ell, fq_exp, fq_log, fq_inv, fq_neg):
    """F_q-rank of the coordinate vectors of the given top-field codes."""
    rows = _decompose(codes, q, ell)
    return _rank_of_digit_rows(rows, ell, q, p, e, fq_exp, fq_log, fq_inv, fq_neg)


def sum_scaled_intersections(
    t_codes,
    w_codes,
    gammas,
    q,
    p,
    e,
    ell,
    top_exp,
    top_log,
    fq_exp,
    fq_log,
    fq_inv,
    fq_neg,
):
    """Sum over gamma of dim(gamma*T  intersect  W).

    T and W are given by independent basis codes; each term is
    dim(T) + dim(W) - rank(gamma*T basis ++ W basis).
    """
    dim_t = len(t_codes)
    dim_w = len(w_codes)
    w_rows = _decompose(w_codes, q, ell)
    t_logs = [int(top_log[int(c)]) for c in t_codes]
    total = 0
    for g in gammas:
        g = int(g)
        lg = int(top_log[g])
        scaled = [int(top_exp[lg + lt]) for lt in t_logs]
        rows = _decompose(scaled, q, ell) + [row[:] for row in w_rows]
        r = _rank_of_digit_rows(rows, ell, q, p, e, fq_exp, fq_log, fq_inv, fq_neg)
        total += dim_t + dim_w - r
    return total
