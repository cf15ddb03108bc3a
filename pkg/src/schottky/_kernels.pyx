# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled word-tree scan.  Same contract as ``_kernels_py.scan_words``.

2x2 letters take an iterative depth-first loop with the running products
held in per-depth slots; 3x3 letters defer to the pure-Python twin.
"""

from libc.stdlib cimport malloc, free

from . import _kernels_py


cdef inline long _val(object x, long p):
    cdef long v = 0
    if x < 0:
        x = -x
    if p == 2:
        return (x & -x).bit_length() - 1
    pk = p ** 16
    while x % pk == 0:
        x //= pk
        v += 16
    while x % p == 0:
        x //= p
        v += 1
    return v


cdef inline long _min_val(object a, object b, object c, object d, long p):
    cdef long best = -1
    cdef long v
    if a:
        best = _val(a, p)
    if b:
        v = _val(b, p)
        if best < 0 or v < best:
            best = v
    if c:
        v = _val(c, p)
        if best < 0 or v < best:
            best = v
    if d:
        v = _val(d, p)
        if best < 0 or v < best:
            best = v
    return best


def scan_words(letters, dens, det_vals, int max_len, long p=0, bint displacement=False, first_letters=None):
    if len(letters[0]) != 4:
        return _kernels_py.scan_words(letters, dens, det_vals, max_len, p, displacement, first_letters)

    cdef int nlet = len(letters)
    cdef int depth, k, back, s
    cdef long disp, dvk
    cdef int *word = <int *> malloc(max_len * sizeof(int))
    cdef int *nxt = <int *> malloc(max_len * sizeof(int))
    cdef long *dv = <long *> malloc(max_len * sizeof(long))
    cdef long *ldv = <long *> malloc(nlet * sizeof(long))
    if word == NULL or nxt == NULL or dv == NULL or ldv == NULL:
        free(word); free(nxt); free(dv); free(ldv)
        raise MemoryError()

    la = [l[0] for l in letters]
    lb = [l[1] for l in letters]
    lc = [l[2] for l in letters]
    ld = [l[3] for l in letters]
    for k in range(nlet):
        ldv[k] = det_vals[k]
    m0 = [None] * max_len
    m1 = [None] * max_len
    m2 = [None] * max_len
    m3 = [None] * max_len
    den = [None] * max_len

    counts = [0] * max_len
    trivial = [0] * max_len
    first_trivial = [None] * max_len
    min_disp = [None] * max_len
    cdef long zero = 0
    starts = list(range(nlet)) if first_letters is None else list(first_letters)

    try:
        for s in starts:
            depth = 0
            word[0] = s
            m0[0] = la[s]; m1[0] = lb[s]; m2[0] = lc[s]; m3[0] = ld[s]
            den[0] = dens[s]
            dv[0] = ldv[s]
            nxt[0] = -1  # not yet visited
            while depth >= 0:
                if nxt[depth] == -1:
                    counts[depth] += 1
                    a = m0[depth]; b = m1[depth]; c = m2[depth]; d = m3[depth]
                    if b == 0 and c == 0 and a == den[depth] and d == den[depth]:
                        trivial[depth] += 1
                        if first_trivial[depth] is None:
                            first_trivial[depth] = tuple([word[i] for i in range(depth + 1)])
                    elif displacement:
                        disp = dv[depth] - 2 * _min_val(a, b, c, d, p)
                        cur = min_disp[depth]
                        if cur is None or disp < cur[0]:
                            min_disp[depth] = (disp, tuple([word[i] for i in range(depth + 1)]))
                        if disp == 0:
                            zero += 1
                    nxt[depth] = 0
                    if depth + 1 == max_len:
                        depth -= 1
                        continue
                k = nxt[depth]
                back = word[depth] ^ 1
                if k == back:
                    k += 1
                if k >= nlet:
                    depth -= 1
                    continue
                nxt[depth] = k + 1
                a = m0[depth]; b = m1[depth]; c = m2[depth]; d = m3[depth]
                x0 = la[k]; x1 = lb[k]; x2 = lc[k]; x3 = ld[k]
                depth += 1
                word[depth] = k
                m0[depth] = a * x0 + b * x2
                m1[depth] = a * x1 + b * x3
                m2[depth] = c * x0 + d * x2
                m3[depth] = c * x1 + d * x3
                den[depth] = den[depth - 1] * dens[k]
                dv[depth] = dv[depth - 1] + ldv[k]
                nxt[depth] = -1
    finally:
        free(word); free(nxt); free(dv); free(ldv)

    first = None
    for w in first_trivial:
        if w is not None:
            first = w
            break
    out = {
        "counts": counts,
        "trivial_count": sum(trivial),
        "trivial_by_length": trivial,
        "first_trivial": first,
    }
    if displacement:
        out["min_disp"] = min_disp
        out["zero_count"] = zero
    return out
