"""Pure-Python word-tree scan; reference twin of the compiled ``_kernels``.

Letters are integer matrices ``M_k`` (flattened row-major) with a
denominator ``den_k``, standing for ``M_k / den_k``.  Letter ``k ^ 1`` is the
inverse of letter ``k``.  Words are explored depth-first along the prefix
tree, so each word costs one integer matrix product; within one length the
visiting order is lexicographic.
"""


def _val(x, p):
    if x == 0:
        return None
    if x < 0:
        x = -x
    if p == 2:
        return (x & -x).bit_length() - 1
    v = 0
    pk = p ** 16
    while x % pk == 0:
        x //= pk
        v += 16
    while x % p == 0:
        x //= p
        v += 1
    return v


def min_valuation(entries, p):
    best = None
    for x in entries:
        v = _val(x, p)
        if v is not None and (best is None or v < best):
            best = v
    return best


def scan_words(letters, dens, det_vals, max_len, p=0, displacement=False, first_letters=None):
    """Scan every reduced word of length 1..max_len.

    Returns a dict with per-length ``counts``, ``trivial_count``,
    ``first_trivial`` (letter tuple or None) and, when ``displacement`` is
    set, ``min_disp`` (per length ``(value, word)`` or None over non-trivial
    words) and ``zero_count``.  Displacement of the standard vertex of T_p
    by ``M`` is ``v_p(det M) - 2 min v_p(M_ij)``.
    """
    nlet = len(letters)
    dim = 2 if len(letters[0]) == 4 else 3
    counts = [0] * max_len
    first_trivial = [None] * max_len
    trivial = [0] * max_len
    min_disp = [None] * max_len
    zero = [0]
    word = [0] * max_len
    starts = range(nlet) if first_letters is None else first_letters

    def visit(depth, m, d, dv):
        # m is the integer matrix of word[:depth+1], d its denominator
        counts[depth] += 1
        if dim == 2:
            is_id = m[1] == 0 and m[2] == 0 and m[0] == d and m[3] == d
        else:
            is_id = m == (d, 0, 0, 0, d, 0, 0, 0, d)
        if is_id:
            trivial[depth] += 1
            if first_trivial[depth] is None:
                first_trivial[depth] = tuple(word[: depth + 1])
        elif displacement:
            disp = dv - 2 * min_valuation(m, p)
            cur = min_disp[depth]
            if cur is None or disp < cur[0]:
                min_disp[depth] = (disp, tuple(word[: depth + 1]))
            if disp == 0:
                zero[0] += 1
        if depth + 1 == max_len:
            return
        back = word[depth] ^ 1
        for k in range(nlet):
            if k == back:
                continue
            word[depth + 1] = k
            b = letters[k]
            if dim == 2:
                nm = (
                    m[0] * b[0] + m[1] * b[2],
                    m[0] * b[1] + m[1] * b[3],
                    m[2] * b[0] + m[3] * b[2],
                    m[2] * b[1] + m[3] * b[3],
                )
            else:
                nm = tuple(
                    m[3 * i] * b[j] + m[3 * i + 1] * b[3 + j] + m[3 * i + 2] * b[6 + j]
                    for i in range(3)
                    for j in range(3)
                )
            visit(depth + 1, nm, d * dens[k], dv + det_vals[k])

    for k in starts:
        word[0] = k
        visit(0, tuple(letters[k]), dens[k], det_vals[k])

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
        out["zero_count"] = zero[0]
    return out
