# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled elimination kernels on int64 storage.

Same algorithms and tie-breaking as ``_pykernels``, so both backends return
identical transforms.  Any entry that would leave the int64 range raises
``OverflowError``; the dispatcher then reruns the pure-Python kernel.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free, calloc
from libcpp.vector cimport vector
from libcpp.pair cimport pair
from libcpp.unordered_set cimport unordered_set

from . import _pykernels

cdef extern from *:
    """
    static inline int ck_mul(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static inline int ck_sub(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    static inline int ck_add(long long a, long long b, long long *r) { return __builtin_add_overflow(a, b, r); }
    """
    int ck_mul(long long a, long long b, long long *r) nogil
    int ck_sub(long long a, long long b, long long *r) nogil
    int ck_add(long long a, long long b, long long *r) nogil

ctypedef long long i64

cdef i64 LIMIT = 4611686018427387904  # 2**62: keeps negation and abs safe


cdef inline i64 _mul(i64 a, i64 b) except? -1:
    cdef i64 r
    if ck_mul(a, b, &r) or r > LIMIT or r < -LIMIT:
        raise OverflowError("int64 kernel overflow")
    return r


cdef inline i64 _submul(i64 d, i64 q, i64 s) except? -1:
    # d - q * s
    cdef i64 t, r
    if ck_mul(q, s, &t) or ck_sub(d, t, &r) or r > LIMIT or r < -LIMIT:
        raise OverflowError("int64 kernel overflow")
    return r


cdef inline i64 _fdiv(i64 a, i64 b):
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 _abs(i64 a):
    return -a if a < 0 else a


cdef class _Mat:
    """Row-major dense int64 matrix."""
    cdef i64 *data
    cdef Py_ssize_t nrows, ncols

    def __cinit__(self, Py_ssize_t nrows, Py_ssize_t ncols):
        self.nrows = nrows
        self.ncols = ncols
        self.data = <i64 *> calloc(max(nrows * ncols, 1), sizeof(i64))
        if self.data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.data)

    cdef inline i64 *row(self, Py_ssize_t i):
        return self.data + i * self.ncols

    cdef void swap_rows(self, Py_ssize_t a, Py_ssize_t b):
        cdef Py_ssize_t j
        cdef i64 t
        cdef i64 *ra = self.row(a)
        cdef i64 *rb = self.row(b)
        for j in range(self.ncols):
            t = ra[j]; ra[j] = rb[j]; rb[j] = t

    cdef int axpy(self, Py_ssize_t dst, Py_ssize_t src, i64 q) except -1:
        # row dst -= q * row src
        cdef Py_ssize_t j
        cdef i64 *rd = self.row(dst)
        cdef i64 *rs = self.row(src)
        if q == 0:
            return 0
        for j in range(self.ncols):
            if rs[j]:
                rd[j] = _submul(rd[j], q, rs[j])
        return 0

    cdef void negate_row(self, Py_ssize_t i):
        cdef Py_ssize_t j
        cdef i64 *r = self.row(i)
        for j in range(self.ncols):
            r[j] = -r[j]

    cdef list tolist(self):
        cdef Py_ssize_t i, j
        cdef list out = []
        cdef i64 *r
        for i in range(self.nrows):
            r = self.row(i)
            out.append([r[j] for j in range(self.ncols)])
        return out


cdef _Mat _load(rows, Py_ssize_t nrows, Py_ssize_t ncols):
    cdef _Mat M = _Mat(nrows, ncols)
    cdef Py_ssize_t i, j
    cdef i64 *r
    for i, row in enumerate(rows):
        r = M.row(i)
        for j in range(ncols):
            v = row[j]
            if v > LIMIT or v < -LIMIT:
                raise OverflowError("input entry exceeds int64 kernel range")
            r[j] = v
    return M


cdef _Mat _identity(Py_ssize_t n):
    cdef _Mat M = _Mat(n, n)
    cdef Py_ssize_t i
    for i in range(n):
        M.data[i * n + i] = 1
    return M


cdef Py_ssize_t _nnz(_Mat M, Py_ssize_t i):
    cdef Py_ssize_t j, c = 0
    cdef i64 *r = M.row(i)
    for j in range(M.ncols):
        if r[j]:
            c += 1
    return c


def echelon(rows, Py_ssize_t nrows, Py_ssize_t ncols):
    cdef _Mat A = _load(rows, nrows, ncols)
    cdef _Mat T = _identity(nrows)
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, i, k, p, n_live, n_next, best_nnz, z
    cdef i64 a, q, best_abs, v
    cdef Py_ssize_t *live = <Py_ssize_t *> malloc(max(nrows, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nxt = <Py_ssize_t *> malloc(max(nrows, 1) * sizeof(Py_ssize_t))
    try:
        for c in range(ncols):
            if r == nrows:
                break
            n_live = 0
            for i in range(r, nrows):
                if A.data[i * ncols + c]:
                    live[n_live] = i
                    n_live += 1
            if n_live == 0:
                continue
            while n_live > 1:
                p = -1
                for k in range(n_live):
                    i = live[k]
                    v = _abs(A.data[i * ncols + c])
                    z = _nnz(A, i)
                    if p < 0 or v < best_abs or (v == best_abs and z < best_nnz):
                        p, best_abs, best_nnz = i, v, z
                a = A.data[p * ncols + c]
                nxt[0] = p
                n_next = 1
                for k in range(n_live):
                    i = live[k]
                    if i == p:
                        continue
                    q = _fdiv(A.data[i * ncols + c], a)
                    A.axpy(i, p, q)
                    T.axpy(i, p, q)
                    if A.data[i * ncols + c]:
                        nxt[n_next] = i
                        n_next += 1
                # live rows stay in increasing index order
                _sort_small(nxt, n_next)
                for k in range(n_next):
                    live[k] = nxt[k]
                n_live = n_next
            p = live[0]
            if p != r:
                A.swap_rows(p, r)
                T.swap_rows(p, r)
            if A.data[r * ncols + c] < 0:
                A.negate_row(r)
                T.negate_row(r)
            pivots.append(c)
            r += 1
    finally:
        free(live)
        free(nxt)
    return A.tolist(), T.tolist(), pivots


cdef void _sort_small(Py_ssize_t *a, Py_ssize_t n):
    cdef Py_ssize_t i, j, t
    for i in range(1, n):
        t = a[i]
        j = i - 1
        while j >= 0 and a[j] > t:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = t


cdef tuple _xgcd(i64 a, i64 b):
    cdef i64 x0 = 1, x1 = 0, y0 = 0, y1 = 1, q, t
    while b:
        q = _fdiv(a, b)
        t = a - q * b
        a = b
        b = t
        t = _submul(x0, q, x1); x0 = x1; x1 = t
        t = _submul(y0, q, y1); y0 = y1; y1 = t
    return a, x0, y0


cdef int _comb2(_Mat M, Py_ssize_t t, Py_ssize_t s, i64 a11, i64 a12, i64 a21, i64 a22) except -1:
    # (row t, row s) <- (a11 t + a12 s, a21 t + a22 s)
    cdef Py_ssize_t j
    cdef i64 *rt = M.row(t)
    cdef i64 *rs = M.row(s)
    cdef i64 u, w, x, y
    for j in range(M.ncols):
        u = rt[j]; w = rs[j]
        if u == 0 and w == 0:
            continue
        x = _submul(_mul(a11, u), -a12, w)
        y = _submul(_mul(a21, u), -a22, w)
        rt[j] = x; rs[j] = y
    return 0


def smith(rows, Py_ssize_t nrows, Py_ssize_t ncols, transforms=True):
    cdef bint tr = bool(transforms)
    cdef _Mat A = _load(rows, nrows, ncols)
    cdef _Mat U = _identity(nrows) if tr else None
    cdef _Mat UinvT = _identity(nrows) if tr else None
    cdef _Mat VT = _identity(ncols) if tr else None
    cdef char *arow = <char *> malloc(max(nrows, 1))
    cdef char *acol = <char *> malloc(max(ncols, 1))
    cdef Py_ssize_t n_arow = nrows, n_acol = ncols
    cdef Py_ssize_t i, j, k, l, bi, bj
    cdef i64 a, q, v, best
    cdef list piv = []
    cdef bint found, again
    try:
        for i in range(nrows):
            arow[i] = 1
        for j in range(ncols):
            acol[j] = 1
        while n_arow and n_acol:
            found = False
            best = 0
            for i in range(nrows):
                if not arow[i]:
                    continue
                for j in range(ncols):
                    v = A.data[i * ncols + j]
                    if v and acol[j]:
                        v = _abs(v)
                        if not found or v < best:
                            found, best, bi, bj = True, v, i, j
                            if v == 1:
                                break
                if found and best == 1:
                    break
            if not found:
                break
            i, j = bi, bj
            while True:
                a = A.data[i * ncols + j]
                for k in range(nrows):
                    if not arow[k] or k == i or A.data[k * ncols + j] == 0:
                        continue
                    q = _fdiv(A.data[k * ncols + j], a)
                    A.axpy(k, i, q)
                    if tr:
                        U.axpy(k, i, q)
                        UinvT.axpy(i, k, -q)
                # smallest remaining entry in column j
                found = False
                for k in range(nrows):
                    if arow[k] and k != i and A.data[k * ncols + j]:
                        v = _abs(A.data[k * ncols + j])
                        if not found or v < best:
                            found, best, bi = True, v, k
                            if v == 1:
                                break
                if found:
                    i = bi
                    continue
                for l in range(ncols):
                    if l == j or not acol[l] or A.data[i * ncols + l] == 0:
                        continue
                    q = _fdiv(A.data[i * ncols + l], a)
                    A.data[i * ncols + l] = _submul(A.data[i * ncols + l], q, a)
                    if tr:
                        VT.axpy(l, j, q)
                found = False
                for l in range(ncols):
                    if l != j and acol[l] and A.data[i * ncols + l]:
                        v = _abs(A.data[i * ncols + l])
                        if not found or v < best:
                            found, best, bj = True, v, l
                            if v == 1:
                                break
                if not found:
                    break
                j = bj
            piv.append((i, j))
            arow[i] = 0
            acol[j] = 0
            n_arow -= 1
            n_acol -= 1
    finally:
        free(arow)
        free(acol)

    cdef Py_ssize_t r = len(piv), t, s
    cdef list diag = [A.data[pi * ncols + pj] for pi, pj in piv]
    cdef list row_order, col_order
    cdef _Mat U2, UinvT2, VT2
    if tr:
        prow = {pi for pi, _ in piv}
        pcol = {pj for _, pj in piv}
        row_order = [pi for pi, _ in piv] + [x for x in range(nrows) if x not in prow]
        col_order = [pj for _, pj in piv] + [x for x in range(ncols) if x not in pcol]
        U2 = _permute(U, row_order)
        UinvT2 = _permute(UinvT, row_order)
        VT2 = _permute(VT, col_order)
        U, UinvT, VT = U2, UinvT2, VT2
    for t in range(r):
        if diag[t] < 0:
            diag[t] = -diag[t]
            if tr:
                U.negate_row(t)
                UinvT.negate_row(t)
    cdef i64 da, db, g, x, y, ag, bg
    for t in range(r):
        for s in range(t + 1, r):
            da = diag[t]
            db = diag[s]
            if db % da == 0:
                continue
            g, x, y = _xgcd(da, db)
            ag = da / g
            bg = db / g
            diag[t] = g
            diag[s] = _mul(da, bg)
            if tr:
                _comb2(U, t, s, x, y, -bg, ag)
                _comb2(UinvT, t, s, ag, bg, -y, x)
                _comb2(VT, t, s, 1, 1, -_mul(y, bg), _mul(x, ag))
    diag = diag + [0] * (min(nrows, ncols) - r)
    if not tr:
        return diag, None, None, None
    Ut = UinvT.tolist()
    Vt = VT.tolist()
    Uinv = [list(col) for col in zip(*Ut)] if nrows else []
    V = [list(col) for col in zip(*Vt)] if ncols else []
    return diag, U.tolist(), Uinv, V


cdef _Mat _permute(_Mat M, list order):
    cdef _Mat out = _Mat(M.nrows, M.ncols)
    cdef Py_ssize_t t, j, src
    for t, src in enumerate(order):
        for j in range(M.ncols):
            out.data[t * M.ncols + j] = M.data[src * M.ncols + j]
    return out


# ---------------------------------------------------------------------------
# Sparse invariant factors

ctypedef pair[int, i64] entry
ctypedef vector[entry] svec


cdef int _merge(svec &dst, const svec &src, i64 f, i64 p, int k,
                vector[unordered_set[int]] &rows) except -1:
    # dst -= f * src (mod p when p > 0); keeps row occupancy in sync
    cdef svec out
    cdef size_t a = 0, b = 0
    cdef i64 v
    cdef int r
    out.reserve(dst.size() + src.size())
    while a < dst.size() or b < src.size():
        if b == src.size() or (a < dst.size() and dst[a].first < src[b].first):
            out.push_back(dst[a])
            a += 1
            continue
        r = src[b].first
        if a < dst.size() and dst[a].first == r:
            if p:
                v = (dst[a].second - (f * src[b].second) % p) % p
                if v < 0:
                    v += p
            else:
                v = _submul(dst[a].second, f, src[b].second)
            a += 1
            if v:
                out.push_back(entry(r, v))
            else:
                rows[r].erase(k)
        else:
            if p:
                v = (p - (f * src[b].second) % p) % p
            else:
                v = _submul(0, f, src[b].second)
            if v:
                out.push_back(entry(r, v))
                rows[r].insert(k)
        b += 1
    dst.swap(out)
    return 0


def sparse_invariants(columns, Py_ssize_t nrows, modulus=0):
    cdef i64 p = modulus
    cdef Py_ssize_t ncols = len(columns), j, idx
    cdef vector[svec] cols
    cdef vector[unordered_set[int]] rows
    cdef vector[char] alive
    cdef svec col
    cdef i64 v, a, inv, f
    cdef int i, k, best_i
    cdef size_t best_cost, cost
    cdef Py_ssize_t rank = 0
    cdef bint changed
    if p and p >= (1 << 31):
        raise OverflowError("modulus too large for the int64 kernel")
    cols.resize(ncols)
    rows.resize(nrows)
    alive.resize(ncols)
    for j, c in enumerate(columns):
        items = []
        for i_, v_ in c.items():
            if not 0 <= i_ < nrows:
                raise ValueError("row index out of range")
            if p:
                v_ = v_ % p
            if v_:
                if v_ > LIMIT or v_ < -LIMIT:
                    raise OverflowError("input entry exceeds int64 kernel range")
                items.append((i_, v_))
        items.sort()
        for i_, v_ in items:
            cols[j].push_back(entry(i_, v_))
            rows[i_].insert(j)
        alive[j] = cols[j].size() > 0
    changed = True
    while changed:
        changed = False
        order = []
        for j in range(ncols):
            if alive[j]:
                order.append((cols[j].size(), j))
        order.sort()
        for item in order:
            j = item[1]
            if not alive[j]:
                continue
            if cols[j].size() == 0:
                alive[j] = 0
                continue
            best_i = -1
            best_cost = 0
            for idx in range(<Py_ssize_t> cols[j].size()):
                v = cols[j][idx].second
                if (v % p != 0) if p else (v == 1 or v == -1):
                    cost = rows[cols[j][idx].first].size()
                    if best_i < 0 or cost < best_cost:
                        best_i = cols[j][idx].first
                        best_cost = cost
                        a = v
                        if cost == 1:
                            break
            if best_i < 0:
                continue
            i = best_i
            inv = _modinv(a, p) if p else a
            col = cols[j]
            others = []
            for kk in rows[i]:
                if kk != j:
                    others.append(kk)
            for k in others:
                f = 0
                for idx in range(<Py_ssize_t> cols[k].size()):
                    if cols[k][idx].first == i:
                        f = cols[k][idx].second
                        break
                f = (f * inv) % p if p else _mul(f, inv)
                _merge(cols[k], col, f, p, k, rows)
                if cols[k].size() == 0:
                    alive[k] = 0
            for idx in range(<Py_ssize_t> col.size()):
                rows[col[idx].first].erase(j)
            rows[i].clear()
            cols[j].clear()
            alive[j] = 0
            rank += 1
            changed = True
    rest = []
    for j in range(ncols):
        if alive[j] and cols[j].size():
            rest.append(j)
    torsion = []
    if rest:
        used_set = set()
        for j in rest:
            for idx in range(<Py_ssize_t> cols[j].size()):
                used_set.add(cols[j][idx].first)
        used = sorted(used_set)
        pos = {}
        for t, r_ in enumerate(used):
            pos[r_] = t
        dense = []
        for _ in used:
            dense.append([0] * len(rest))
        for t, j in enumerate(rest):
            for idx in range(<Py_ssize_t> cols[j].size()):
                dense[pos[cols[j][idx].first]][t] = cols[j][idx].second
        if p:
            rank += _pykernels._rank_mod_p(dense, p)
        else:
            try:
                diag = smith(dense, len(used), len(rest), False)[0]
            except OverflowError:
                diag = _pykernels.smith(dense, len(used), len(rest), False)[0]
            for d in diag:
                if d:
                    rank += 1
                    if d > 1:
                        torsion.append(d)
    return rank, torsion


cdef i64 _modinv(i64 a, i64 p):
    return pow(int(a), -1, int(p))
