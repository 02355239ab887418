"""Pure-Python integer elimination kernels.

All routines take and return plain lists of Python ints, so intermediate
entries never overflow.  The compiled twin in ``_ckernels`` exposes the same
three functions on int64 storage and raises ``OverflowError`` when an entry
would leave that range.
"""

from __future__ import annotations


def _axpy(dst: dict, src: dict, q: int) -> None:
    # dst -= q * src, dropping zeros
    for k, v in src.items():
        nv = dst.get(k, 0) - q * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)


def _to_sparse_rows(rows, ncols):
    out = []
    for row in rows:
        out.append({j: v for j, v in enumerate(row) if v})
    return out


def _to_dense(sparse_rows, ncols):
    dense = []
    for r in sparse_rows:
        row = [0] * ncols
        for j, v in r.items():
            row[j] = v
        dense.append(row)
    return dense


def _identity_rows(n):
    return [{i: 1} for i in range(n)]


def echelon(rows, nrows, ncols):
    """Row echelon form ``E = T A`` with ``T`` unimodular.

    Returns ``(E, T, pivots)``: ``E`` and ``T`` as dense row lists, ``pivots``
    the pivot column of each nonzero row of ``E`` (rows ``0..len(pivots)-1``).
    Pivot entries are positive; rows below the pivots are zero.
    """
    A = _to_sparse_rows(rows, ncols)
    T = _identity_rows(nrows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        live = [i for i in range(r, nrows) if c in A[i]]
        if not live:
            continue
        while len(live) > 1:
            p = min(live, key=lambda i: (abs(A[i][c]), len(A[i]), i))
            a = A[p][c]
            nxt = [p]
            for k in live:
                if k == p:
                    continue
                q = A[k][c] // a
                _axpy(A[k], A[p], q)
                _axpy(T[k], T[p], q)
                if c in A[k]:
                    nxt.append(k)
            live = nxt
        p = live[0]
        if p != r:
            A[p], A[r] = A[r], A[p]
            T[p], T[r] = T[r], T[p]
        if A[r][c] < 0:
            A[r] = {k: -v for k, v in A[r].items()}
            T[r] = {k: -v for k, v in T[r].items()}
        pivots.append(c)
        r += 1
    return _to_dense(A, ncols), _to_dense(T, nrows), pivots


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def smith(rows, nrows, ncols, transforms=True):
    """Smith normal form ``U A V = S``.

    Returns ``(diag, U, Uinv, V)``.  ``diag`` has length ``min(nrows, ncols)``,
    nonnegative, forming a divisibility chain with zeros last.  The three
    matrices are dense row lists, or ``None`` when ``transforms`` is false.
    Pivoting always takes a minimal-absolute-value entry.
    """
    A = _to_sparse_rows(rows, ncols)
    if transforms:
        U = _identity_rows(nrows)
        # inverse of U and V are kept column-wise (as rows of the transpose)
        UinvT = _identity_rows(nrows)
        VT = _identity_rows(ncols)
    active_rows = set(range(nrows))
    piv = []  # (row, col)

    def smallest(cands):
        best = None
        for i, j in cands:
            v = abs(A[i][j])
            if best is None or v < best[0]:
                best = (v, i, j)
                if v == 1:
                    break
        return best

    active_cols = set(range(ncols))
    while active_rows and active_cols:
        best = None
        for i in sorted(active_rows):
            for j in sorted(A[i]):
                av = abs(A[i][j])
                if j in active_cols and (best is None or av < best[0]):
                    best = (av, i, j)
                    if av == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        while True:
            a = A[i][j]
            # clear column j with row operations
            for k in sorted(active_rows):
                if k == i or j not in A[k]:
                    continue
                q = A[k][j] // a
                _axpy(A[k], A[i], q)
                if transforms:
                    _axpy(U[k], U[i], q)
                    # Uinv: col_i += q col_k
                    _axpy(UinvT[i], UinvT[k], -q)
            rem = [(k, j) for k in sorted(active_rows) if k != i and j in A[k]]
            if rem:
                _, i, j = smallest(rem)
                continue
            # column j is now zero off row i, so column operations only touch row i
            for l in sorted(A[i]):
                if l == j or l not in active_cols:
                    continue
                q = A[i][l] // a
                nv = A[i][l] - q * a
                if nv:
                    A[i][l] = nv
                else:
                    del A[i][l]
                if transforms:
                    _axpy(VT[l], VT[j], q)
            rem = [(i, l) for l in sorted(A[i]) if l != j and l in active_cols]
            if not rem:
                break
            _, i, j = smallest(rem)
        piv.append((i, j))
        active_rows.discard(i)
        active_cols.discard(j)

    r = len(piv)
    diag = [A[i][j] for i, j in piv]
    if transforms:
        row_order = [i for i, _ in piv] + sorted(set(range(nrows)) - {i for i, _ in piv})
        col_order = [j for _, j in piv] + sorted(set(range(ncols)) - {j for _, j in piv})
        U = [U[i] for i in row_order]
        UinvT = [UinvT[i] for i in row_order]
        VT = [VT[j] for j in col_order]
    for t in range(r):
        if diag[t] < 0:
            diag[t] = -diag[t]
            if transforms:
                U[t] = {k: -v for k, v in U[t].items()}
                UinvT[t] = {k: -v for k, v in UinvT[t].items()}
    # divisibility chain via 2x2 unimodular moves
    for t in range(r):
        for s in range(t + 1, r):
            a, b = diag[t], diag[s]
            if b % a == 0:
                continue
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            diag[t], diag[s] = g, a * bg
            if transforms:
                # U rows: [x, y; -b/g, a/g]
                ut, us = U[t], U[s]
                nt = {}
                _axpy(nt, ut, -x)
                _axpy(nt, us, -y)
                ns = {}
                _axpy(ns, ut, bg)
                _axpy(ns, us, -ag)
                U[t], U[s] = nt, ns
                # Uinv columns: inverse of the 2x2 is [a/g, -y; b/g, x]
                it, is_ = UinvT[t], UinvT[s]
                nit = {}
                _axpy(nit, it, -ag)
                _axpy(nit, is_, -bg)
                nis = {}
                _axpy(nis, it, y)
                _axpy(nis, is_, -x)
                UinvT[t], UinvT[s] = nit, nis
                # V columns: [1, -y*b/g; 1, x*a/g]
                vt, vs = VT[t], VT[s]
                nvt = {}
                _axpy(nvt, vt, -1)
                _axpy(nvt, vs, -1)
                nvs = {}
                _axpy(nvs, vt, y * bg)
                _axpy(nvs, vs, -x * ag)
                VT[t], VT[s] = nvt, nvs
    diag = diag + [0] * (min(nrows, ncols) - r)
    if not transforms:
        return diag, None, None, None
    Ud = _to_dense(U, nrows)
    Uinv = [list(col) for col in zip(*_to_dense(UinvT, nrows))] if nrows else []
    V = [list(col) for col in zip(*_to_dense(VT, ncols))] if ncols else []
    return diag, Ud, Uinv, V


def sparse_invariants(columns, nrows, modulus=0):
    """Rank and invariant factors of a sparse matrix given by columns.

    ``columns`` is a list of ``{row: value}`` dicts.  With ``modulus == 0``
    the result is ``(rank, torsion)`` over the integers, ``torsion`` the
    invariant factors ``>= 2``.  With a prime ``modulus`` the rank over that
    field is returned and ``torsion`` is empty.
    """
    p = modulus
    cols = []
    for c in columns:
        if p:
            d = {i: v % p for i, v in c.items() if v % p}
        else:
            d = {i: v for i, v in c.items() if v}
        cols.append(d)
    rows = {}
    for j, c in enumerate(cols):
        for i in c:
            rows.setdefault(i, set()).add(j)
    alive = set(j for j, c in enumerate(cols) if c)
    rank = 0

    def is_unit(v):
        return (v % p != 0) if p else (v == 1 or v == -1)

    changed = True
    while changed:
        changed = False
        for j in sorted(alive, key=lambda j: (len(cols[j]), j)):
            if j not in alive:
                continue
            col = cols[j]
            if not col:
                alive.discard(j)
                continue
            best = None
            for i, v in col.items():
                if is_unit(v):
                    cost = len(rows[i])
                    if best is None or cost < best[0]:
                        best = (cost, i)
                        if cost == 1:
                            break
            if best is None:
                continue
            i = best[1]
            a = col[i]
            inv = pow(a, -1, p) if p else a
            for k in list(rows[i]):
                if k == j:
                    continue
                ck = cols[k]
                f = ck[i] * inv
                if p:
                    f %= p
                for r, v in col.items():
                    nv = ck.get(r, 0) - f * v
                    if p:
                        nv %= p
                    if nv:
                        if r not in ck:
                            rows[r].add(k)
                        ck[r] = nv
                    else:
                        if r in ck:
                            del ck[r]
                            rows[r].discard(k)
                if not ck:
                    alive.discard(k)
            for r in col:
                rows[r].discard(j)
            del rows[i]
            cols[j] = {}
            alive.discard(j)
            rank += 1
            changed = True
    rest = [j for j in sorted(alive) if cols[j]]
    torsion = []
    if rest:
        used_rows = sorted({i for j in rest for i in cols[j]})
        pos = {i: t for t, i in enumerate(used_rows)}
        dense = [[0] * len(rest) for _ in used_rows]
        for t, j in enumerate(rest):
            for i, v in cols[j].items():
                dense[pos[i]][t] = v
        if p:
            rank += _rank_mod_p(dense, p)
        else:
            diag, _, _, _ = smith(dense, len(used_rows), len(rest), transforms=False)
            for d in diag:
                if d:
                    rank += 1
                    if d > 1:
                        torsion.append(d)
    return rank, torsion


def _rank_mod_p(dense, p):
    rows = [[v % p for v in row] for row in dense]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank
