"""Regenerate the bundled triangulations in ``src/ahsslab/data``.

Projective spaces come from the antipodal quotient of the barycentric
subdivision of the cross-polytope boundary, followed by greedy edge
contractions that respect the link condition.  The Klein bottle starts from
a twisted square grid.  Every output is checked for its expected integral
homology before it is written.

    python3 scripts/make_triangulations.py
"""

from __future__ import annotations

import json
import sys
from itertools import combinations, permutations
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from ahsslab.abgroup import FGAbGroup  # noqa: E402
from ahsslab.complexes import (  # noqa: E402
    SimplicialComplex,
    check_links,
    fundamental_cycle,
    homology,
    product_complex,
)

DATA = ROOT / "src" / "ahsslab" / "data"


def closure(facets):
    out = set()
    for f in facets:
        f = tuple(sorted(f))
        for m in range(1, len(f) + 1):
            out.update(combinations(f, m))
    return out


def link_of(simplices, s):
    ss = set(s)
    return {tuple(v for v in t if v not in ss) for t in simplices if ss < set(t)}


def contract_edges(facets, keep_going=True):
    """Greedy edge contractions preserving the PL type (link condition)."""
    facets = {tuple(sorted(f)) for f in facets}
    changed = True
    while changed:
        changed = False
        simp = closure(facets)
        edges = sorted(s for s in simp if len(s) == 2)
        for a, b in edges:
            la = link_of(simp, (a,))
            lb = link_of(simp, (b,))
            lab = link_of(simp, (a, b))
            if (la & lb) != lab:
                continue
            new = set()
            for f in facets:
                if a in f and b in f:
                    continue
                if b in f:
                    f = tuple(sorted(set(f) - {b} | {a}))
                new.add(f)
            facets = new
            changed = keep_going
            break
    return sorted(facets)


def relabel(facets):
    verts = sorted({v for f in facets for v in f})
    pos = {v: i for i, v in enumerate(verts)}
    return sorted(tuple(sorted(pos[v] for v in f)) for f in facets)


def projective_space(n):
    """RP^n from sd(boundary of the (n+1)-cross-polytope) modulo the antipodal map."""
    dims = n + 1

    def canon(face):
        neg = frozenset(-v for v in face)
        return min(tuple(sorted(face)), tuple(sorted(neg)))

    facets = []
    for signs in range(2 ** dims):
        top = [(i + 1) * (-1 if signs >> i & 1 else 1) for i in range(dims)]
        for perm in permutations(top):
            flag = [canon(frozenset(perm[: k + 1])) for k in range(dims)]
            facets.append(tuple(flag))
    names = {}
    flat = []
    for f in facets:
        flat.append(tuple(names.setdefault(v, len(names)) for v in f))
    uniq = {tuple(sorted(f)) for f in flat}
    return relabel(contract_edges(uniq))


def klein_bottle(m=4, n=4):
    """Square grid (i, j) mod (m, n); crossing the top edge reflects i."""

    def v(i, j):
        if j >= n:
            j -= n
            i = -i
        return (i % m, j)

    facets = set()
    for i in range(m):
        for j in range(n):
            a, b, c, d = v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1)
            facets.add(tuple(sorted((a, b, d))))
            facets.add(tuple(sorted((a, c, d))))
    names = {}
    out = [tuple(names.setdefault(x, len(names)) for x in f) for f in facets]
    return relabel(contract_edges(out))


def csaszar_torus():
    out = []
    for i in range(7):
        out.append((i, (i + 1) % 7, (i + 3) % 7))
        out.append((i, (i + 2) % 7, (i + 3) % 7))
    return sorted(tuple(sorted(f)) for f in out)


RP2 = [[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 6], [1, 5, 6], [2, 3, 6], [2, 4, 5], [2, 5, 6], [3, 4, 5], [3, 4, 6]]


def as_complex(facets):
    return SimplicialComplex.from_facets([[str(v) for v in f] for f in facets])


def expect(X, groups, name):
    got = [str(homology(X, p)) for p in range(X.dim + 1)]
    if got != groups:
        raise SystemExit(f"{name}: homology {got}, expected {groups}")
    check_links(X)


def document(X, description, subcomplex=None):
    doc = {
        "description": description,
        "vertices": list(X.labels),
        "simplices": [list(X.simplex_labels(f)) for f in X.facets()],
    }
    if subcomplex is not None:
        doc["subcomplex"] = {"simplices": subcomplex}
    return doc


def format_document(doc):
    """JSON with one simplex per line."""
    lines = ["{"]
    keys = sorted(doc)
    for n, key in enumerate(keys):
        val = doc[key]
        end = "," if n < len(keys) - 1 else ""
        if key == "simplices":
            rows = [json.dumps(s) for s in val]
            lines.append(f' "{key}": [\n  ' + ",\n  ".join(rows) + f"\n ]{end}")
        elif key == "subcomplex":
            rows = [json.dumps(s) for s in val["simplices"]]
            lines.append(f' "{key}": {{"simplices": [\n  ' + ",\n  ".join(rows) + f"\n ]}}{end}")
        else:
            lines.append(f" {json.dumps(key)}: {json.dumps(val)}{end}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def essential_triangle_loop(X):
    """A 3-edge loop of the torus that is not the boundary of a triangle and is
    nontrivial in homology; returns its edges as label lists."""
    from ahsslab.complexes import homology_presentation

    H1 = homology_presentation(X, FGAbGroup(1), 1)
    edges = X.simplices(1)
    tris = set(X.simplices(2))
    for a, b, c in combinations(range(X.nvertices), 3):
        if (a, b, c) in tris:
            continue
        es = [(a, b), (b, c), (a, c)]
        if not all(e in X for e in es):
            continue
        chain = [0] * len(edges)
        chain[X.index((a, b))] = 1
        chain[X.index((b, c))] = 1
        chain[X.index((a, c))] = -1
        from ahsslab.complexes import Cochain

        z = Cochain.from_integers(X, 1, chain)
        coords = H1.coordinates(z)
        if any(coords):
            return [list(X.simplex_labels(e)) for e in es]
    raise SystemExit("no essential 3-edge loop found")


def essential_loop_mod2(X):
    """A short edge loop of the Klein bottle that is nonzero in H_1(;Z/2)."""
    from ahsslab.complexes import Cochain, homology_presentation

    G = FGAbGroup(0, (2,))
    H1 = homology_presentation(X, G, 1)
    nv = X.nvertices
    adj = {v: set() for v in range(nv)}
    for a, b in X.simplices(1):
        adj[a].add(b)
        adj[b].add(a)
    best = None
    for size in (3, 4, 5):
        for cyc in combinations(range(nv), size):
            for perm in permutations(cyc[1:]):
                loop = (cyc[0],) + perm
                if perm[0] > perm[-1]:
                    continue
                es = [tuple(sorted((loop[i], loop[(i + 1) % size]))) for i in range(size)]
                if not all(e in X for e in es):
                    continue
                if size == 3 and tuple(sorted(loop)) in X:
                    continue
                chain = [(0,)] * X.ncells(1)
                for e in es:
                    chain[X.index(e)] = (1,)
                z = Cochain(X, 1, G, tuple(chain))
                if any(H1.coordinates(z)):
                    best = es
                    break
            if best:
                break
        if best:
            break
    if best is None:
        raise SystemExit("no essential loop found")
    return [list(X.simplex_labels(e)) for e in best]


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    outputs = {}

    point = SimplicialComplex.from_facets([["0"]])
    outputs["point"] = document(point, "single vertex")

    s1 = as_complex([(0, 1), (1, 2), (0, 2)])
    expect(s1, ["Z", "Z"], "s1")
    outputs["s1"] = document(s1, "boundary of a triangle")

    s2 = as_complex([f for f in combinations(range(4), 3)])
    expect(s2, ["Z", "0", "Z"], "s2")
    outputs["s2"] = document(s2, "boundary of the tetrahedron")

    torus = as_complex(csaszar_torus())
    expect(torus, ["Z", "Z^2", "Z"], "torus")
    outputs["torus"] = document(
        torus, "seven-vertex Csaszar torus: facets {i,i+1,i+3} and {i,i+2,i+3} mod 7"
    )

    rp2 = as_complex(RP2)
    expect(rp2, ["Z", "Z/2", "0"], "rp2")
    outputs["rp2"] = document(rp2, "six-vertex real projective plane (hemi-icosahedron)")

    kb = as_complex(klein_bottle())
    expect(kb, ["Z", "Z + Z/2", "0"], "klein")
    outputs["klein"] = document(
        kb, "Klein bottle: twisted 4x4 square grid reduced by link-condition edge contractions"
    )

    rp3 = as_complex(projective_space(3))
    expect(rp3, ["Z", "Z/2", "0", "Z"], "rp3")
    outputs["rp3"] = document(
        rp3,
        "real projective 3-space: antipodal quotient of the subdivided cross-polytope boundary, "
        "reduced by link-condition edge contractions",
    )

    rp4 = as_complex(projective_space(4))
    expect(rp4, ["Z", "Z/2", "0", "Z/2", "0"], "rp4")
    outputs["rp4"] = document(
        rp4,
        "real projective 4-space: antipodal quotient of the subdivided cross-polytope boundary, "
        "reduced by link-condition edge contractions",
    )

    s2xs1 = product_complex(s2, s1)
    expect(s2xs1, ["Z", "Z", "Z", "Z"], "s2xs1")
    y = [f for f in (list(s2xs1.simplex_labels(t)) for t in s2xs1.simplices(2)) if all(lab.endswith("|0") for lab in f)]
    outputs["s2xs1"] = document(
        s2xs1, "staircase product of the tetrahedron boundary and a triangle; subcomplex S^2 x {0}", y
    )

    rp2xs2 = product_complex(rp2, s2)
    expect(rp2xs2, ["Z", "Z/2", "Z", "Z/2", "0"], "rp2xs2")
    y = [f for f in (list(rp2xs2.simplex_labels(t)) for t in rp2xs2.simplices(2)) if all(lab.endswith("|0") for lab in f)]
    outputs["rp2xs2"] = document(
        rp2xs2, "staircase product of the six-vertex RP^2 and the tetrahedron boundary; subcomplex RP^2 x {0}", y
    )

    torusxs2 = product_complex(torus, s2)
    expect(torusxs2, ["Z", "Z^2", "Z^2", "Z^2", "Z"], "torusxs2")
    y = [f for f in (list(torusxs2.simplex_labels(t)) for t in torusxs2.simplices(2)) if all(lab.endswith("|0") for lab in f)]
    outputs["torusxs2"] = document(
        torusxs2, "staircase product of the Csaszar torus and the tetrahedron boundary; subcomplex T^2 x {0}", y
    )

    meridian = essential_triangle_loop(torus)
    outputs["torus_meridian"] = document(
        torus, "Csaszar torus with an essential three-edge loop (not a triangle boundary)", meridian
    )

    loop = essential_loop_mod2(kb)
    outputs["klein_circle"] = document(kb, "Klein bottle with an edge loop nonzero in mod-2 homology", loop)

    for name, doc in outputs.items():
        path = DATA / f"{name}.json"
        path.write_text(format_document(doc))
        X = SimplicialComplex.from_facets(doc["simplices"], vertices=doc["vertices"])
        print(f"{name:16s} f-vector {X.cell_counts}")
    assert fundamental_cycle(rp4, 0) is None


if __name__ == "__main__":
    main()
