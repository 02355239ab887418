"""JSON documents describing complexes, and deterministic report output."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .complexes import NotRestrictedTriangulation, SimplicialComplex, Subcomplex


class DocumentParseError(ValueError):
    """The input is not valid JSON or lacks required fields."""


class DocumentValidationError(ValueError):
    """The JSON is well formed but does not describe a valid complex."""


@dataclass
class ComplexDocument:
    complex: SimplicialComplex
    description: str = ""
    subcomplex: Optional[Subcomplex] = None
    orientation_cycle: Optional[tuple[int, ...]] = None


def _label_lists(obj: Any, what: str) -> list[list[str]]:
    if not isinstance(obj, list) or not all(isinstance(s, list) for s in obj):
        raise DocumentParseError(f"{what} must be a list of lists of labels")
    out = []
    for s in obj:
        if not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in s):
            raise DocumentParseError(f"{what}: labels must be strings")
        out.append([str(v) for v in s])
    return out


def parse_document(text: str, source: str = "<input>") -> ComplexDocument:
    """Parse a complex document.

    Fields: ``vertices`` (labels), ``simplices`` (top cells suffice),
    optional ``order`` (explicit vertex order), ``orientation_cycle``
    (one integer per top simplex in the complex's order), ``subcomplex``
    (``{"simplices": [...]}``, closed under faces automatically).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"{source}: {exc}") from None
    if not isinstance(raw, dict):
        raise DocumentParseError(f"{source}: top level must be an object")
    if "simplices" not in raw:
        raise DocumentParseError(f"{source}: missing 'simplices'")
    simplices = _label_lists(raw["simplices"], "simplices")
    vertices = raw.get("vertices")
    if vertices is not None:
        if not isinstance(vertices, list):
            raise DocumentParseError(f"{source}: 'vertices' must be a list")
        vertices = [str(v) for v in vertices]
        if len(set(vertices)) != len(vertices):
            raise DocumentValidationError(f"{source}: duplicate vertex labels")
    try:
        X = SimplicialComplex.from_facets(
            [s for s in simplices if s], vertices=vertices, order=raw.get("order")
        )
    except ValueError as exc:
        raise DocumentValidationError(f"{source}: {exc}") from None
    if any(len(set(s)) != len(s) for s in simplices):
        raise DocumentValidationError(f"{source}: simplex with repeated vertex")
    doc = ComplexDocument(X, str(raw.get("description", "")))
    if "orientation_cycle" in raw and raw["orientation_cycle"] is not None:
        oc = raw["orientation_cycle"]
        if not isinstance(oc, list) or not all(isinstance(v, int) for v in oc):
            raise DocumentParseError(f"{source}: 'orientation_cycle' must be a list of integers")
        if len(oc) != X.ncells(X.dim):
            raise DocumentValidationError(f"{source}: orientation cycle needs one entry per top simplex")
        doc.orientation_cycle = tuple(oc)
    if "subcomplex" in raw and raw["subcomplex"] is not None:
        sub = raw["subcomplex"]
        if not isinstance(sub, dict) or "simplices" not in sub:
            raise DocumentParseError(f"{source}: 'subcomplex' must be an object with 'simplices'")
        try:
            doc.subcomplex = Subcomplex(X, _label_lists(sub["simplices"], "subcomplex"), by_label=True, close=True)
        except NotRestrictedTriangulation as exc:
            raise DocumentValidationError(f"{source}: {exc}") from None
    return doc


def load_path(path: str) -> ComplexDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentParseError(f"{path}: {exc.strerror}") from None
    return parse_document(text, source=path)


def dumps_report(report: dict) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
