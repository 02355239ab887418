"""Bundled triangulations (regenerate with ``scripts/make_triangulations.py``)."""

from __future__ import annotations

from importlib import resources

from ..io import ComplexDocument, parse_document

NAMES = (
    "point", "s1", "s2", "torus", "rp2", "klein", "rp3", "rp4",
    "s2xs1", "rp2xs2", "torusxs2", "torus_meridian", "klein_circle",
)


def load_document(name: str) -> ComplexDocument:
    if name not in NAMES:
        raise KeyError(f"no bundled complex named {name!r}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text()
    return parse_document(text, source=name)


def load_complex(name: str):
    return load_document(name).complex


def data_path(name: str) -> str:
    return str(resources.files(__package__).joinpath(f"{name}.json"))
