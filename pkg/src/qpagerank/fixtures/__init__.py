"""Bundled edge-list fixtures."""

from importlib import resources
from pathlib import Path

from ..graph import DirectedGraph, load_edge_list


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(f"{name}.edges")))


def load_fixture(name: str) -> DirectedGraph:
    return load_edge_list(fixture_path(name))
