"""Bundled example graphs and triangulation complexes."""

import json
from importlib import resources

from ..errors import InputFormatError
from ..graphs import MetricGraph, graph_from_dict

__all__ = ["graph_names", "load_bundled_graph", "complex_names", "load_bundled_complex_dict"]


def _read(kind, name):
    ref = resources.files(__package__).joinpath(kind, name + ".json")
    try:
        return json.loads(ref.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputFormatError(f"no bundled {kind[:-1]} named {name!r}") from None


def graph_names():
    return ("theta", "two_loop", "dumbbell", "k4")


def load_bundled_graph(name, lengths=None) -> MetricGraph:
    """A bundled graph, optionally re-metrised with the given lengths."""
    graph = graph_from_dict(_read("graphs", name))
    if lengths is not None:
        graph = graph.with_lengths(lengths)
    return graph


def complex_names():
    return ("pants", "torus_1_1", "surface_1_2", "surface_0_4")


def load_bundled_complex_dict(name):
    return _read("complexes", name)
