"""Reading and writing graphs, patterns, distributions, types and partitions."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .distributions import Distribution, from_json
from .graph import Graph, RootedPattern, named_pattern
from .szemeredi import Partition, SzemerediType


def _parse_text_graph(text: str) -> tuple[Graph, int | None]:
    n = None
    root = None
    edges = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            n = int(parts[1])
        elif parts[0] == "root":
            root = int(parts[1])
        else:
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {raw!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise ValueError("missing 'n <count>' header")
    return Graph.from_edges(n, edges), root


def _parse(path) -> tuple[Graph, int | None]:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        return Graph.from_edges(int(obj["n"]), [tuple(e) for e in obj.get("edges", [])]), obj.get("root")
    return _parse_text_graph(text)


def read_graph(path) -> Graph:
    """Plain text ("n <count>" then "u v" lines) or JSON {"n", "edges"}."""
    return _parse(path)[0]


def write_graph(G: Graph, path, fmt: str = "text") -> None:
    if fmt == "json":
        Path(path).write_text(json.dumps({"n": G.n, "edges": [list(e) for e in G.edges()]}))
    else:
        lines = [f"n {G.n}"] + [f"{u} {v}" for u, v in G.edges()]
        Path(path).write_text("\n".join(lines) + "\n")


def read_pattern(spec: str) -> RootedPattern:
    """A built-in pattern name, or a graph file with a root (default 0)."""
    if not Path(spec).exists():
        return named_pattern(spec)
    G, root = _parse(spec)
    return RootedPattern(G, int(root or 0))


def read_distribution(path) -> Distribution:
    return from_json(json.loads(Path(path).read_text()))


def read_type(path) -> SzemerediType:
    obj = json.loads(Path(path).read_text())
    return SzemerediType(int(obj["k"]), float(obj["eps"]), np.array(obj["S"], dtype=float))


def read_partition(path) -> Partition:
    a = json.loads(Path(path).read_text())
    return Partition(np.array(a, dtype=np.int64), int(max(a)) if a else 0)


def to_jsonable(obj):
    """Recursively convert numpy and Fraction values for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    return obj
