"""Edge-list files in and out, and DOT export of the final overlay."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

from .errors import ParseError
from .graph import Graph
from .records import EdgeRecord


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_edge_list(text: str) -> Graph:
    """Parse "n m" followed by m lines "u v". Lines starting with '#' are skipped."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        last = lineno
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected two fields, got {len(tokens)}", lineno)
        a, b = _ints(tokens, lineno)
        if header is None:
            if a < 0 or b < 0:
                raise ParseError("vertex and edge counts must be non-negative", lineno)
            header = (a, b)
            continue
        n, m = header
        if len(edges) == m:
            raise ParseError(f"more than the declared {m} edges", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"edge ({a}, {b}) outside 0..{n - 1}", lineno, "OUT_OF_RANGE")
        if a == b:
            raise ParseError(f"self-loop at {a}", lineno, "SELF_LOOP")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ParseError(f"edge ({a}, {b}) repeated", lineno, "DUPLICATE_EDGE")
        seen.add(key)
        edges.append((a, b))
    if header is None:
        raise ParseError("missing 'n m' header", last or None)
    if len(edges) != header[1]:
        raise ParseError(f"declared {header[1]} edges, found {len(edges)}", last or None)
    return Graph(header[0], edges)


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_edge_list(g, comment))


# Overlay edge classes and how they are drawn.
EDGE_STYLE = {
    "converted": 'color="red", penwidth=2',
    "junction": 'color="purple", penwidth=2',
    "attach": 'color="green", penwidth=2',
    "pending": 'color="gray40", style=dashed',
    "graph": 'color="gray85"',
}


def edge_class(rec: EdgeRecord) -> str:
    if rec.kind == "attach":
        return "attach"
    if not rec.sync:
        return "pending"
    if rec.kind == "mapped":
        return "converted"
    return "junction"


def to_dot(g: Graph, le: Iterable[EdgeRecord] = (), sequence: Sequence[int] | None = None,
           name: str = "overlay") -> str:
    """DOT text for g with overlay records drawn on top of the plain edges.

    Records that were mapped and later traversed are red, records the
    reconstruction inserted itself (junctions and the seed) are purple,
    attachment repairs are green and records never traversed are dashed.
    """
    drawn: dict[tuple[int, int], str] = {}
    for rec in le:
        if rec.a == rec.b:
            continue
        key = (min(rec.a, rec.b), max(rec.a, rec.b))
        cls = edge_class(rec)
        # a traversed record wins over a pending duplicate of the same pair
        if key not in drawn or drawn[key] == "pending":
            drawn[key] = cls
    order = {v: i for i, v in enumerate(sequence or [])}
    out = [f"graph {name} {{", "  node [shape=circle];"]
    for v in range(g.n):
        label = f"{v}" if v not in order else f"{v}\\n#{order[v]}"
        out.append(f'  {v} [label="{label}"];')
    for u, v in g.edges():
        cls = drawn.get((min(u, v), max(u, v)), "graph")
        out.append(f"  {u} -- {v} [{EDGE_STYLE[cls]}];")
    out.append("}")
    return "\n".join(out) + "\n"
