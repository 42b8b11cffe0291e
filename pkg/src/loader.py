"""
File Formats Module
===================
Line-oriented text formats for graphs, hierarchies, queries and query
results. Numbers are written with repr(float) so that parse(serialize(x))
is the identity. Blank lines and lines starting with '#' are ignored.

Graph file:
    tdg 1
    <nodes> <edges> <period>
    <tail> <head> <k> <t1> <w1> ... <tk> <wk>          (one line per edge)

Hierarchy file:
    tch 1 <mode> <epsilon>
    <nodes> <edges> <period>
    <order: node ids by increasing rank>
    <U|D> <tail> <head> <middle|-1> <original|-1> <v> [<begin> <end>]*v <E|B> <ttf> [<ttf>]

    where <ttf> is "<k> <t1> <w1> ... <tk> <wk>"; kind E carries one exact
    TTF, kind B a lower and an upper bound.

Query file:   <s> <t> <tau>
Result file:  <s> <t> <tau> <arrival> <travel_time> <settled>
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Tuple

from tdgraph import (MODE_APPROX, MODE_EXACT, Hierarchy, HierarchyEdge, TDGraph,
                     base_graph_from_edges, build_graph)
from ttf import TTF, BoundPair, TimeInterval
from utils import safe_write_text
from validators import ValidationError

logger = logging.getLogger(__name__)

GRAPH_HEADER = ("tdg", "1")
HIERARCHY_HEADER = ("tch", "1")


class ParseError(ValueError):
    """Malformed input file; carries the path and the 1-based line number."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


@dataclass(frozen=True)
class Query:
    source: int
    target: int
    departure: float


def _num(x: float) -> str:
    return repr(float(x))


# =============================================================================
# TOKENIZING
# =============================================================================

class _Lines:
    """Non-empty, non-comment lines of a file as (line number, tokens)."""

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.exists():
            raise FileNotFoundError(f"File not found: {self.path}")
        text = self.path.read_text(encoding="utf-8")
        self._rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())
                      if line.strip() and not line.lstrip().startswith("#")]
        self._pos = 0
        self.line = 0

    def __iter__(self) -> Iterator[Tuple[int, List[str]]]:
        while self._pos < len(self._rows):
            yield self.next()

    def next(self) -> Tuple[int, List[str]]:
        if self._pos >= len(self._rows):
            raise ParseError(self.path, self.line + 1, "unexpected end of file")
        self.line, tokens = self._rows[self._pos]
        self._pos += 1
        return self.line, tokens

    def error(self, message: str) -> ParseError:
        return ParseError(self.path, self.line, message)

    def ints(self, tokens: Sequence[str]) -> List[int]:
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise self.error(f"expected integers, got {' '.join(tokens)}") from None

    def floats(self, tokens: Sequence[str]) -> List[float]:
        try:
            return [float(t) for t in tokens]
        except ValueError:
            raise self.error(f"expected numbers, got {' '.join(tokens)}") from None

    def ttf(self, tokens: Sequence[str], pos: int, period: float) -> Tuple[TTF, int]:
        """Parse '<k> t1 w1 ... tk wk' starting at tokens[pos]."""
        if pos >= len(tokens):
            raise self.error("missing TTF point count")
        (k,) = self.ints(tokens[pos:pos + 1])
        if k < 1:
            raise self.error(f"TTF needs at least one point, got {k}")
        values = self.floats(tokens[pos + 1:pos + 1 + 2 * k])
        if len(values) != 2 * k:
            raise self.error(f"TTF declares {k} points but has {len(values) // 2}")
        try:
            f = TTF(values[0::2], values[1::2], period)
        except ValueError as e:
            raise self.error(f"invalid TTF: {e}") from None
        return f, pos + 1 + 2 * k


def _header(lines: _Lines, expected: Tuple[str, str]) -> List[str]:
    _, tokens = lines.next()
    if tuple(tokens[:2]) != expected:
        raise lines.error(f"expected header '{' '.join(expected)}', got '{' '.join(tokens)}'")
    return tokens


def _sizes(lines: _Lines) -> Tuple[int, int, float]:
    _, tokens = lines.next()
    if len(tokens) != 3:
        raise lines.error("expected '<nodes> <edges> <period>'")
    n, m = lines.ints(tokens[:2])
    (period,) = lines.floats(tokens[2:])
    if n < 0 or m < 0 or not period > 0:
        raise lines.error(f"invalid sizes: {n} nodes, {m} edges, period {period}")
    return n, m, period


def _ttf_tokens(f: TTF) -> List[str]:
    out = [str(len(f))]
    for t, w in zip(f.times.tolist(), f.values.tolist()):
        out.append(_num(t))
        out.append(_num(w))
    return out


# =============================================================================
# GRAPHS
# =============================================================================

def format_graph(graph: TDGraph) -> str:
    rows = [" ".join(GRAPH_HEADER),
            f"{graph.node_count} {graph.edge_count} {_num(graph.period)}"]
    for e in graph.edges:
        rows.append(" ".join([str(e.tail), str(e.head)] + _ttf_tokens(e.ttf)))
    return "\n".join(rows) + "\n"


def write_graph(graph: TDGraph, path) -> Path:
    path = Path(path)
    safe_write_text(format_graph(graph), path)
    logger.info("Wrote graph %r to %s", graph, path)
    return path


def read_graph(path) -> TDGraph:
    lines = _Lines(path)
    _header(lines, GRAPH_HEADER)
    n, m, period = _sizes(lines)
    edges = []
    for _ in range(m):
        _, tokens = lines.next()
        if len(tokens) < 3:
            raise lines.error("expected '<tail> <head> <k> ...'")
        u, v = lines.ints(tokens[:2])
        f, end = lines.ttf(tokens, 2, period)
        if end != len(tokens):
            raise lines.error("trailing tokens after edge TTF")
        edges.append((u, v, f))
    for line, _ in lines:
        raise ParseError(lines.path, line, f"more than the declared {m} edges")
    try:
        graph = build_graph(n, edges, period)
    except ValidationError as e:
        raise ParseError(lines.path, 2, str(e)) from None
    logger.info("Read %r from %s", graph, lines.path)
    return graph


# =============================================================================
# HIERARCHIES
# =============================================================================

def format_hierarchy(h: Hierarchy) -> str:
    rows = [" ".join(HIERARCHY_HEADER + (h.mode, _num(h.epsilon))),
            f"{h.node_count} {len(h.edges)} {_num(h.period)}",
            " ".join(str(v) for v in h.order)]
    for i, e in enumerate(h.edges):
        tokens = ["U" if h.is_up(i) else "D", str(e.tail), str(e.head),
                  str(-1 if e.middle is None else e.middle),
                  str(-1 if e.original is None else e.original)]
        validity = e.validity or ()
        tokens.append(str(len(validity)))
        for iv in validity:
            tokens += [_num(iv.begin), _num(iv.end)]
        if isinstance(e.weight, BoundPair):
            tokens += ["B"] + _ttf_tokens(e.weight.lower) + _ttf_tokens(e.weight.upper)
        else:
            tokens += ["E"] + _ttf_tokens(e.weight)
        rows.append(" ".join(tokens))
    return "\n".join(rows) + "\n"


def write_hierarchy(h: Hierarchy, path) -> Path:
    path = Path(path)
    safe_write_text(format_hierarchy(h), path)
    logger.info("Wrote %r to %s", h, path)
    return path


def _hierarchy_edge(lines: _Lines, tokens: List[str], period: float) -> Tuple[str, HierarchyEdge]:
    if len(tokens) < 7 or tokens[0] not in ("U", "D"):
        raise lines.error("expected '<U|D> <tail> <head> <middle> <original> <v> ...'")
    tail, head, middle, original, nvalid = lines.ints(tokens[1:6])
    pos = 6
    bounds = lines.floats(tokens[pos:pos + 2 * nvalid])
    if nvalid < 0 or len(bounds) != 2 * nvalid:
        raise lines.error(f"validity declares {nvalid} intervals")
    try:
        validity = tuple(TimeInterval(b, e) for b, e in zip(bounds[0::2], bounds[1::2]))
    except ValueError as err:
        raise lines.error(str(err)) from None
    pos += 2 * nvalid
    if pos >= len(tokens) or tokens[pos] not in ("E", "B"):
        raise lines.error("expected weight kind E or B")
    kind = tokens[pos]
    lower, pos = lines.ttf(tokens, pos + 1, period)
    weight = lower
    if kind == "B":
        upper, pos = lines.ttf(tokens, pos, period)
        weight = BoundPair(lower, upper)
    if pos != len(tokens):
        raise lines.error("trailing tokens after edge weight")
    edge = HierarchyEdge(tail, head, weight,
                         middle=None if middle < 0 else middle,
                         original=None if original < 0 else original,
                         validity=validity or None)
    return tokens[0], edge


def read_hierarchy(path) -> Hierarchy:
    lines = _Lines(path)
    header = _header(lines, HIERARCHY_HEADER)
    if len(header) != 4 or header[2] not in (MODE_EXACT, MODE_APPROX):
        raise lines.error("expected 'tch 1 <exact|approx> <epsilon>'")
    mode = header[2]
    (epsilon,) = lines.floats(header[3:])
    n, m, period = _sizes(lines)
    order = lines.ints(lines.next()[1]) if n else []
    if sorted(order) != list(range(n)):
        raise lines.error(f"node order is not a permutation of 0..{n - 1}")
    rank = {v: r for r, v in enumerate(order)}

    edges = []
    for _ in range(m):
        _, tokens = lines.next()
        direction, edge = _hierarchy_edge(lines, tokens, period)
        ends = (edge.tail, edge.head) + (() if edge.middle is None else (edge.middle,))
        if not all(0 <= v < n for v in ends):
            raise lines.error(f"edge endpoint out of range [0, {n})")
        if (direction == "U") != (rank[edge.tail] < rank[edge.head]):
            raise lines.error(f"direction flag {direction} contradicts the node order")
        edges.append(edge)
    for line, _ in lines:
        raise ParseError(lines.path, line, f"more than the declared {m} edges")

    try:
        base = base_graph_from_edges(n, edges, period)
        h = Hierarchy(base, order, edges, mode=mode, epsilon=epsilon)
    except (ValidationError, ValueError) as e:
        raise ParseError(lines.path, 1, str(e)) from None
    logger.info("Read %r from %s", h, lines.path)
    return h


# =============================================================================
# QUERIES AND RESULTS
# =============================================================================

def format_queries(queries: Sequence[Query]) -> str:
    return "".join(f"{q.source} {q.target} {_num(q.departure)}\n" for q in queries)


def write_queries(queries: Sequence[Query], path) -> Path:
    path = Path(path)
    safe_write_text(format_queries(queries), path)
    logger.info("Wrote %d queries to %s", len(queries), path)
    return path


def read_queries(path, node_count: int = None) -> List[Query]:
    lines = _Lines(path)
    queries = []
    for _, tokens in lines:
        if len(tokens) != 3:
            raise lines.error("expected '<s> <t> <tau>'")
        s, t = lines.ints(tokens[:2])
        (tau,) = lines.floats(tokens[2:])
        if node_count is not None and not (0 <= s < node_count and 0 <= t < node_count):
            raise lines.error(f"query node out of range [0, {node_count})")
        queries.append(Query(s, t, tau))
    return queries


def format_results(results) -> str:
    """results: QueryResult-like objects (source, target, departure, arrival, settled)."""
    rows = []
    for r in results:
        rows.append(f"{r.source} {r.target} {_num(r.departure)} {_num(r.arrival)} "
                    f"{_num(r.arrival - r.departure)} {r.settled}\n")
    return "".join(rows)


def write_results(results, path) -> Path:
    path = Path(path)
    safe_write_text(format_results(results), path)
    logger.info("Wrote %d results to %s", len(results), path)
    return path
