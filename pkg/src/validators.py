"""
Validators Module - Structural Checks for Graphs and Hierarchies
================================================================
Validate data at every stage of the pipeline and fail fast.

Usage:
    from validators import validate_stage, validate_graph, ValidationError

    validate_stage(validate_graph(n, edges, period), 'build_graph')
"""

from dataclasses import dataclass
from typing import Any, List

from ttf import TTF, BoundPair, is_fifo


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass
class ValidationResult:
    """Outcome of one check."""
    passed: bool
    stage: str
    subject: str        # what was checked (edge 12, node 3, ...)
    check: str
    expected: Any
    actual: Any
    message: str


class ValidationError(Exception):
    """Raised when any check of a stage failed."""
    def __init__(self, results: List[ValidationResult]):
        self.results = results
        failed = [r for r in results if not r.passed]
        messages = [f"  - {r.subject}: {r.message}" for r in failed[:20]]
        if len(failed) > 20:
            messages.append(f"  ... and {len(failed) - 20} more")
        super().__init__("Validation failed:\n" + "\n".join(messages))


def _fail(stage: str, subject: str, check: str, expected: Any, actual: Any,
          message: str) -> ValidationResult:
    return ValidationResult(False, stage, subject, check, expected, actual, message)


def _ok(stage: str, check: str) -> ValidationResult:
    return ValidationResult(True, stage, "all", check, "-", "-", "OK")


def validate_stage(results: List[ValidationResult], stage: str) -> List[ValidationResult]:
    """Raise ValidationError if any result failed; otherwise return the results."""
    if any(not r.passed for r in results):
        raise ValidationError(results)
    return results


# =============================================================================
# GRAPH CHECKS
# =============================================================================

def validate_graph(node_count: int, edges, period: float) -> List[ValidationResult]:
    """Node ids in range, no self-loops, FIFO TTFs with the graph period."""
    stage = "graph"
    results = []
    for i, e in enumerate(edges):
        subject = f"edge {i} ({e.tail}->{e.head})"
        if not (0 <= e.tail < node_count and 0 <= e.head < node_count):
            results.append(_fail(stage, subject, "node_id", f"[0, {node_count})",
                                 (e.tail, e.head), "Node id out of range"))
            continue
        if e.tail == e.head:
            results.append(_fail(stage, subject, "self_loop", "tail != head",
                                 e.tail, "Self-loop"))
        if not isinstance(e.ttf, TTF):
            results.append(_fail(stage, subject, "ttf", "TTF", type(e.ttf).__name__,
                                 "Weight is not a travel-time function"))
            continue
        if e.ttf.period != period:
            results.append(_fail(stage, subject, "period", period, e.ttf.period,
                                 f"Period mismatch {e.ttf.period} != {period}"))
        if not is_fifo(e.ttf):
            results.append(_fail(stage, subject, "fifo", "slopes >= -1", "violated",
                                 "TTF violates FIFO"))
    if not results:
        results.append(_ok(stage, "edges"))
    return results


# =============================================================================
# HIERARCHY CHECKS
# =============================================================================

def validate_hierarchy(h) -> List[ValidationResult]:
    """Rank direction of up/down edges, original-edge coverage, middle ranks, weight kinds."""
    stage = "hierarchy"
    results = []
    rank = h.rank
    seen_originals = [0] * h.base.edge_count

    for i in h.up_ids:
        e = h.edges[i]
        if not rank[e.tail] < rank[e.head]:
            results.append(_fail(stage, f"edge {i}", "up_rank", "rank[tail] < rank[head]",
                                 (rank[e.tail], rank[e.head]), "Up-edge does not go up"))
    for i in h.down_ids:
        e = h.edges[i]
        if not rank[e.tail] > rank[e.head]:
            results.append(_fail(stage, f"edge {i}", "down_rank", "rank[tail] > rank[head]",
                                 (rank[e.tail], rank[e.head]), "Down-edge does not go down"))

    for i, e in enumerate(h.edges):
        subject = f"edge {i} ({e.tail}->{e.head})"
        if e.middle is None:
            if e.original is None or not 0 <= e.original < h.base.edge_count:
                results.append(_fail(stage, subject, "original", "base edge id", e.original,
                                     "Original edge without a valid base id"))
                continue
            seen_originals[e.original] += 1
            if isinstance(e.weight, BoundPair) and not e.weight.is_exact:
                results.append(_fail(stage, subject, "weight", "exact TTF", "bounds",
                                     "Original edge stored with bounds"))
        else:
            m = e.middle
            if not (rank[m] < rank[e.tail] and rank[m] < rank[e.head]):
                results.append(_fail(stage, subject, "middle_rank", "below both endpoints",
                                     rank[m], "Middle node ranks too high"))
            if h.mode == "exact" and isinstance(e.weight, BoundPair) and not e.weight.is_exact:
                results.append(_fail(stage, subject, "weight", "exact TTF", "bounds",
                                     "Exact hierarchy stores bounds"))

    for orig, count in enumerate(seen_originals):
        if count != 1:
            results.append(_fail(stage, f"original {orig}", "coverage", 1, count,
                                 "Original edge not stored exactly once"))

    if not results:
        results.append(_ok(stage, "structure"))
    return results
