# tree_core.py
"""
Canonical shapes of unlabeled binary rooted trees.

A TreeShape is either the single leaf or an internal node with two children stored in
canonical order: the first child never sorts below the second one. The order used is the
structural order of compare_shapes, which coincides with CP rank order, so building a
shape never needs the (possibly enormous) rank integers.

Newick text is accepted with labels, quoted labels and branch lengths; all of it is
discarded, only the shape survives.
"""

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, Iterator, List, Optional, Tuple

logger = logging.getLogger(__name__)


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


class TreeShape:
    """Immutable canonical shape. Build with leaf() and node(), never directly."""

    __slots__ = ("first", "second", "leaves", "height", "symmetric_nodes", "_hash",
                 "_rank", "_approx_rank", "_history_product")

    def __init__(self, first: Optional["TreeShape"], second: Optional["TreeShape"], symmetric_nodes: int = 0):
        put = object.__setattr__
        put(self, "first", first)
        put(self, "second", second)
        if first is None:
            put(self, "leaves", 1)
            put(self, "height", 0)
            put(self, "_hash", hash(("leaf",)))
        else:
            put(self, "leaves", first.leaves + second.leaves)
            put(self, "height", max(first.height, second.height) + 1)
            put(self, "_hash", hash((first._hash, second._hash)))
        put(self, "symmetric_nodes", symmetric_nodes)
        # Caches filled lazily by cp_rank / enumeration
        put(self, "_rank", 1 if first is None else None)
        put(self, "_approx_rank", None)
        put(self, "_history_product", 1 if first is None else None)

    @property
    def is_leaf(self) -> bool:
        return self.first is None

    @property
    def children(self) -> Tuple["TreeShape", ...]:
        if self.first is None:
            return ()
        return (self.first, self.second)

    def __setattr__(self, name, value):
        # Public structure is frozen once set; only the private caches may change
        if not name.startswith("_") and hasattr(self, name):
            raise AttributeError(f"TreeShape is immutable (tried to set {name!r})")
        object.__setattr__(self, name, value)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeShape):
            return NotImplemented
        if self is other:
            return True
        if self._hash != other._hash or self.leaves != other.leaves:
            return False
        return compare_shapes(self, other) == Ordering.EQ

    def __lt__(self, other: "TreeShape") -> bool:
        return compare_shapes(self, other) == Ordering.LT

    def __le__(self, other: "TreeShape") -> bool:
        return compare_shapes(self, other) != Ordering.GT

    def __gt__(self, other: "TreeShape") -> bool:
        return compare_shapes(self, other) == Ordering.GT

    def __ge__(self, other: "TreeShape") -> bool:
        return compare_shapes(self, other) != Ordering.LT

    def __repr__(self) -> str:
        if self.leaves <= 32:
            return f"TreeShape({to_newick(self)!r})"
        return f"TreeShape(leaves={self.leaves}, height={self.height})"


_LEAF = TreeShape(None, None)


@dataclass(frozen=True)
class ShapeMetrics:
    leaves: int
    height: int
    symmetric_nodes: int
    # r -> number of internal nodes with r descendant leaves
    subtree_leaf_counts: Dict[int, int] = field(default_factory=dict)


class NewickSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"Newick syntax error at position {position}: {message}")
        self.position = position


class NonBinaryNodeError(ValueError):
    def __init__(self, arity: int, position: int):
        super().__init__(f"Non-binary node at position {position}: {arity} children (expected 0 or 2)")
        self.arity = arity
        self.position = position


def leaf() -> TreeShape:
    return _LEAF


def compare_shapes(a: TreeShape, b: TreeShape) -> Ordering:
    """
    Order two shapes as their CP ranks would be ordered, without computing ranks.

    Leaf sorts below every internal node; internal nodes compare first children, then
    second children. A taller shape always has the larger rank, so differing heights
    settle the comparison immediately.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x.height != y.height:
            return Ordering.GT if x.height > y.height else Ordering.LT
        if x.first is None:
            continue  # both leaves
        stack.append((x.second, y.second))
        stack.append((x.first, y.first))
    return Ordering.EQ


def node(a: TreeShape, b: TreeShape) -> TreeShape:
    order = compare_shapes(a, b)
    if order == Ordering.LT:
        a, b = b, a
    symmetric = a.symmetric_nodes + b.symmetric_nodes + (1 if order == Ordering.EQ else 0)
    return TreeShape(a, b, symmetric)


def iter_nodes(t: TreeShape) -> Iterator[TreeShape]:
    """Preorder walk, first child before second. Shared subtrees are visited once per occurrence."""
    stack = [t]
    while stack:
        current = stack.pop()
        yield current
        if current.first is not None:
            stack.append(current.second)
            stack.append(current.first)


def postorder_missing(t: TreeShape, slot: str) -> List[TreeShape]:
    """
    Internal nodes under t whose cache `slot` is still empty, children before parents.

    Leaves are never returned. Subtrees whose cache is already filled are not descended
    into, so repeated calls on shapes that share structure stay cheap.
    """
    order: List[TreeShape] = []
    seen = set()
    stack = [(t, False)]
    while stack:
        current, expanded = stack.pop()
        if current.first is None or getattr(current, slot) is not None or id(current) in seen:
            continue
        if expanded:
            seen.add(id(current))
            order.append(current)
            continue
        stack.append((current, True))
        stack.append((current.second, False))
        stack.append((current.first, False))
    return order


def metrics(t: TreeShape) -> ShapeMetrics:
    counts: Counter = Counter()
    leaves = 0
    symmetric = 0
    # (node, depth) walk, so height comes out of the same pass
    height = 0
    stack = [(t, 0)]
    while stack:
        current, depth = stack.pop()
        if current.first is None:
            leaves += 1
            height = max(height, depth)
            continue
        counts[current.leaves] += 1
        if compare_shapes(current.first, current.second) == Ordering.EQ:
            symmetric += 1
        stack.append((current.second, depth + 1))
        stack.append((current.first, depth + 1))
    return ShapeMetrics(leaves=leaves, height=height, symmetric_nodes=symmetric,
                        subtree_leaf_counts=dict(sorted(counts.items())))


def validate_canonical(t: TreeShape) -> bool:
    """Full traversal check that every internal node keeps its larger child first."""
    for current in iter_nodes(t):
        if current.first is not None and compare_shapes(current.first, current.second) == Ordering.LT:
            return False
    return True


def is_caterpillar(t: TreeShape) -> bool:
    return t.height == t.leaves - 1


def labeling_count(t: TreeShape) -> int:
    """Number of leaf-labeled cladograms with shape t: n!/2^s(t)."""
    return math.factorial(t.leaves) >> t.symmetric_nodes


def caterpillar(n: int) -> TreeShape:
    if n < 1:
        raise ValueError(f"caterpillar needs n >= 1, got {n}")
    t = _LEAF
    for _ in range(n - 1):
        t = node(t, _LEAF)
    return t


def pseudocaterpillar(n: int) -> TreeShape:
    if n < 4:
        raise ValueError(f"pseudocaterpillar needs n >= 4, got {n}")
    cherry = node(_LEAF, _LEAF)
    t = node(cherry, cherry)
    for _ in range(n - 4):
        t = node(t, _LEAF)
    return t


def balanced(k: int) -> TreeShape:
    """Complete binary shape with 2**k leaves."""
    if k < 0:
        raise ValueError(f"balanced needs k >= 0, got {k}")
    t = _LEAF
    for _ in range(k):
        t = node(t, t)
    return t


# --- Newick ---

_LABEL_STOP = set("(),:;") | set(" \t\r\n\f\v")
_LENGTH_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _NewickReader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_label(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            return
        if self.text[self.pos] == "'":
            start = self.pos
            self.pos += 1
            while True:
                if self.pos >= len(self.text):
                    raise NewickSyntaxError("unterminated quoted label", start)
                if self.text[self.pos] == "'":
                    if self.text[self.pos + 1:self.pos + 2] == "'":
                        self.pos += 2  # escaped quote
                        continue
                    self.pos += 1
                    return
                self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos] not in _LABEL_STOP:
            self.pos += 1

    def read_length(self):
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip_ws()
        match = _LENGTH_RE.match(self.text, self.pos)
        if match is None:
            raise NewickSyntaxError("expected a number after ':'", self.pos)
        self.pos = match.end()

    def read_annotations(self):
        self.read_label()
        self.read_length()


def parse_newick(s: str) -> TreeShape:
    reader = _NewickReader(s)
    # Each open frame: (position of '(', children parsed so far)
    frames: List[Tuple[int, List[TreeShape]]] = []
    result: Optional[TreeShape] = None

    while result is None:
        c = reader.peek()
        if c == "(":
            frames.append((reader.pos, []))
            reader.pos += 1
            continue
        # A leaf: optional label and length, possibly both empty
        reader.read_annotations()
        value = _LEAF

        while True:
            if not frames:
                result = value
                break
            start, kids = frames[-1]
            kids.append(value)
            c = reader.peek()
            if c == ",":
                reader.pos += 1
                break
            if c == ")":
                reader.pos += 1
                frames.pop()
                if len(kids) != 2:
                    raise NonBinaryNodeError(len(kids), start)
                value = node(kids[0], kids[1])
                reader.read_annotations()
                continue
            if c == "":
                raise NewickSyntaxError("unexpected end of input, expected ',' or ')'", reader.pos)
            raise NewickSyntaxError(f"unexpected {c!r}, expected ',' or ')'", reader.pos)

    c = reader.peek()
    if c != ";":
        if c == "":
            raise NewickSyntaxError("missing terminating ';'", reader.pos)
        raise NewickSyntaxError(f"unexpected {c!r}, expected ';'", reader.pos)
    reader.pos += 1
    if reader.peek() != "":
        raise NewickSyntaxError("trailing characters after ';'", reader.pos)
    logger.debug(f"Parsed Newick tree with {result.leaves} leaves")
    return result


def to_newick(t: TreeShape) -> str:
    out: List[str] = []
    stack: List[object] = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if item.first is None:
            continue
        out.append("(")
        stack.extend((")", item.second, ",", item.first))
    out.append(";")
    return "".join(out)
