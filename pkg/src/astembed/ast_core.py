"""AST data model, text interchange format, tree statistics, and subtrees.

Trees are stored as flat node lists in depth-first order; every node names
its parent by index, so the parent index of a node is always strictly
smaller than its own index. The interchange format is one node per line,
``index<TAB>parent<TAB>TypeName``, with ``-1`` marking the root's parent and
optional ``#``-prefixed header lines for metadata.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass

__all__ = [
    "AstFormatError",
    "NodeTypeTable",
    "AstNode",
    "Ast",
    "TreeFeatures",
    "Subtree",
    "parse_ast_file",
    "serialize_ast",
    "tree_features",
    "leaf_counts",
    "extract_subtrees",
    "decode_encoded_command",
]

FORMAT_VERSION = 1
LEAF_FRACTION_TOL = 1e-12


class AstFormatError(ValueError):
    """Malformed interchange content; carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class NodeTypeTable:
    """Dense bidirectional mapping between node-type names and integer ids.

    Ids are assigned in first-seen order and are contiguous in ``[0, T)``.
    One table is typically shared across a whole corpus so that every tree
    speaks the same id space.
    """

    def __init__(self, names: list[str] | None = None):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        for name in names or []:
            self.intern(name)

    def intern(self, name: str) -> int:
        """Return the id for ``name``, registering it if unseen."""
        if not name:
            raise ValueError("node-type name must be non-empty")
        tid = self._ids.get(name)
        if tid is None:
            tid = len(self._names)
            self._names.append(name)
            self._ids[name] = tid
        return tid

    def id_of(self, name: str) -> int:
        return self._ids[name]

    def name_of(self, tid: int) -> str:
        return self._names[tid]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    @property
    def names(self) -> list[str]:
        return list(self._names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NodeTypeTable) and self._names == other._names

    def __repr__(self) -> str:
        return f"NodeTypeTable({self._names!r})"


@dataclass(frozen=True)
class AstNode:
    index: int
    parent: int | None  # None for the root
    type_id: int


@dataclass
class Ast:
    """A single parsed tree: nodes in DFS order plus corpus metadata."""

    nodes: list[AstNode]
    types: NodeTypeTable
    script_id: str = ""
    family: str | None = None

    def validate(self) -> None:
        if not self.nodes:
            raise ValueError("tree has no nodes")
        for pos, node in enumerate(self.nodes):
            if node.index != pos:
                raise ValueError(f"node index {node.index} at position {pos}")
            if pos == 0:
                if node.parent is not None:
                    raise ValueError("first node must be the root")
            else:
                if node.parent is None:
                    raise ValueError(f"multiple roots: node {pos} has no parent")
                if not 0 <= node.parent < pos:
                    raise ValueError(f"non-DFS parent {node.parent} at node {pos}")

    def children(self) -> list[list[int]]:
        """Child index lists per node, in DFS (ascending index) order."""
        out: list[list[int]] = [[] for _ in self.nodes]
        for node in self.nodes[1:]:
            out[node.parent].append(node.index)
        return out

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class TreeFeatures:
    """The two per-script classifier features."""

    depth: int  # nodes on the longest root-to-leaf path; singleton tree = 1
    node_count: int


@dataclass(frozen=True)
class Subtree:
    """A non-leaf node with its immediate children, the training example.

    ``children`` pairs each child's type id with its leaf fraction: the share
    of the parent's leaf descendants contributed by that child. Fractions are
    positive and sum to 1.
    """

    parent_type: int
    children: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("subtree needs at least one child")
        total = 0.0
        for _, frac in self.children:
            if not 0.0 < frac <= 1.0:
                raise ValueError(f"leaf fraction {frac} outside (0, 1]")
            total += frac
        if abs(total - 1.0) > LEAF_FRACTION_TOL:
            raise ValueError(f"leaf fractions sum to {total}, expected 1")

    @property
    def n_children(self) -> int:
        return len(self.children)

    def child_types(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.children)

    def fractions(self) -> tuple[float, ...]:
        return tuple(f for _, f in self.children)


def _unescape(name: str, line: int) -> str:
    if "\\" not in name:
        return name
    out = []
    i = 0
    while i < len(name):
        ch = name[i]
        if ch == "\\":
            if i + 1 >= len(name):
                raise AstFormatError("dangling escape in type name", line)
            nxt = name[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                raise AstFormatError(f"unknown escape '\\{nxt}' in type name", line)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _escape(name: str) -> str:
    return name.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def parse_ast_file(content: str, types: NodeTypeTable | None = None) -> Ast:
    """Parse interchange text into a validated :class:`Ast`.

    ``types`` lets a caller share one type table across a corpus; a fresh
    table is created otherwise. Raises :class:`AstFormatError` with the
    offending line number on malformed input.
    """
    if types is None:
        types = NodeTypeTable()
    nodes: list[AstNode] = []
    script_id = ""
    family: str | None = None
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(None, 1)
            if len(parts) == 2:
                key, value = parts
                if key == "script_id":
                    script_id = value
                elif key == "family":
                    family = value
                elif key == "version" and value != str(FORMAT_VERSION):
                    raise AstFormatError(f"unsupported version {value!r}", lineno)
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise AstFormatError(
                f"expected 3 tab-separated fields, got {len(fields)}", lineno
            )
        try:
            index = int(fields[0])
            parent = int(fields[1])
        except ValueError:
            raise AstFormatError(f"non-integer index/parent {line!r}", lineno) from None
        if index != len(nodes):
            raise AstFormatError(f"out-of-order node index {index}", lineno)
        name = _unescape(fields[2], lineno)
        if not name:
            raise AstFormatError("empty type name", lineno)
        if index == 0:
            if parent != -1:
                raise AstFormatError("root must have parent -1", lineno)
            parent_field: int | None = None
        else:
            if parent == -1:
                raise AstFormatError("multiple roots", lineno)
            if not 0 <= parent < index:
                raise AstFormatError(f"non-DFS parent {parent}", lineno)
            parent_field = parent
        nodes.append(AstNode(index=index, parent=parent_field, type_id=types.intern(name)))
    if not nodes:
        raise AstFormatError("empty file", None)
    ast = Ast(nodes=nodes, types=types, script_id=script_id, family=family)
    ast.validate()
    return ast


def serialize_ast(ast: Ast) -> str:
    """Emit interchange text; ``parse_ast_file`` reproduces the tree exactly."""
    lines = []
    if ast.script_id:
        lines.append(f"# script_id {ast.script_id}")
    if ast.family is not None:
        lines.append(f"# family {ast.family}")
    for node in ast.nodes:
        parent = -1 if node.parent is None else node.parent
        lines.append(f"{node.index}\t{parent}\t{_escape(ast.types.name_of(node.type_id))}")
    return "\n".join(lines) + "\n"


def tree_features(ast: Ast) -> TreeFeatures:
    """Depth (node count on the longest root-to-leaf path) and node count."""
    depths = [0] * len(ast.nodes)
    depths[0] = 1
    for node in ast.nodes[1:]:
        depths[node.index] = depths[node.parent] + 1
    return TreeFeatures(depth=max(depths), node_count=len(ast.nodes))


def leaf_counts(ast: Ast) -> list[int]:
    """Number of leaf descendants per node (a leaf counts itself: 1)."""
    counts = [0] * len(ast.nodes)
    has_child = [False] * len(ast.nodes)
    for node in ast.nodes[1:]:
        has_child[node.parent] = True
    for node in reversed(ast.nodes):
        if not has_child[node.index]:
            counts[node.index] = 1
        if node.parent is not None:
            counts[node.parent] += counts[node.index]
    return counts


def extract_subtrees(ast: Ast) -> list[Subtree]:
    """One :class:`Subtree` per internal node, children in DFS index order.

    Each child's leaf fraction is its leaf count over the parent's; the
    fractions of one subtree sum to 1 exactly up to rounding.
    """
    counts = leaf_counts(ast)
    children = ast.children()
    out: list[Subtree] = []
    for node in ast.nodes:
        kids = children[node.index]
        if not kids:
            continue
        parent_leaves = counts[node.index]
        pairs = tuple(
            (ast.nodes[k].type_id, counts[k] / parent_leaves) for k in kids
        )
        out.append(Subtree(parent_type=node.type_id, children=pairs))
    return out


def decode_encoded_command(encoded: str) -> str:
    """Decode Base-64 text into UTF-16LE script text (`-EncodedCommand` form)."""
    stripped = "".join(encoded.split())
    try:
        raw = base64.b64decode(stripped, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise ValueError(f"invalid Base-64 input: {exc}") from None
    if len(raw) % 2 != 0:
        raise ValueError(f"decoded byte length {len(raw)} is odd, not UTF-16")
    try:
        return raw.decode("utf-16-le")
    except UnicodeDecodeError as exc:
        raise ValueError(f"invalid UTF-16LE payload: {exc}") from None
