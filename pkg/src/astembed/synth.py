"""Synthetic AST corpus generation.

Stand-in for the proprietary script dataset: families get disjoint
node-count bands so the (depth, node_count) scatter is separable when asked
for, and optional "twin" type pairs are woven into every tree in mirrored
motif pairs, so the two twin types occur in exactly interchangeable subtree
contexts with equal frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from astembed.ast_core import Ast, AstNode, NodeTypeTable
from astembed.rng import substream

__all__ = ["SynthSpec", "generate_corpus", "FAMILY_NAMES"]

FAMILY_NAMES = [
    "shellcode-inject", "reverse-shell", "downloader", "keylogger",
    "ransom-locker", "credential-dump", "lateral-move", "persistence",
    "dropper", "beacon",
]

BASE_TYPES = [
    "ScriptBlock", "NamedBlock", "Pipeline", "Command", "CommandParameter",
    "CommandExpression", "StringConstantExpression", "VariableExpression",
    "AssignmentStatement", "BinaryExpression", "ConstantExpression",
    "IfStatement", "WhileStatement", "ForStatement",
]


@dataclass(frozen=True)
class SynthSpec:
    families: int = 8
    scripts_per_family: int = 100
    seed: int = 0
    separable: bool = True
    twin_pairs: tuple[tuple[str, str], ...] = ()
    base_node_count: int = 30
    band_width: int = 12  # node-count spread within one family
    band_gap: int = 20  # band start spacing between families

    def validate(self) -> None:
        if self.families < 1 or self.families > len(FAMILY_NAMES):
            raise ValueError(f"families must be in 1..{len(FAMILY_NAMES)}")
        if self.scripts_per_family < 1:
            raise ValueError("scripts_per_family must be positive")
        if self.base_node_count < 8:
            raise ValueError("base_node_count must be at least 8")
        if self.separable and self.band_width >= self.band_gap:
            raise ValueError("separability needs band_width < band_gap")
        for x, y in self.twin_pairs:
            if x == y or not x or not y:
                raise ValueError(f"bad twin pair ({x!r}, {y!r})")


def _family_band(spec: SynthSpec, fam: int) -> tuple[int, int]:
    if spec.separable:
        lo = spec.base_node_count + fam * spec.band_gap
        return lo, lo + spec.band_width
    return spec.base_node_count, spec.base_node_count + spec.families * spec.band_gap


def _twin_motif_nodes(parent_idx, twin, add):
    """Anchor subtree holding one twin's motifs; the two twins get anchors of
    identical shape, so relabeling one twin as the other maps the anchors'
    subtree multisets onto each other exactly."""
    anchor = add(parent_idx, "CommandExpression")
    # motif: Pipeline -> (twin, Command): the twin as a child
    pipe = add(anchor, "Pipeline")
    add(pipe, twin)
    add(pipe, "Command")
    # motif: twin as a parent of a fixed pair of leaves
    tw = add(anchor, twin)
    add(tw, "CommandParameter")
    add(tw, "StringConstantExpression")


def _generate_tree(
    spec: SynthSpec,
    fam: int,
    script_no: int,
    types: NodeTypeTable,
    rng: np.random.Generator,
) -> Ast:
    lo, hi = _family_band(spec, fam)
    target = int(rng.integers(lo, hi + 1))
    max_depth = 4 + fam % 4

    nodes: list[AstNode] = []
    depths: list[int] = []

    def add(parent: int | None, name: str) -> int:
        idx = len(nodes)
        nodes.append(AstNode(index=idx, parent=parent, type_id=types.intern(name)))
        depths.append(1 if parent is None else depths[parent] + 1)
        return idx

    root = add(None, "ScriptBlock")
    block = add(root, "NamedBlock")

    # mirrored twin motifs keep the subtree multiset symmetric per tree;
    # motif nodes are frozen so random growth never perturbs the mirror
    for x, y in spec.twin_pairs:
        _twin_motif_nodes(block, x, add)
        _twin_motif_nodes(block, y, add)
    frozen = set(range(2, len(nodes)))

    # family type-usage profile: a rotated preference over the base pool
    pool = BASE_TYPES[2:]
    weights = np.ones(len(pool))
    for off in range(4):
        weights[(fam * 3 + off) % len(pool)] += 3.0
    weights /= weights.sum()

    while len(nodes) < target:
        candidates = [
            i for i in range(len(nodes))
            if depths[i] < max_depth and i not in frozen
        ]
        parent = int(candidates[rng.integers(len(candidates))])
        name = pool[int(rng.choice(len(pool), p=weights))]
        add(parent, name)

    ast = Ast(
        nodes=nodes,
        types=types,
        script_id=f"{FAMILY_NAMES[fam]}-{script_no:04d}",
        family=FAMILY_NAMES[fam],
    )
    ast.validate()
    return ast


def generate_corpus(spec: SynthSpec, types: NodeTypeTable | None = None) -> list[Ast]:
    """Deterministic per spec.seed; one tree per (family, script) pair."""
    spec.validate()
    if types is None:
        types = NodeTypeTable()
    out = []
    for fam in range(spec.families):
        rng = substream(spec.seed, "synth", fam)
        for script_no in range(spec.scripts_per_family):
            out.append(_generate_tree(spec, fam, script_no, types, rng))
    return out
