"""Serialization of models, forests, subtree corpora, traces, and manifests.

Everything is JSON or CSV/TSV text. Floats go through Python's shortest
round-trip repr, so save -> load reproduces every parameter bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from astembed.ast_core import NodeTypeTable, Subtree
from astembed.embedding import EmbeddingModel
from astembed.forest import DecisionTree, RandomForest, _TreeNode

__all__ = [
    "save_model",
    "load_model",
    "save_loss_trace",
    "load_loss_trace",
    "save_subtree_corpus",
    "load_subtree_corpus",
    "save_forest",
    "load_forest",
    "write_manifest",
]


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    doc = {
        "format": "astembed-model",
        "version": 1,
        "n_f": model.n_f,
        "types": model.type_table.names,
        "V": model.V.tolist(),
        "W_l": model.W_l.tolist(),
        "W_r": model.W_r.tolist(),
        "b": model.b.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_model(path: str | Path) -> EmbeddingModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "astembed-model":
        raise ValueError(f"{path} is not a model file")
    model = EmbeddingModel(
        V=np.array(doc["V"], dtype=np.float64),
        W_l=np.array(doc["W_l"], dtype=np.float64),
        W_r=np.array(doc["W_r"], dtype=np.float64),
        b=np.array(doc["b"], dtype=np.float64),
        type_table=NodeTypeTable(doc["types"]),
    )
    model.validate()
    return model


def save_loss_trace(trace: list[float], path: str | Path) -> None:
    lines = ["epoch,mean_loss"]
    for epoch, loss in enumerate(trace, start=1):
        lines.append(f"{epoch},{loss!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_loss_trace(path: str | Path) -> list[float]:
    lines = Path(path).read_text().splitlines()
    return [float(line.split(",")[1]) for line in lines[1:] if line]


def save_subtree_corpus(
    subtrees: list[Subtree], types: NodeTypeTable, path: str | Path
) -> None:
    doc = {
        "format": "astembed-subtrees",
        "version": 1,
        "types": types.names,
        "subtrees": [
            [st.parent_type, [[t, f] for t, f in st.children]] for st in subtrees
        ],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_subtree_corpus(path: str | Path) -> tuple[list[Subtree], NodeTypeTable]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "astembed-subtrees":
        raise ValueError(f"{path} is not a subtree corpus file")
    types = NodeTypeTable(doc["types"])
    subtrees = [
        Subtree(parent_type=p, children=tuple((t, f) for t, f in kids))
        for p, kids in doc["subtrees"]
    ]
    return subtrees, types


def _node_to_doc(node: _TreeNode) -> dict:
    doc: dict = {"prediction": node.prediction}
    if node.feature >= 0:
        doc["feature"] = node.feature
        doc["threshold"] = node.threshold
        doc["left"] = _node_to_doc(node.left)
        doc["right"] = _node_to_doc(node.right)
    return doc


def _node_from_doc(doc: dict) -> _TreeNode:
    node = _TreeNode(prediction=doc["prediction"])
    if "feature" in doc:
        node.feature = doc["feature"]
        node.threshold = doc["threshold"]
        node.left = _node_from_doc(doc["left"])
        node.right = _node_from_doc(doc["right"])
    return node


def save_forest(forest: RandomForest, path: str | Path) -> None:
    doc = {
        "format": "astembed-forest",
        "version": 1,
        "n_classes": forest.n_classes,
        "labels": forest.labels,
        "trees": [_node_to_doc(t.root) for t in forest.trees],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_forest(path: str | Path) -> RandomForest:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "astembed-forest":
        raise ValueError(f"{path} is not a forest file")
    trees = [
        DecisionTree(root=_node_from_doc(t), n_classes=doc["n_classes"])
        for t in doc["trees"]
    ]
    return RandomForest(trees=trees, n_classes=doc["n_classes"], labels=doc["labels"])


def write_manifest(command: str, config: dict, path: str | Path) -> None:
    """Reproducibility record next to every command's outputs."""
    from astembed import __version__

    canonical = json.dumps(config, sort_keys=True)
    doc = {
        "command": command,
        "config": config,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "astembed_version": __version__,
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
