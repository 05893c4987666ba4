"""AST node-type embeddings, family classification, and embedding analysis.

The package ingests abstract syntax trees in a tab-separated interchange
format, learns an embedding vector per AST node type from one-level subtrees
with a contrastive hinge objective, classifies scripts into families with a
class-weighted random forest over two tree statistics, and analyzes the
learned embeddings (nearest neighbors, k-means, dendrograms).
"""

from astembed.ast_core import (
    Ast,
    AstFormatError,
    AstNode,
    NodeTypeTable,
    Subtree,
    TreeFeatures,
    decode_encoded_command,
    extract_subtrees,
    leaf_counts,
    parse_ast_file,
    serialize_ast,
    tree_features,
)
from astembed.embedding import (
    EmbeddingModel,
    SubtreeEmbedding,
    TrainConfig,
    train,
)
from astembed.forest import RandomForestFamilyClassifier
from astembed.analysis import EmbeddingKMeans, agglomerate, pairwise_distances

__version__ = "0.1.0"

__all__ = [
    "Ast",
    "AstFormatError",
    "AstNode",
    "NodeTypeTable",
    "Subtree",
    "TreeFeatures",
    "decode_encoded_command",
    "extract_subtrees",
    "leaf_counts",
    "parse_ast_file",
    "serialize_ast",
    "tree_features",
    "EmbeddingModel",
    "SubtreeEmbedding",
    "TrainConfig",
    "train",
    "RandomForestFamilyClassifier",
    "EmbeddingKMeans",
    "agglomerate",
    "pairwise_distances",
]
