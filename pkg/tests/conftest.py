import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from astembed.ast_core import Ast, AstNode, NodeTypeTable


TYPE_POOL = [
    "ScriptBlock", "NamedBlock", "Pipeline", "Command", "CommandParameter",
    "CommandExpression", "StringConstantExpression", "VariableExpression",
    "AssignmentStatement", "IfStatement", "ForStatement", "WhileStatement",
    "TryStatement", "CatchClause", "BinaryExpression", "ConstantExpression",
]


def random_ast(
    rng: np.random.Generator,
    max_nodes: int = 30,
    types: NodeTypeTable | None = None,
    script_id: str = "",
    family: str | None = None,
) -> Ast:
    """Random valid tree: each node after the root attaches to an earlier one."""
    if types is None:
        types = NodeTypeTable()
    n = int(rng.integers(1, max_nodes + 1))
    nodes = []
    for i in range(n):
        parent = None if i == 0 else int(rng.integers(0, i))
        name = TYPE_POOL[int(rng.integers(0, len(TYPE_POOL)))]
        nodes.append(AstNode(index=i, parent=parent, type_id=types.intern(name)))
    ast = Ast(nodes=nodes, types=types, script_id=script_id, family=family)
    ast.validate()
    return ast
