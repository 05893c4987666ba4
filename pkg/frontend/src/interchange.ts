/**
 * Writer for the tab-separated AST interchange format.
 *
 * One node per line, depth-first: `index<TAB>parent<TAB>type`. The root's
 * parent is -1 and every other parent index refers to an earlier line.
 */

export interface AstNodeRecord {
  index: number;
  parent: number;
  typeName: string;
}

function escapeName(name: string): string {
  return name
    .replaceAll("\\", "\\\\")
    .replaceAll("\t", "\\t")
    .replaceAll("\n", "\\n");
}

export function serializeNodes(nodes: readonly AstNodeRecord[]): string {
  if (nodes.length === 0) {
    throw new Error("cannot serialize an empty node list");
  }
  const lines: string[] = [];
  for (const node of nodes) {
    if (node.index !== lines.length) {
      throw new Error(
        `node index ${node.index} out of order at line ${lines.length}`,
      );
    }
    if (node.parent >= node.index || (node.index === 0) !== (node.parent === -1)) {
      throw new Error(`bad parent ${node.parent} for node ${node.index}`);
    }
    lines.push(`${node.index}\t${node.parent}\t${escapeName(node.typeName)}`);
  }
  return lines.join("\n") + "\n";
}
