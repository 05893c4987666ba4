/**
 * Static AST extraction into the interchange format.
 *
 * Scripts are parsed with the TypeScript compiler and walked depth-first
 * with forEachChild; each node becomes one line carrying its SyntaxKind
 * name and the index of its parent. Nothing is ever executed.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import ts from "typescript";

import { decodeEncodedCommand } from "./decode.js";
import { AstNodeRecord, serializeNodes } from "./interchange.js";

// SyntaxKind's reverse mapping favors range aliases (FirstStatement,
// FirstLiteralToken, ...); prefer a real kind name when one exists.
const KIND_NAMES: Map<number, string> = (() => {
  const names = new Map<number, string>();
  for (const [name, value] of Object.entries(ts.SyntaxKind)) {
    if (typeof value !== "number") {
      continue;
    }
    const existing = names.get(value);
    const isAlias = /^(First|Last)[A-Z]/.test(name);
    if (existing === undefined || (/^(First|Last)[A-Z]/.test(existing) && !isAlias)) {
      names.set(value, name);
    }
  }
  return names;
})();

export function kindName(kind: ts.SyntaxKind): string {
  return KIND_NAMES.get(kind) ?? ts.SyntaxKind[kind];
}

export interface ExtractionRecord {
  sourcePath: string;
  outputPath: string | null;
  nodeCount: number;
  status: "ok" | "parse-error" | "decode-error";
  message?: string;
}

export function collectNodes(source: string, fileName: string): AstNodeRecord[] {
  const sf = ts.createSourceFile(
    fileName,
    source,
    ts.ScriptTarget.Latest,
    /* setParentNodes */ false,
  );
  const diagnostics = (sf as unknown as { parseDiagnostics: ts.Diagnostic[] })
    .parseDiagnostics;
  if (diagnostics.length > 0) {
    const first = diagnostics[0];
    const text = ts.flattenDiagnosticMessageText(first.messageText, "; ");
    throw new Error(`parse error in ${fileName}: ${text}`);
  }
  const records: AstNodeRecord[] = [];
  const visit = (node: ts.Node, parent: number): void => {
    const index = records.length;
    records.push({ index, parent, typeName: kindName(node.kind) });
    ts.forEachChild(node, (child) => visit(child, index));
  };
  visit(sf, -1);
  return records;
}

export interface ExtractOptions {
  encoded?: boolean;
}

export function extract(
  inputPath: string,
  outDir: string,
  options: ExtractOptions = {},
): ExtractionRecord {
  const raw = fs.readFileSync(inputPath, "utf8");
  let source = raw;
  if (options.encoded) {
    try {
      source = decodeEncodedCommand(raw);
    } catch (err) {
      return {
        sourcePath: inputPath,
        outputPath: null,
        nodeCount: 0,
        status: "decode-error",
        message: (err as Error).message,
      };
    }
  }
  let records: AstNodeRecord[];
  try {
    records = collectNodes(source, path.basename(inputPath));
  } catch (err) {
    return {
      sourcePath: inputPath,
      outputPath: null,
      nodeCount: 0,
      status: "parse-error",
      message: (err as Error).message,
    };
  }
  const stem = path.basename(inputPath).replace(/\.[^.]+$/, "");
  const outputPath = path.join(outDir, `${stem}.ast.tsv`);
  fs.mkdirSync(outDir, { recursive: true });
  fs.writeFileSync(outputPath, serializeNodes(records));
  return {
    sourcePath: inputPath,
    outputPath,
    nodeCount: records.length,
    status: "ok",
  };
}

export async function extractBatch(
  inputDir: string,
  outDir: string,
  parallelism = 1,
): Promise<ExtractionRecord[]> {
  if (parallelism < 1) {
    throw new Error("parallelism must be at least 1");
  }
  const files = fs
    .readdirSync(inputDir)
    .filter((f) => f.endsWith(".ts"))
    .sort()
    .map((f) => path.join(inputDir, f));
  const records: ExtractionRecord[] = new Array(files.length);
  let next = 0;
  const worker = async (): Promise<void> => {
    while (next < files.length) {
      const i = next;
      next += 1;
      records[i] = extract(files[i], outDir);
      await Promise.resolve();
    }
  };
  await Promise.all(
    Array.from({ length: Math.min(parallelism, files.length || 1) }, worker),
  );
  return records;
}
