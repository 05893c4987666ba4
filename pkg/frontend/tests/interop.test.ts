/** Cross-component check: emitted files must parse under the Python side. */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const GOLDEN = path.join(HERE, "golden");

const PARSE_SNIPPET = `
import sys
from astembed import parse_ast_file
ast = parse_ast_file(open(sys.argv[1]).read())
print(len(ast.nodes))
`;

function pythonAvailable(): boolean {
  try {
    execFileSync("python3", ["-c", "import astembed"], { stdio: "pipe" });
    return true;
  } catch {
    return false;
  }
}

describe("interchange interop", () => {
  it.skipIf(!pythonAvailable())(
    "every golden file parses under the Python package",
    () => {
      const files = fs
        .readdirSync(GOLDEN)
        .filter((f) => f.endsWith(".ast.tsv"));
      expect(files.length).toBeGreaterThan(0);
      for (const file of files) {
        const out = execFileSync(
          "python3",
          ["-c", PARSE_SNIPPET, path.join(GOLDEN, file)],
          { encoding: "utf8" },
        );
        const lineCount = fs
          .readFileSync(path.join(GOLDEN, file), "utf8")
          .trim()
          .split("\n").length;
        expect(Number(out.trim())).toBe(lineCount);
      }
    },
  );
});
