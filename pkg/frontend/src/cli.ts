/** Command line entry point: `extract` one script or `batch` over a dir. */

import { parseArgs } from "node:util";

import { extract, extractBatch, ExtractionRecord } from "./extract.js";

function printRecord(rec: ExtractionRecord): void {
  const dest = rec.outputPath ?? "-";
  const suffix = rec.message ? `\t${rec.message}` : "";
  process.stdout.write(
    `${rec.status}\t${rec.sourcePath}\t${dest}\t${rec.nodeCount}${suffix}\n`,
  );
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command === "extract") {
    const { values, positionals } = parseArgs({
      args: rest,
      options: {
        "out-dir": { type: "string" },
        encoded: { type: "boolean", default: false },
      },
      allowPositionals: true,
    });
    if (positionals.length !== 1 || !values["out-dir"]) {
      process.stderr.write("usage: extract <script> --out-dir DIR [--encoded]\n");
      return 2;
    }
    const rec = extract(positionals[0], values["out-dir"], {
      encoded: values.encoded,
    });
    printRecord(rec);
    return rec.status === "ok" ? 0 : 1;
  }
  if (command === "batch") {
    const { values, positionals } = parseArgs({
      args: rest,
      options: {
        "out-dir": { type: "string" },
        jobs: { type: "string", default: "1" },
      },
      allowPositionals: true,
    });
    if (positionals.length !== 1 || !values["out-dir"]) {
      process.stderr.write("usage: batch <dir> --out-dir DIR [--jobs N]\n");
      return 2;
    }
    const recs = await extractBatch(
      positionals[0],
      values["out-dir"],
      Number(values.jobs),
    );
    recs.forEach(printRecord);
    const failed = recs.filter((r) => r.status !== "ok").length;
    process.stdout.write(`done: ${recs.length - failed} ok, ${failed} failed\n`);
    return failed > 0 ? 1 : 0;
  }
  process.stderr.write("usage: <extract|batch> ...\n");
  return 2;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
