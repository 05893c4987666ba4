"""Command-line front end for the whole pipeline.

Subcommands: decode, stats, subtrees, train, neighbors, cluster, classify,
synth. Every command is deterministic given its config and seed; commands
that write artifacts also drop a manifest (config + hash + version) next to
them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from astembed import __version__
from astembed.ast_core import (
    Ast,
    NodeTypeTable,
    decode_encoded_command,
    extract_subtrees,
    parse_ast_file,
    serialize_ast,
    tree_features,
)
from astembed.analysis import (
    agglomerate,
    emit_dendrogram,
    kmeans,
    nearest_neighbors,
    pairwise_distances,
)
from astembed.embedding import TrainConfig, train
from astembed.forest import (
    ForestConfig,
    confusion,
    cross_validate,
    filter_families,
    stratified_split,
    train_forest,
)
from astembed.model_io import (
    load_model,
    load_subtree_corpus,
    save_forest,
    save_loss_trace,
    save_model,
    save_subtree_corpus,
    write_manifest,
)
from astembed.rng import substream
from astembed.synth import SynthSpec, generate_corpus


class CommandError(Exception):
    pass


def _resolve(args: argparse.Namespace, name: str, default):
    """Flag value if given, else config-file value, else built-in default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    config = getattr(args, "_config_doc", {})
    return config.get(name, default)


def _load_config(args: argparse.Namespace) -> None:
    doc = {}
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text())
    args._config_doc = doc


def _read_corpus(corpus_dir: Path, strict: bool = True):
    """Parse every .ast.tsv under corpus_dir with a shared type table.

    Returns (asts, errors) where errors is a list of (path, message).
    """
    if not corpus_dir.is_dir():
        raise CommandError(f"{corpus_dir} is not a directory")
    types = NodeTypeTable()
    asts: list[Ast] = []
    errors: list[tuple[Path, str]] = []
    for path in sorted(corpus_dir.glob("*.ast.tsv")):
        try:
            ast = parse_ast_file(path.read_text(), types=types)
            if not ast.script_id:
                ast.script_id = path.name.removesuffix(".ast.tsv")
            asts.append(ast)
        except ValueError as exc:
            if strict:
                raise CommandError(f"{path}: {exc}") from None
            errors.append((path, str(exc)))
    return asts, types, errors


def cmd_decode(args) -> int:
    try:
        text = Path(args.input).read_text()
        decoded = decode_encoded_command(text)
    except (OSError, ValueError) as exc:
        raise CommandError(f"{args.input}: {exc}") from None
    Path(args.output).write_text(decoded)
    return 0


def cmd_stats(args) -> int:
    asts, _, errors = _read_corpus(Path(args.corpus_dir), strict=False)
    lines = ["script_id\tfamily\tdepth\tnode_count"]
    total_nodes = 0
    for ast in asts:
        f = tree_features(ast)
        lines.append(
            f"{ast.script_id}\t{ast.family or ''}\t{f.depth}\t{f.node_count}"
        )
        total_nodes += f.node_count
    lines.append(f"# total\tscripts={len(asts)}\tnodes={total_nodes}")
    out = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    for path, message in errors:
        print(f"error: {path}: {message}", file=sys.stderr)
    return 1 if errors else 0


def cmd_subtrees(args) -> int:
    _load_config(args)
    seed = _resolve(args, "seed", 0)
    sample = _resolve(args, "sample", None)
    asts, types, _ = _read_corpus(Path(args.corpus_dir))
    subtrees = [st for ast in asts for st in extract_subtrees(ast)]
    unique = len({(st.parent_type, st.child_types()) for st in subtrees})
    if sample is not None:
        if sample > len(subtrees):
            raise CommandError(
                f"sample size {sample} exceeds total {len(subtrees)}"
            )
        rng = substream(seed, "sample")
        idx = rng.choice(len(subtrees), size=sample, replace=False)
        subtrees = [subtrees[i] for i in sorted(idx)]
    out = Path(args.out)
    save_subtree_corpus(subtrees, types, out)
    write_manifest(
        "subtrees",
        {"corpus_dir": str(args.corpus_dir), "sample": sample, "seed": seed},
        out.with_suffix(out.suffix + ".manifest.json"),
    )
    print(f"subtrees: total={len(subtrees)} unique={unique}")
    return 0


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        delta=float(_resolve(args, "delta", 3.0)),
        k=int(_resolve(args, "k", 3)),
        n_f=int(_resolve(args, "n_f", 30)),
        epochs=int(_resolve(args, "epochs", 200)),
        learning_rate=float(_resolve(args, "learning_rate", 1e-3)),
        seed=int(_resolve(args, "seed", 0)),
        init_scale=float(_resolve(args, "init_scale", 0.1)),
    )


def cmd_train(args) -> int:
    _load_config(args)
    cfg = _train_config(args)
    source = Path(args.input)
    if source.is_dir():
        asts, types, _ = _read_corpus(source)
        corpus = [st for ast in asts for st in extract_subtrees(ast)]
    else:
        corpus, types = load_subtree_corpus(source)
    if not corpus:
        raise CommandError("no subtrees in input")
    model, trace = train(corpus, cfg, type_table=types)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.json")
    save_loss_trace(trace, out / "loss.csv")
    write_manifest(
        "train",
        {"input": str(source), **cfg.__dict__},
        out / "manifest.json",
    )
    if trace:
        print(f"train: epochs={cfg.epochs} first_loss={trace[0]:.6g} "
              f"final_loss={trace[-1]:.6g}")
    return 0


def cmd_neighbors(args) -> int:
    _load_config(args)
    m = int(_resolve(args, "m", 5))
    metric = _resolve(args, "metric", "euclidean")
    model = load_model(Path(args.model))
    matrix = pairwise_distances(model, metric=metric)
    if args.type:
        if args.type not in model.type_table:
            raise CommandError(f"unknown type {args.type!r}")
        targets = [model.type_table.id_of(args.type)]
    else:
        targets = list(range(model.n_types))
    lines = ["type\tneighbor\tdistance"]
    for tid in targets:
        for nid, dist in nearest_neighbors(matrix, tid, min(m, matrix.size - 1)):
            lines.append(
                f"{model.type_table.name_of(tid)}\t"
                f"{model.type_table.name_of(nid)}\t{dist!r}"
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        write_manifest(
            "neighbors",
            {"model": str(args.model), "m": m, "metric": metric,
             "type": args.type},
            out.with_suffix(out.suffix + ".manifest.json"),
        )
    else:
        sys.stdout.write(text)
    return 0


def cmd_cluster(args) -> int:
    _load_config(args)
    k = int(_resolve(args, "k", 8))
    seed = int(_resolve(args, "seed", 0))
    metric = _resolve(args, "metric", "euclidean")
    linkage = _resolve(args, "linkage", "average")
    fmt = _resolve(args, "fmt", "newick")
    model = load_model(Path(args.model))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    assign, _, _ = kmeans(model.V.T, k, seed=seed)
    lines = ["type,cluster"]
    for tid in range(model.n_types):
        lines.append(f"{model.type_table.name_of(tid)},{int(assign[tid])}")
    (out / "kmeans.csv").write_text("\n".join(lines) + "\n")

    matrix = pairwise_distances(model, metric=metric)
    dendro = agglomerate(matrix, linkage=linkage)
    ext = {"newick": "nwk", "dot": "dot", "tsv": "tsv"}[fmt]
    (out / f"dendrogram.{ext}").write_text(emit_dendrogram(dendro, fmt))
    write_manifest(
        "cluster",
        {"model": str(args.model), "k": k, "seed": seed, "metric": metric,
         "linkage": linkage, "fmt": fmt},
        out / "manifest.json",
    )
    return 0


def cmd_classify(args) -> int:
    _load_config(args)
    cfg = ForestConfig(
        n_trees=int(_resolve(args, "n_trees", 100)),
        max_depth=int(_resolve(args, "max_depth", 11)),
        min_samples_per_family=int(_resolve(args, "min_count", 41)),
        train_fraction=float(_resolve(args, "train_fraction", 0.7)),
        cv_folds=int(_resolve(args, "cv_folds", 3)),
        seed=int(_resolve(args, "seed", 0)),
    )
    asts, _, _ = _read_corpus(Path(args.corpus_dir))
    families = sorted({ast.family for ast in asts if ast.family})
    if len(families) < 2:
        raise CommandError("corpus needs at least 2 labeled families")
    fam_id = {name: i for i, name in enumerate(families)}
    labeled = [ast for ast in asts if ast.family]
    X = np.array(
        [[tree_features(a).depth, tree_features(a).node_count] for a in labeled],
        dtype=np.float64,
    )
    y = np.array([fam_id[a.family] for a in labeled], dtype=np.int64)
    X, y, labels = filter_families(X, y, families, cfg.min_samples_per_family)
    cv_mean, fold_accs = cross_validate(X, y, cfg)
    train_idx, test_idx = stratified_split(X, y, cfg.train_fraction, cfg.seed)
    forest = train_forest(X[train_idx], y[train_idx], cfg, labels=labels)
    cm = confusion(forest, X[test_idx], y[test_idx], labels)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "confusion.csv").write_text(cm.to_csv())
    (out / "heatmap.txt").write_text(cm.to_heatmap())
    save_forest(forest, out / "forest.json")
    metrics = {
        "cv_mean_accuracy": cv_mean,
        "cv_fold_accuracies": fold_accs,
        "test_accuracy": cm.accuracy,
        "families": labels,
    }
    (out / "metrics.json").write_text(json.dumps(metrics, indent=1) + "\n")
    write_manifest(
        "classify", {"corpus_dir": str(args.corpus_dir), **cfg.__dict__},
        out / "manifest.json",
    )
    print(f"classify: families={len(labels)} cv_mean={cv_mean:.4f} "
          f"test_accuracy={cm.accuracy:.4f}")
    return 0


def cmd_synth(args) -> int:
    _load_config(args)
    twins = tuple(
        tuple(pair.split(":", 1)) for pair in (_resolve(args, "twins", []) or [])
    )
    spec = SynthSpec(
        families=int(_resolve(args, "families", 8)),
        scripts_per_family=int(_resolve(args, "scripts", 100)),
        seed=int(_resolve(args, "seed", 0)),
        separable=not args.no_separable,
        twin_pairs=twins,
    )
    corpus = generate_corpus(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for ast in corpus:
        (out / f"{ast.script_id}.ast.tsv").write_text(serialize_ast(ast))
    write_manifest(
        "synth",
        {"families": spec.families, "scripts_per_family": spec.scripts_per_family,
         "seed": spec.seed, "separable": spec.separable,
         "twins": ["%s:%s" % p for p in spec.twin_pairs]},
        out / "manifest.json",
    )
    print(f"synth: wrote {len(corpus)} scripts to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astembed",
        description="AST node-type embeddings, family classification, analysis",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("decode", help="decode a Base-64 UTF-16LE encoded command")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("stats", help="per-script depth and node-count table")
    p.add_argument("corpus_dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("subtrees", help="extract and optionally sample subtrees")
    p.add_argument("corpus_dir")
    p.add_argument("--out", required=True)
    p.add_argument("--sample", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_subtrees)

    p = sub.add_parser("train", help="train node-type embeddings")
    p.add_argument("input", help="corpus directory or subtree corpus file")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n-f", dest="n_f", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--init-scale", dest="init_scale", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("neighbors", help="nearest-neighbor table for a model")
    p.add_argument("model")
    p.add_argument("--type", default=None, help="single type; default all")
    p.add_argument("-m", type=int, default=None)
    p.add_argument("--metric", choices=["euclidean", "cosine"], default=None)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("cluster", help="k-means and dendrogram over embeddings")
    p.add_argument("model")
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--metric", choices=["euclidean", "cosine"], default=None)
    p.add_argument("--linkage", choices=["single", "average", "complete"],
                   default=None)
    p.add_argument("--format", dest="fmt", choices=["newick", "dot", "tsv"],
                   default=None)
    common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("classify", help="family classification over tree features")
    p.add_argument("corpus_dir")
    p.add_argument("--out", required=True)
    p.add_argument("--n-trees", dest="n_trees", type=int, default=None)
    p.add_argument("--max-depth", dest="max_depth", type=int, default=None)
    p.add_argument("--min-count", dest="min_count", type=int, default=None)
    p.add_argument("--train-fraction", dest="train_fraction", type=float,
                   default=None)
    p.add_argument("--cv-folds", dest="cv_folds", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--families", type=int, default=None)
    p.add_argument("--scripts", type=int, default=None)
    p.add_argument("--twins", action="append", default=None,
                   metavar="X:Y", help="twin type pair, repeatable")
    p.add_argument("--no-separable", action="store_true")
    common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
