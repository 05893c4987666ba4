"""Acceptance gate: one test per release criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
Every expected value here is checked against an independent route (finite
differences, exhaustive search, brute-force references) rather than against
numbers produced by the code under test.
"""

import time

import numpy as np

from astembed.analysis import (
    agglomerate,
    kmeans,
    nearest_neighbors,
    pairwise_distances,
)
from astembed.ast_core import (
    NodeTypeTable,
    Subtree,
    extract_subtrees,
    parse_ast_file,
    serialize_ast,
    tree_features,
)
from astembed.cli import main
from astembed.embedding import (
    TrainConfig,
    corrupt_subtree,
    hinge_loss,
    init_model,
    subtree_distance,
    train,
)
from astembed.forest import ForestConfig, cross_validate, train_forest, confusion
from astembed.rng import substream
from astembed.synth import SynthSpec, generate_corpus

from conftest import random_ast
from test_analysis import brute_force_agglomerate, matrix_from_points
from test_embedding import finite_difference_check


LEAF_SUM_TOL = 1e-12


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def random_subtree(T: int, rng: np.random.Generator) -> Subtree:
    n = int(rng.integers(1, 5))
    kids = [int(t) for t in rng.integers(T, size=n)]
    counts = rng.integers(1, 6, size=n).astype(np.float64)
    fracs = counts / counts.sum()
    return Subtree(
        parent_type=int(rng.integers(T)),
        children=tuple(zip(kids, (float(f) for f in fracs))),
    )


def test_gradient_correctness():
    """Analytic gradients match central finite differences on 20 active triples."""
    start = time.time()
    rng = substream(29, "acceptance-grad")
    table = NodeTypeTable([f"T{i}" for i in range(9)])
    checked = 0
    while checked < 20:
        cfg = TrainConfig(n_f=5, seed=int(rng.integers(1 << 30)))
        model = init_model(table, cfg)
        st = random_subtree(9, rng)
        st_c = corrupt_subtree(st, cfg.k, 9, rng)
        d = subtree_distance(model, st)
        d_c = subtree_distance(model, st_c)
        if hinge_loss(d, d_c, cfg.delta) <= 0.0:
            continue
        finite_difference_check(model, st, st_c, cfg.delta, rtol=1e-4)
        checked += 1
    elapsed = time.time() - start
    report(
        "gradient-correctness",
        checked == 20 and elapsed < 1.0,
        f"20 triples vs central differences, {elapsed:.2f}s",
    )


def test_leaf_fraction_conservation():
    """Fractions of every extracted one-level subtree sum to 1 within 1e-12."""
    start = time.time()
    rng = substream(31, "acceptance-leaf")
    worst = 0.0
    total = 0
    for _ in range(1000):
        ast = random_ast(rng, max_nodes=40)
        for st in extract_subtrees(ast):
            total += 1
            err = abs(sum(f for _, f in st.children) - 1.0)
            worst = max(worst, err)
    elapsed = time.time() - start
    report(
        "leaf-fraction-conservation",
        worst <= LEAF_SUM_TOL and elapsed < 1.0,
        f"{total} subtrees from 1000 trees, worst |sum-1|={worst:.2e}, "
        f"{elapsed:.2f}s",
    )


def test_format_round_trip():
    """serialize then parse reproduces 1000 random trees node for node."""
    start = time.time()
    rng = substream(37, "acceptance-roundtrip")
    ok = True
    for i in range(1000):
        types = NodeTypeTable()
        ast = random_ast(
            rng, max_nodes=25, types=types, script_id=f"rt-{i}", family="fam"
        )
        back = parse_ast_file(serialize_ast(ast), types)
        ok = ok and back.nodes == ast.nodes
        ok = ok and (back.script_id, back.family) == (ast.script_id, ast.family)
    elapsed = time.time() - start
    report(
        "format-round-trip",
        ok and elapsed < 1.0,
        f"1000 trees node-exact, {elapsed:.2f}s",
    )


def test_training_convergence():
    """200 epochs on 10000 subtrees (175 unique, 37 types) drops the mean
    hinge loss below 10% of the first epoch in under five minutes."""
    start = time.time()
    T = 37
    table = NodeTypeTable([f"Type{i:02d}" for i in range(T)])
    rng = substream(7, "acceptance-pool")
    pool: list[Subtree] = []
    seen = set()
    while len(pool) < 175:
        st = random_subtree(T, rng)
        key = (st.parent_type, st.child_types())
        if key in seen:
            continue
        seen.add(key)
        pool.append(st)
    picks = rng.integers(len(pool), size=10000)
    corpus = [pool[int(i)] for i in picks]
    assert len(set(corpus)) == 175

    _, trace = train(corpus, TrainConfig(seed=7), table)
    elapsed = time.time() - start
    ratio = trace[-1] / trace[0]
    report(
        "training-convergence",
        len(trace) == 200 and ratio < 0.10 and elapsed < 300.0,
        f"epoch1={trace[0]:.4f} final={trace[-1]:.4f} "
        f"ratio={ratio:.4f} {elapsed:.1f}s",
    )


def test_context_similarity_twins():
    """Two types planted in mirrored contexts become mutual nearest
    neighbors in at least 8 of 10 seeds."""
    start = time.time()
    wins = 0
    for seed in range(10):
        types = NodeTypeTable()
        spec = SynthSpec(
            families=4,
            scripts_per_family=10,
            seed=seed,
            twin_pairs=(("TryStatement", "CatchClause"),),
        )
        corpus = generate_corpus(spec, types)
        subs = [st for ast in corpus for st in extract_subtrees(ast)]
        model, _ = train(subs, TrainConfig(seed=seed, epochs=60), types)
        dm = pairwise_distances(model)
        a = types.id_of("TryStatement")
        b = types.id_of("CatchClause")
        if (
            nearest_neighbors(dm, a, 1)[0][0] == b
            and nearest_neighbors(dm, b, 1)[0][0] == a
        ):
            wins += 1
    elapsed = time.time() - start
    report(
        "context-similarity-twins",
        wins >= 8 and elapsed < 300.0,
        f"mutual nearest in {wins}/10 seeds, {elapsed:.1f}s",
    )


def test_family_classification():
    """3-fold stratified CV on the separable 8-family corpus reaches mean
    accuracy 0.85 from depth and node count alone."""
    start = time.time()
    types = NodeTypeTable()
    spec = SynthSpec(families=8, scripts_per_family=100, seed=3, separable=True)
    corpus = generate_corpus(spec, types)
    X = np.array(
        [[tree_features(a).depth, tree_features(a).node_count] for a in corpus],
        dtype=np.float64,
    )
    labels = sorted({a.family for a in corpus})
    y = np.array([labels.index(a.family) for a in corpus])
    config = ForestConfig(seed=3, max_depth=11)
    mean_acc, folds = cross_validate(X, y, config)

    forest = train_forest(X, y, config)
    cm = confusion(forest, X, y, labels)
    row_sums = cm.counts.sum(axis=1)
    class_counts = np.bincount(y, minlength=len(labels))
    elapsed = time.time() - start
    report(
        "family-classification",
        mean_acc >= 0.85
        and np.array_equal(row_sums, class_counts)
        and elapsed < 30.0,
        f"cv mean={mean_acc:.4f} folds={[round(a, 4) for a in folds]} "
        f"{elapsed:.1f}s",
    )


def test_determinism(tmp_path, capsys):
    """Reruns with the same seed produce byte-identical artifacts."""
    corpus = tmp_path / "corpus"
    rc = main(
        ["synth", "--out", str(corpus), "--families", "2", "--scripts", "4",
         "--twins", "TryStatement:CatchClause"]
    )
    assert rc == 0
    outputs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(
            ["train", str(corpus), "--out", str(out), "--epochs", "5",
             "--n-f", "6", "--seed", "11"]
        ) == 0
        dest = tmp_path / f"cluster-{tag}"
        assert main(
            ["cluster", str(out / "model.json"), "--out", str(dest),
             "--k", "3", "--format", "tsv"]
        ) == 0
        capsys.readouterr()
        assert main(
            ["neighbors", str(out / "model.json"), "--type", "TryStatement",
             "-m", "3"]
        ) == 0
        outputs.append(
            (
                (out / "model.json").read_bytes(),
                (out / "loss.csv").read_bytes(),
                (dest / "kmeans.csv").read_bytes(),
                (dest / "dendrogram.tsv").read_bytes(),
                capsys.readouterr().out,
            )
        )
    report(
        "determinism",
        outputs[0] == outputs[1],
        "model, trace, kmeans, dendrogram, neighbor table byte-identical",
    )


def test_oracle_equivalence():
    """Analysis routines agree with exhaustive and brute-force references."""
    rng = substream(41, "acceptance-oracle")

    neighbors_ok = True
    for _ in range(10):
        T = int(rng.integers(5, 15))
        dm = matrix_from_points(rng.normal(size=(T, 4)))
        for i in range(T):
            got = nearest_neighbors(dm, i, T - 1)
            ref = sorted(
                ((float(dm.values[i, j]), j) for j in range(T) if j != i),
            )
            neighbors_ok = neighbors_ok and got == [(j, d) for d, j in ref]

    agglom_ok = True
    for _ in range(10):
        T = int(rng.integers(6, 13))
        dm = matrix_from_points(rng.normal(size=(T, 3)))
        for linkage in ("average", "single", "complete"):
            fast = agglomerate(dm, linkage)
            slow = brute_force_agglomerate(dm, linkage)
            same = len(fast.merges) == len(slow.merges) and all(
                f[0] == s[0]
                and f[1] == s[1]
                and f[3] == s[3]
                and abs(f[2] - s[2]) < 1e-9
                for f, s in zip(fast.merges, slow.merges)
            )
            agglom_ok = agglom_ok and same

    inertia_ok = True
    for seed in range(5):
        X = substream(43, "acceptance-kmeans", seed).normal(size=(60, 2))
        _, _, inertias = kmeans(X, k=4, seed=seed)
        inertia_ok = inertia_ok and all(
            b <= a + 1e-9 for a, b in zip(inertias, inertias[1:])
        )

    report(
        "oracle-equivalence",
        neighbors_ok and agglom_ok and inertia_ok,
        f"neighbors={neighbors_ok} agglomerate={agglom_ok} "
        f"kmeans-inertia={inertia_ok}",
    )
