"""Contrastive node-type embedding learning over one-level subtrees.

A subtree's children are combined through position-interpolated weight
matrices and squashed with tanh; the squared distance between the parent's
embedding and that reconstruction is driven below the same distance for a
corrupted copy of the subtree (children retyped at random) by a hinge margin.
Parameters are updated online with Adam, one fresh corruption per subtree
per epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from astembed.ast_core import NodeTypeTable, Subtree
from astembed.rng import substream

__all__ = [
    "TrainConfig",
    "EmbeddingModel",
    "AdamState",
    "Gradients",
    "position_weight",
    "subtree_distance",
    "corrupt_subtree",
    "hinge_loss",
    "loss_gradients",
    "adam_step",
    "init_model",
    "train",
    "SubtreeEmbedding",
]


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters. ``delta`` and ``k`` default to the margin 3
    and corruption count 3; the rest are conventional choices."""

    delta: float = 3.0
    k: int = 3
    n_f: int = 30
    epochs: int = 200
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    init_scale: float = 0.1

    def validate(self) -> None:
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.n_f < 1:
            raise ValueError("n_f must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.init_scale < 0:
            raise ValueError("init_scale must be non-negative")


@dataclass
class EmbeddingModel:
    """Learned parameters: embedding matrix ``V`` (one column per node type),
    left/right interpolation matrices, and the reconstruction bias."""

    V: np.ndarray  # (n_f, T)
    W_l: np.ndarray  # (n_f, n_f)
    W_r: np.ndarray  # (n_f, n_f)
    b: np.ndarray  # (n_f,)
    type_table: NodeTypeTable

    @property
    def n_f(self) -> int:
        return self.V.shape[0]

    @property
    def n_types(self) -> int:
        return self.V.shape[1]

    def vector(self, type_id: int) -> np.ndarray:
        return self.V[:, type_id]

    def validate(self) -> None:
        if self.V.shape != (self.n_f, len(self.type_table)):
            raise ValueError("embedding matrix shape disagrees with type table")
        for arr in (self.V, self.W_l, self.W_r, self.b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite model parameter")

    def copy(self) -> "EmbeddingModel":
        return EmbeddingModel(
            V=self.V.copy(),
            W_l=self.W_l.copy(),
            W_r=self.W_r.copy(),
            b=self.b.copy(),
            type_table=self.type_table,
        )


def _position_coeffs(i: int, n: int) -> tuple[float, float]:
    if not 1 <= i <= n:
        raise ValueError(f"child position {i} outside 1..{n}")
    if n == 1:
        return 0.5, 0.5
    return (n - i) / (n - 1), (i - 1) / (n - 1)


def position_weight(W_l: np.ndarray, W_r: np.ndarray, i: int, n: int) -> np.ndarray:
    """Weight matrix for the 1-based child position ``i`` of ``n`` children:
    a linear interpolation from the left matrix to the right one. A single
    child gets the average of the two (there is no left/right direction)."""
    a, c = _position_coeffs(i, n)
    return a * W_l + c * W_r


def _reconstruction(model: EmbeddingModel, st: Subtree) -> np.ndarray:
    z = model.b.copy()
    n = st.n_children
    for pos, (ctype, frac) in enumerate(st.children, start=1):
        W_i = position_weight(model.W_l, model.W_r, pos, n)
        z += frac * (W_i @ model.V[:, ctype])
    return np.tanh(z)


def subtree_distance(model: EmbeddingModel, st: Subtree) -> float:
    """Squared euclidean distance between the parent embedding and the
    tanh-squashed positional combination of the child embeddings."""
    T = model.n_types
    for tid in (st.parent_type, *st.child_types()):
        if not 0 <= tid < T:
            raise ValueError(f"type id {tid} outside model's 0..{T - 1}")
    diff = model.V[:, st.parent_type] - _reconstruction(model, st)
    return float(diff @ diff)


def corrupt_subtree(
    st: Subtree, k: int, T: int, rng: np.random.Generator
) -> Subtree:
    """Negative example: retype exactly ``min(k, n)`` distinct children.

    Positions are drawn uniformly without replacement; each chosen child gets
    a uniformly random *different* type. Parent type and leaf fractions are
    untouched.
    """
    if T < 2:
        raise ValueError("need at least 2 node types to corrupt")
    n = st.n_children
    count = min(k, n)
    positions = rng.choice(n, size=count, replace=False)
    children = list(st.children)
    for pos in positions:
        old, frac = children[pos]
        draw = int(rng.integers(T - 1))
        children[pos] = (draw if draw < old else draw + 1, frac)
    return Subtree(parent_type=st.parent_type, children=tuple(children))


def hinge_loss(d: float, d_c: float, delta: float) -> float:
    """max(0, delta + d - d_c): zero once the corrupted distance beats the
    genuine one by the margin."""
    return max(0.0, delta + d - d_c)


@dataclass
class Gradients:
    """Hinge-loss gradients; embedding-matrix gradients are kept sparse as
    per-column vectors for the touched type ids only."""

    v_cols: dict[int, np.ndarray]
    W_l: np.ndarray
    W_r: np.ndarray
    b: np.ndarray


def _forward_parts(model: EmbeddingModel, st: Subtree):
    # u and w gather the children weighted by leaf fraction and by the
    # left/right interpolation coefficients, so z = W_l u + W_r w + b.
    nf = model.n_f
    n = st.n_children
    u = np.zeros(nf)
    w = np.zeros(nf)
    la = np.empty(n)
    lbv = np.empty(n)
    for idx, (ctype, frac) in enumerate(st.children):
        a, c = _position_coeffs(idx + 1, n)
        la[idx] = frac * a
        lbv[idx] = frac * c
        u += la[idx] * model.V[:, ctype]
        w += lbv[idx] * model.V[:, ctype]
    z = model.W_l @ u + model.W_r @ w + model.b
    act = np.tanh(z)
    resid = model.V[:, st.parent_type] - act
    return u, w, act, resid, la, lbv


def loss_gradients(
    model: EmbeddingModel, st: Subtree, st_c: Subtree, delta: float
) -> Gradients:
    """Analytic gradients of ``hinge_loss(d(st), d(st_c), delta)``.

    ``st_c`` must be a corruption of ``st``: same child count and leaf
    fractions. When the margin is already satisfied every gradient is zero
    (subgradient convention at the kink).
    """
    if st_c.n_children != st.n_children or st_c.fractions() != st.fractions():
        raise ValueError("corrupted subtree does not match the genuine one")
    if st_c.parent_type != st.parent_type:
        raise ValueError("corruption must preserve the parent type")
    nf = model.n_f
    zeros = lambda: np.zeros((nf, nf))
    u, w, act, resid, la, lbv = _forward_parts(model, st)
    u2, w2, act2, resid2, _, _ = _forward_parts(model, st_c)
    d = float(resid @ resid)
    d_c = float(resid2 @ resid2)
    if delta + d - d_c <= 0:
        return Gradients(v_cols={}, W_l=zeros(), W_r=zeros(), b=np.zeros(nf))

    g = -2.0 * resid * (1.0 - act * act)  # dL/dz through d
    g2 = 2.0 * resid2 * (1.0 - act2 * act2)  # dL/dz2 through -d_c
    d_wl = np.outer(g, u) + np.outer(g2, u2)
    d_wr = np.outer(g, w) + np.outer(g2, w2)
    d_b = g + g2
    gl = model.W_l.T @ g
    gr = model.W_r.T @ g
    gl2 = model.W_l.T @ g2
    gr2 = model.W_r.T @ g2

    v_cols: dict[int, np.ndarray] = {}

    def add(col: int, vec: np.ndarray) -> None:
        if col in v_cols:
            v_cols[col] += vec
        else:
            v_cols[col] = vec.copy()

    # the parent column appears in both d and -d_c
    add(st.parent_type, 2.0 * resid - 2.0 * resid2)
    for idx, (ctype, _) in enumerate(st.children):
        add(ctype, la[idx] * gl + lbv[idx] * gr)
    for idx, (ctype, _) in enumerate(st_c.children):
        add(ctype, la[idx] * gl2 + lbv[idx] * gr2)
    return Gradients(v_cols=v_cols, W_l=d_wl, W_r=d_wr, b=d_b)


@dataclass
class AdamState:
    """First/second-moment accumulators per named parameter plus the shared
    step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            t=0,
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    config: TrainConfig,
) -> AdamState:
    """One bias-corrected Adam update, in place on ``params``.

    Components whose gradient entry is exactly zero are left untouched
    (accumulators included), so an inactive hinge is a true no-op apart from
    the step counter.
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise ValueError(f"non-finite gradient for {name!r}")
    state.t += 1
    bc1 = 1.0 - config.beta1 ** state.t
    bc2 = 1.0 - config.beta2 ** state.t
    for name, grad in grads.items():
        mask = grad != 0.0
        if not mask.any():
            continue
        m = state.m[name]
        v = state.v[name]
        m[mask] = config.beta1 * m[mask] + (1.0 - config.beta1) * grad[mask]
        v[mask] = config.beta2 * v[mask] + (1.0 - config.beta2) * grad[mask] ** 2
        step = (
            config.learning_rate
            * (m[mask] / bc1)
            / (np.sqrt(v[mask] / bc2) + config.epsilon)
        )
        params[name][mask] -= step
    return state


def init_model(type_table: NodeTypeTable, config: TrainConfig) -> EmbeddingModel:
    """Uniform init in [-init_scale, init_scale]; deterministic per seed."""
    T = len(type_table)
    if T < 1:
        raise ValueError("empty type table")
    rng = substream(config.seed, "init")
    scale = config.init_scale
    return EmbeddingModel(
        V=rng.uniform(-scale, scale, size=(config.n_f, T)),
        W_l=rng.uniform(-scale, scale, size=(config.n_f, config.n_f)),
        W_r=rng.uniform(-scale, scale, size=(config.n_f, config.n_f)),
        b=rng.uniform(-scale, scale, size=config.n_f),
        type_table=type_table,
    )


def _flatten_corpus(corpus: list[Subtree], T: int):
    M = len(corpus)
    starts = np.zeros(M + 1, dtype=np.int64)
    parents = np.empty(M, dtype=np.int64)
    for i, st in enumerate(corpus):
        for tid in (st.parent_type, *st.child_types()):
            if not 0 <= tid < T:
                raise ValueError(f"type id {tid} outside 0..{T - 1}")
        starts[i + 1] = starts[i] + st.n_children
        parents[i] = st.parent_type
    total = int(starts[-1])
    ctypes = np.empty(total, dtype=np.int64)
    la = np.empty(total)
    lbv = np.empty(total)
    for i, st in enumerate(corpus):
        n = st.n_children
        for idx, (ctype, frac) in enumerate(st.children):
            a, c = _position_coeffs(idx + 1, n)
            off = starts[i] + idx
            ctypes[off] = ctype
            la[off] = frac * a
            lbv[off] = frac * c
    return starts, parents, ctypes, la, lbv


def _epoch_randomness(
    lengths: np.ndarray, max_n: int, k: int, T: int, rng: np.random.Generator
):
    """Shuffle order plus, per step, corruption positions and retype draws.

    Row s of ``pos_order`` starts with a uniform random subset of the valid
    child positions of subtree s (invalid positions sort last).
    """
    M = len(lengths)
    perm = rng.permutation(M)
    keys = rng.random((M, max_n))
    keys[np.arange(max_n)[None, :] >= lengths[:, None]] = np.inf
    pos_order = np.argsort(keys, axis=1).astype(np.int64)
    repl = rng.integers(0, T - 1, size=(M, max(k, 1))).astype(np.int64)
    return perm.astype(np.int64), pos_order, repl


@njit(cache=True)
def _train_epoch_kernel(
    E,  # (T, n_f) embeddings, row per type
    Wl,
    Wr,
    b,
    mE,
    vE,
    mWl,
    vWl,
    mWr,
    vWr,
    mb,
    vb,
    t0,
    starts,
    parents,
    ctypes,
    la,
    lbv,
    perm,
    pos_order,
    repl,
    delta,
    lr,
    beta1,
    beta2,
    eps,
    k,
):  # pragma: no cover - exercised via train()
    T, nf = E.shape
    max_n = pos_order.shape[1]
    u = np.empty(nf)
    w = np.empty(nf)
    z = np.empty(nf)
    a = np.empty(nf)
    r = np.empty(nf)
    u2 = np.empty(nf)
    w2 = np.empty(nf)
    z2 = np.empty(nf)
    a2 = np.empty(nf)
    r2 = np.empty(nf)
    g = np.empty(nf)
    g2 = np.empty(nf)
    gl = np.empty(nf)
    gr = np.empty(nf)
    gl2 = np.empty(nf)
    gr2 = np.empty(nf)
    ct2 = np.empty(max_n, dtype=np.int64)
    ucols = np.empty(2 * max_n + 1, dtype=np.int64)
    colgrad = np.empty((2 * max_n + 1, nf))
    t = t0
    loss_sum = 0.0
    for j in range(perm.shape[0]):
        s = perm[j]
        lo = starts[s]
        n = starts[s + 1] - lo
        c = min(k, n)
        # corrupted child types
        for q in range(n):
            ct2[q] = ctypes[lo + q]
        for q in range(c):
            pos = pos_order[s, q]
            old = ct2[pos]
            draw = repl[s, q]
            ct2[pos] = draw if draw < old else draw + 1
        # forward, genuine and corrupted
        for i in range(nf):
            u[i] = 0.0
            w[i] = 0.0
            u2[i] = 0.0
            w2[i] = 0.0
        for q in range(n):
            cla = la[lo + q]
            clb = lbv[lo + q]
            row = ctypes[lo + q]
            row2 = ct2[q]
            for i in range(nf):
                u[i] += cla * E[row, i]
                w[i] += clb * E[row, i]
                u2[i] += cla * E[row2, i]
                w2[i] += clb * E[row2, i]
        p = parents[s]
        d = 0.0
        d2 = 0.0
        for i in range(nf):
            zi = b[i]
            z2i = b[i]
            for jj in range(nf):
                zi += Wl[i, jj] * u[jj] + Wr[i, jj] * w[jj]
                z2i += Wl[i, jj] * u2[jj] + Wr[i, jj] * w2[jj]
            z[i] = zi
            z2[i] = z2i
            a[i] = np.tanh(zi)
            a2[i] = np.tanh(z2i)
            r[i] = E[p, i] - a[i]
            r2[i] = E[p, i] - a2[i]
            d += r[i] * r[i]
            d2 += r2[i] * r2[i]
        loss = delta + d - d2
        t += 1
        if loss <= 0.0:
            continue
        loss_sum += loss
        bc1 = 1.0 - beta1 ** t
        bc2 = 1.0 - beta2 ** t
        for i in range(nf):
            g[i] = -2.0 * r[i] * (1.0 - a[i] * a[i])
            g2[i] = 2.0 * r2[i] * (1.0 - a2[i] * a2[i])
        # back-propagated child contributions need W^T g at pre-step weights
        for i in range(nf):
            s1 = 0.0
            s2 = 0.0
            s3 = 0.0
            s4 = 0.0
            for jj in range(nf):
                s1 += Wl[jj, i] * g[jj]
                s2 += Wr[jj, i] * g[jj]
                s3 += Wl[jj, i] * g2[jj]
                s4 += Wr[jj, i] * g2[jj]
            gl[i] = s1
            gr[i] = s2
            gl2[i] = s3
            gr2[i] = s4
        # dense params: W_l, W_r, b
        for i in range(nf):
            gi = g[i]
            g2i = g2[i]
            for jj in range(nf):
                dwl = gi * u[jj] + g2i * u2[jj]
                if dwl != 0.0:
                    mWl[i, jj] = beta1 * mWl[i, jj] + (1.0 - beta1) * dwl
                    vWl[i, jj] = beta2 * vWl[i, jj] + (1.0 - beta2) * dwl * dwl
                    Wl[i, jj] -= lr * (mWl[i, jj] / bc1) / (
                        np.sqrt(vWl[i, jj] / bc2) + eps
                    )
                dwr = gi * w[jj] + g2i * w2[jj]
                if dwr != 0.0:
                    mWr[i, jj] = beta1 * mWr[i, jj] + (1.0 - beta1) * dwr
                    vWr[i, jj] = beta2 * vWr[i, jj] + (1.0 - beta2) * dwr * dwr
                    Wr[i, jj] -= lr * (mWr[i, jj] / bc1) / (
                        np.sqrt(vWr[i, jj] / bc2) + eps
                    )
            db = gi + g2i
            if db != 0.0:
                mb[i] = beta1 * mb[i] + (1.0 - beta1) * db
                vb[i] = beta2 * vb[i] + (1.0 - beta2) * db * db
                b[i] -= lr * (mb[i] / bc1) / (np.sqrt(vb[i] / bc2) + eps)
        # sparse embedding-column gradients, accumulated over unique columns
        n_unique = 1
        ucols[0] = p
        for i in range(nf):
            colgrad[0, i] = 2.0 * r[i] - 2.0 * r2[i]
        for q in range(n):
            cla = la[lo + q]
            clb = lbv[lo + q]
            for variant in range(2):
                col = ctypes[lo + q] if variant == 0 else ct2[q]
                found = -1
                for uu in range(n_unique):
                    if ucols[uu] == col:
                        found = uu
                        break
                if found == -1:
                    found = n_unique
                    ucols[found] = col
                    n_unique += 1
                    for i in range(nf):
                        colgrad[found, i] = 0.0
                if variant == 0:
                    for i in range(nf):
                        colgrad[found, i] += cla * gl[i] + clb * gr[i]
                else:
                    for i in range(nf):
                        colgrad[found, i] += cla * gl2[i] + clb * gr2[i]
        for uu in range(n_unique):
            col = ucols[uu]
            for i in range(nf):
                gv = colgrad[uu, i]
                if gv != 0.0:
                    mE[col, i] = beta1 * mE[col, i] + (1.0 - beta1) * gv
                    vE[col, i] = beta2 * vE[col, i] + (1.0 - beta2) * gv * gv
                    E[col, i] -= lr * (mE[col, i] / bc1) / (
                        np.sqrt(vE[col, i] / bc2) + eps
                    )
    return loss_sum, t


def _corrupted_from_arrays(
    st: Subtree, s: int, pos_order: np.ndarray, repl: np.ndarray, k: int
) -> Subtree:
    n = st.n_children
    children = list(st.children)
    for q in range(min(k, n)):
        pos = int(pos_order[s, q])
        old, frac = children[pos]
        draw = int(repl[s, q])
        children[pos] = (draw if draw < old else draw + 1, frac)
    return Subtree(parent_type=st.parent_type, children=tuple(children))


def train(
    corpus: list[Subtree],
    config: TrainConfig,
    type_table: NodeTypeTable | None = None,
    backend: str = "numba",
) -> tuple[EmbeddingModel, list[float]]:
    """Train embeddings over a subtree corpus; returns the model and the
    per-epoch mean hinge loss.

    Per epoch the corpus order is reshuffled and every subtree gets one
    fresh corruption, one gradient evaluation, and one online Adam step.
    Fully deterministic per ``config.seed``. The ``"python"`` backend is a
    slow reference implementation of the same loop.
    """
    config.validate()
    if not corpus:
        raise ValueError("empty subtree corpus")
    if type_table is None:
        T = max(max(st.parent_type, *st.child_types()) for st in corpus) + 1
        type_table = NodeTypeTable([f"type{i}" for i in range(T)])
    T = len(type_table)
    if T < 2:
        raise ValueError("need at least 2 node types to corrupt negatives")
    if backend not in ("numba", "python"):
        raise ValueError(f"unknown backend {backend!r}")

    model = init_model(type_table, config)
    starts, parents, ctypes, la, lbv = _flatten_corpus(corpus, T)
    M = len(corpus)
    lengths = starts[1:] - starts[:-1]
    max_n = int(lengths.max())
    trace: list[float] = []

    if backend == "numba":
        E = np.ascontiguousarray(model.V.T)
        Wl = model.W_l.copy()
        Wr = model.W_r.copy()
        bvec = model.b.copy()
        mE, vE = np.zeros_like(E), np.zeros_like(E)
        mWl, vWl = np.zeros_like(Wl), np.zeros_like(Wl)
        mWr, vWr = np.zeros_like(Wr), np.zeros_like(Wr)
        mb, vb = np.zeros_like(bvec), np.zeros_like(bvec)
        t = 0
        for epoch in range(config.epochs):
            rng = substream(config.seed, "train", epoch)
            perm, pos_order, repl = _epoch_randomness(lengths, max_n, config.k, T, rng)
            loss_sum, t = _train_epoch_kernel(
                E, Wl, Wr, bvec,
                mE, vE, mWl, vWl, mWr, vWr, mb, vb,
                t,
                starts, parents, ctypes, la, lbv,
                perm, pos_order, repl,
                config.delta, config.learning_rate,
                config.beta1, config.beta2, config.epsilon,
                config.k,
            )
            trace.append(loss_sum / M)
            if not np.isfinite(trace[-1]):
                raise FloatingPointError(f"non-finite loss in epoch {epoch}")
        model = EmbeddingModel(
            V=np.ascontiguousarray(E.T), W_l=Wl, W_r=Wr, b=bvec,
            type_table=type_table,
        )
    else:
        params = {"V": model.V, "W_l": model.W_l, "W_r": model.W_r, "b": model.b}
        state = AdamState.for_params(params)
        for epoch in range(config.epochs):
            rng = substream(config.seed, "train", epoch)
            perm, pos_order, repl = _epoch_randomness(lengths, max_n, config.k, T, rng)
            loss_sum = 0.0
            for s in perm:
                st = corpus[s]
                st_c = _corrupted_from_arrays(st, s, pos_order, repl, config.k)
                d = subtree_distance(model, st)
                d_c = subtree_distance(model, st_c)
                loss_sum += hinge_loss(d, d_c, config.delta)
                grads = loss_gradients(model, st, st_c, config.delta)
                dense_v = np.zeros_like(model.V)
                for col, vec in grads.v_cols.items():
                    dense_v[:, col] = vec
                adam_step(
                    params,
                    {"V": dense_v, "W_l": grads.W_l, "W_r": grads.W_r, "b": grads.b},
                    state,
                    config,
                )
            trace.append(loss_sum / M)
    model.validate()
    return model, trace


class SubtreeEmbedding:
    """Estimator wrapper around :func:`train` with a sklearn-style surface.

    ``fit`` expects a list of :class:`Subtree`; ``transform`` maps type names
    (or ids) to their learned vectors.
    """

    def __init__(
        self,
        n_f: int = 30,
        delta: float = 3.0,
        k: int = 3,
        epochs: int = 200,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
        init_scale: float = 0.1,
        seed: int = 0,
        backend: str = "numba",
    ):
        self.n_f = n_f
        self.delta = delta
        self.k = k
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.init_scale = init_scale
        self.seed = seed
        self.backend = backend

    def get_params(self, deep: bool = True) -> dict:
        return {
            name: getattr(self, name)
            for name in (
                "n_f", "delta", "k", "epochs", "learning_rate",
                "beta1", "beta2", "epsilon", "init_scale", "seed", "backend",
            )
        }

    def set_params(self, **params) -> "SubtreeEmbedding":
        for name, value in params.items():
            if name not in self.get_params():
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _config(self) -> TrainConfig:
        return TrainConfig(
            delta=self.delta, k=self.k, n_f=self.n_f, epochs=self.epochs,
            learning_rate=self.learning_rate, beta1=self.beta1,
            beta2=self.beta2, epsilon=self.epsilon, seed=self.seed,
            init_scale=self.init_scale,
        )

    def fit(self, X: list[Subtree], y=None, types: NodeTypeTable | None = None):
        self.model_, self.loss_trace_ = train(
            list(X), self._config(), type_table=types, backend=self.backend
        )
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise RuntimeError("estimator is not fitted")
        ids = [
            self.model_.type_table.id_of(x) if isinstance(x, str) else int(x)
            for x in X
        ]
        return self.model_.V[:, ids].T.copy()

    def fit_transform(self, X, y=None, **kwargs) -> np.ndarray:
        self.fit(X, y, **kwargs)
        return self.model_.V.T.copy()
