"""Learned pair scoring functions.

Three variants share one model shape:

* ``ml``   -- threshold minus a learned squared distance between the fonts.
* ``asml`` -- bilinear similarity term plus the (negated) learned distance;
              the bilinear matrix is free to be asymmetric, so header and
              follower roles are not interchangeable.
* ``sml``  -- the symmetric-bilinear ablation of ``asml``.

Training minimizes a hinge loss over labeled pairs with a Frobenius pull
toward the identity on both matrices, by mini-batch subgradient descent with
an exact proximal step for the regularizer (stable for any regularization
weight). The distance matrix is kept symmetric throughout; positive
semidefiniteness is optional for asml/sml and enforced for ml.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dataset import FeatureStore, LabeledPair

VARIANT_ML = "ml"
VARIANT_SML = "sml"
VARIANT_ASML = "asml"
VARIANTS = (VARIANT_ML, VARIANT_SML, VARIANT_ASML)


class TrainingError(RuntimeError):
    """Raised when training cannot proceed or diverges."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    lr_decay: bool = True  # step size learning_rate / sqrt(t)
    epochs: int = 200
    batch_size: int | None = None  # None = full batch
    seed: int = 0
    psd_projection: bool = False
    multiplicity_weighting: bool = True
    projection_dim: int | None = None  # optional PCA-style reduction before training

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


@dataclass
class MetricModel:
    """Learned scoring model.

    ``dist_mat`` weights the squared-difference term, ``sim_mat`` the
    bilinear similarity term (unused by the ml variant). ``projection``,
    when present, maps raw features into the trained space first.
    ``history`` records the full objective per epoch during training.
    """

    variant: str
    dist_mat: np.ndarray
    sim_mat: np.ndarray
    gamma: float = 0.0
    threshold: float = 0.0
    projection: np.ndarray | None = None
    history: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.dist_mat = np.asarray(self.dist_mat, dtype=np.float64)
        self.sim_mat = np.asarray(self.sim_mat, dtype=np.float64)
        if not (np.all(np.isfinite(self.dist_mat)) and np.all(np.isfinite(self.sim_mat))):
            raise ValueError("model matrices must be finite")

    @property
    def dim(self) -> int:
        return self.dist_mat.shape[0]

    def project(self, x: np.ndarray) -> np.ndarray:
        return x if self.projection is None else self.projection @ x


def score_ml(model: MetricModel, x: Sequence[float], y: Sequence[float]) -> float:
    """Threshold minus the learned squared distance between the two fonts."""
    xv = model.project(np.asarray(x, dtype=np.float64))
    yv = model.project(np.asarray(y, dtype=np.float64))
    if xv.shape != (model.dim,) or yv.shape != (model.dim,):
        raise ValueError("feature dimension does not match model")
    d = xv - yv
    return float(model.threshold - d @ model.dist_mat @ d)


def score_asml(model: MetricModel, x: Sequence[float], y: Sequence[float]) -> float:
    """Bilinear similarity minus the learned squared distance."""
    xv = model.project(np.asarray(x, dtype=np.float64))
    yv = model.project(np.asarray(y, dtype=np.float64))
    if xv.shape != (model.dim,) or yv.shape != (model.dim,):
        raise ValueError("feature dimension does not match model")
    d = xv - yv
    return float(xv @ model.sim_mat @ yv - d @ model.dist_mat @ d)


def score_pair(model: MetricModel, x: Sequence[float], y: Sequence[float]) -> float:
    if model.variant == VARIANT_ML:
        return score_ml(model, x, y)
    return score_asml(model, x, y)


def score_pairs(model: MetricModel, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Vectorized score over row-aligned header/follower feature matrices."""
    if model.projection is not None:
        X = X @ model.projection.T
        Y = Y @ model.projection.T
    D = X - Y
    dist = np.einsum("ij,jk,ik->i", D, model.dist_mat, D)
    if model.variant == VARIANT_ML:
        return model.threshold - dist
    return np.einsum("ij,jk,ik->i", X, model.sim_mat, Y) - dist


def classify(
    model: MetricModel, x: Sequence[float], y: Sequence[float], threshold: float | None = None
) -> int:
    """+1 iff the model score reaches the threshold (boundary counts positive).

    For the ml variant the stored model threshold is the constant inside
    ``score_ml`` (the distance budget), so the default decision boundary is
    0; for asml/sml the stored threshold is the decision cut on the score.
    """
    if threshold is None:
        threshold = 0.0 if model.variant == VARIANT_ML else model.threshold
    return 1 if score_pair(model, x, y) >= threshold else -1


# ---------------------------------------------------------------------------
# hinge objective and its subgradient (shared by training and the
# finite-difference checks)
# ---------------------------------------------------------------------------


def hinge_objective(
    dist_mat: np.ndarray,
    sim_mat: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    gamma: float,
) -> float:
    """Weighted hinge loss plus (gamma/2) * identity-anchored Frobenius penalty."""
    D = X - Y
    f = np.einsum("ij,jk,ik->i", X, sim_mat, Y) - np.einsum("ij,jk,ik->i", D, dist_mat, D)
    hinge = np.maximum(0.0, 1.0 - labels * f)
    eye = np.eye(dist_mat.shape[0])
    reg = 0.5 * gamma * (
        np.sum((dist_mat - eye) ** 2) + np.sum((sim_mat - eye) ** 2)
    )
    return float(weights @ hinge + reg)


def hinge_gradient(
    dist_mat: np.ndarray,
    sim_mat: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    gamma: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Subgradient of ``hinge_objective`` w.r.t. (dist_mat, sim_mat).

    At active hinge terms the data part contributes label-signed outer
    products; inactive terms contribute nothing (the convention at exact
    kinks is the inactive subgradient).
    """
    D = X - Y
    f = np.einsum("ij,jk,ik->i", X, sim_mat, Y) - np.einsum("ij,jk,ik->i", D, dist_mat, D)
    active = (1.0 - labels * f) > 0.0
    coef = np.where(active, -labels * weights, 0.0)
    g_sim = (X * coef[:, None]).T @ Y
    g_dist = -(D * coef[:, None]).T @ D
    eye = np.eye(dist_mat.shape[0])
    g_dist += gamma * (dist_mat - eye)
    g_sim += gamma * (sim_mat - eye)
    return g_dist, g_sim


def _symmetrize(mat: np.ndarray) -> np.ndarray:
    return (mat + mat.T) / 2.0


def project_psd(mat: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix by clipping negative eigenvalues of the symmetric part."""
    sym = _symmetrize(mat)
    vals, vecs = np.linalg.eigh(sym)
    if vals[0] >= 0.0:
        return sym
    return (vecs * np.clip(vals, 0.0, None)) @ vecs.T


def fit_feature_projection(vectors: np.ndarray, out_dim: int) -> np.ndarray:
    """PCA-style projection (out_dim x D) fit on the given training features."""
    centered = vectors - vectors.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return vt[:out_dim]


def _assemble(
    pairs: Sequence[LabeledPair], store: FeatureStore, cfg: TrainConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray | None]:
    X = np.vstack([store.vector(p.header_id) for p in pairs])
    Y = np.vstack([store.vector(p.follower_id) for p in pairs])
    labels = np.array([p.label for p in pairs], dtype=np.float64)
    if cfg.multiplicity_weighting:
        weights = np.array([p.count for p in pairs], dtype=np.float64)
    else:
        weights = np.ones(len(pairs))
    projection = None
    if cfg.projection_dim is not None and cfg.projection_dim < X.shape[1]:
        projection = fit_feature_projection(np.vstack([X, Y]), cfg.projection_dim)
        X = X @ projection.T
        Y = Y @ projection.T
    return X, Y, labels, weights, projection


def train_asml(
    pairs: Sequence[LabeledPair],
    store: FeatureStore,
    cfg: TrainConfig = TrainConfig(),
    gamma: float = 0.1,
    symmetric_sim: bool = False,
) -> MetricModel:
    """Fit the asymmetric (or, with ``symmetric_sim``, symmetric) scoring model.

    Starts at identity matrices, takes subgradient steps on the hinge part
    and exact proximal steps on the regularizer, and returns the iterate with
    the lowest full objective seen (never worse than the initialization).
    """
    variant = VARIANT_SML if symmetric_sim else VARIANT_ASML
    if not pairs:
        if store.dim is None:
            raise TrainingError("cannot size the model: no pairs and empty store")
        dim = cfg.projection_dim or store.dim
        eye = np.eye(dim)
        model = MetricModel(variant, eye.copy(), eye.copy(), gamma=gamma)
        model.history = []
        return model

    X, Y, labels, weights, projection = _assemble(pairs, store, cfg)
    if not (np.any(labels > 0) and np.any(labels < 0)):
        raise TrainingError("training pairs must contain both labels")
    dim = X.shape[1]
    eye = np.eye(dim)
    dist_mat = eye.copy()
    sim_mat = eye.copy()

    def full_objective(dm: np.ndarray, sm: np.ndarray) -> float:
        return hinge_objective(dm, sm, X, Y, labels, weights, gamma)

    best_obj = full_objective(dist_mat, sim_mat)
    best = (dist_mat.copy(), sim_mat.copy())
    history = [best_obj]

    rng = random.Random(cfg.seed)
    n = len(pairs)
    batch = n if cfg.batch_size is None else min(cfg.batch_size, n)
    step_count = 0
    for _ in range(cfg.epochs):
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            step_count += 1
            lr = cfg.learning_rate / np.sqrt(step_count) if cfg.lr_decay else cfg.learning_rate
            g_dist, g_sim = hinge_gradient(
                dist_mat, sim_mat, X[idx], Y[idx], labels[idx], weights[idx], 0.0
            )
            dist_mat = dist_mat - lr * g_dist
            sim_mat = sim_mat - lr * g_sim
            # exact prox of (gamma/2)||A - I||_F^2: shrink toward identity
            shrink = 1.0 / (1.0 + lr * gamma)
            dist_mat = eye + (dist_mat - eye) * shrink
            sim_mat = eye + (sim_mat - eye) * shrink
            dist_mat = _symmetrize(dist_mat)
            if symmetric_sim:
                sim_mat = _symmetrize(sim_mat)
        if cfg.psd_projection:
            dist_mat = project_psd(dist_mat)
        obj = full_objective(dist_mat, sim_mat)
        if not np.isfinite(obj):
            raise TrainingError(
                f"objective diverged at step {step_count}; lower the learning rate"
            )
        history.append(obj)
        if obj < best_obj:
            best_obj = obj
            best = (dist_mat.copy(), sim_mat.copy())

    model = MetricModel(
        variant, best[0], best[1], gamma=gamma, projection=projection
    )
    model.history = history
    return model


def train_ml(
    pairs: Sequence[LabeledPair],
    store: FeatureStore,
    cfg: TrainConfig = TrainConfig(),
) -> MetricModel:
    """Fit the distance-only model.

    Minimizes the positive-pair distance mass subject to PSD and a unit lower
    bound on the negative-pair distance mass, via an increasing quadratic
    penalty with per-round PSD projection; the returned matrix is rescaled so
    the dissimilarity constraint holds exactly.
    """
    if not pairs:
        raise TrainingError("ml training needs labeled pairs")
    X, Y, labels, weights, projection = _assemble(pairs, store, cfg)
    pos = labels > 0
    neg = labels < 0
    if not (np.any(pos) and np.any(neg)):
        raise TrainingError("training pairs must contain both labels")
    D = X - Y
    # sum of weighted outer products of pair differences, per label side
    c_pos = (D[pos] * weights[pos][:, None]).T @ D[pos]
    c_neg = (D[neg] * weights[neg][:, None]).T @ D[neg]
    neg_scale = float(np.trace(c_neg))
    if neg_scale <= 0.0:
        raise TrainingError(
            "all negative pairs coincide; the dissimilarity constraint is infeasible"
        )
    dim = X.shape[1]
    mat = np.eye(dim) / neg_scale  # feasible start with the constraint tight

    def constraint(m: np.ndarray) -> float:
        return float(np.sum(c_neg * m))

    def objective(m: np.ndarray) -> float:
        return float(np.sum(c_pos * m))

    scale = max(float(np.abs(c_pos).max()), float(np.abs(c_neg).max()), 1e-12)
    for rho in (1.0, 10.0, 100.0, 1e3, 1e4, 1e5):
        lr = 1.0 / (scale * (1.0 + rho))
        for _ in range(200):
            gap = max(0.0, 1.0 - constraint(mat))
            grad = c_pos - 2.0 * rho * gap * c_neg
            mat = project_psd(mat - lr * grad)
        val = constraint(mat)
        if val > 0.0:
            mat = mat / val  # exact rescale keeps PSD, tightens the constraint
    val = constraint(mat)
    if val <= 0.0:
        raise TrainingError("penalty solve collapsed the metric; input may be degenerate")
    mat = mat / val
    model = MetricModel(
        VARIANT_ML, mat, np.eye(dim), gamma=0.0, projection=projection
    )
    model.history = [objective(mat)]
    return model


# ---------------------------------------------------------------------------
# model persistence: plain text, %.17g round-trips float64 exactly
# ---------------------------------------------------------------------------

_MODEL_MAGIC = "fontpair-metric-model v1"


def save_model(model: MetricModel, path: str | Path) -> None:
    lines = [
        f"# {_MODEL_MAGIC}",
        f"variant {model.variant}",
        f"dim {model.dim}",
        f"gamma {model.gamma:.17g}",
        f"threshold {model.threshold:.17g}",
    ]
    if model.projection is None:
        lines.append("projection 0 0")
    else:
        rows, cols = model.projection.shape
        lines.append(f"projection {rows} {cols}")
        lines.extend(" ".join(f"{v:.17g}" for v in row) for row in model.projection)
    for mat in (model.dist_mat, model.sim_mat):
        lines.extend(" ".join(f"{v:.17g}" for v in row) for row in mat)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> MetricModel:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    lines = [ln for ln in text if ln.strip() and not ln.startswith("#")]

    def take(prefix: str) -> str:
        line = lines.pop(0)
        key, _, value = line.partition(" ")
        if key != prefix:
            raise ValueError(f"malformed model file: expected {prefix!r}, got {key!r}")
        return value

    variant = take("variant")
    dim = int(take("dim"))
    gamma = float(take("gamma"))
    threshold = float(take("threshold"))
    proj_rows, proj_cols = (int(v) for v in take("projection").split())

    def read_matrix(rows: int, cols: int) -> np.ndarray:
        if len(lines) < rows:
            raise ValueError("truncated model file")
        block = [lines.pop(0) for _ in range(rows)]
        mat = np.array([[float(v) for v in row.split()] for row in block])
        if mat.shape != (rows, cols):
            raise ValueError("malformed matrix block in model file")
        return mat

    projection = read_matrix(proj_rows, proj_cols) if proj_rows else None
    dist_mat = read_matrix(dim, dim)
    sim_mat = read_matrix(dim, dim)
    if lines:
        raise ValueError("trailing content in model file")
    return MetricModel(
        variant, dist_mat, sim_mat, gamma=gamma, threshold=threshold, projection=projection
    )
