"""Stage one: learn a symmetric bilinear similarity matrix.

The similarity score of a pair is K_A(x, x') = x^T A x'.  Training minimizes
the average hinge loss of the per-example margin

    (1/m) sum_i [ 1 - (1/(m r)) sum_j y_i y_j K_A(x_i, x_j) ]_+

plus ``lam * norm(A, norm_kind)``, by proximal subgradient descent started at
A = 0.  The inner sum deliberately includes the j = i self pair.  Because the
objective at zero is exactly 1 and the best iterate is returned, the learnt
matrix always satisfies norm(A) <= 1/lam.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .norms import NormKind, norm, prox, require_symmetric, symmetrize


@dataclass(frozen=True)
class SimilarityConfig:
    """Hyperparameters for the regularized similarity problem and its solver.

    lam and margin are the weights in the objective; the remaining fields
    control the proximal subgradient iteration (step size step0/sqrt(t),
    best-iterate tracking, early stop once the best objective improves by
    less than rel_tol relative over a 50-iteration window).
    """

    lam: float
    margin: float
    norm_kind: NormKind
    max_iters: int = 2000
    step0: float = 1.0
    rel_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.margin > 0:
            raise ValueError(f"margin must be positive, got {self.margin}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.step0 > 0:
            raise ValueError(f"step0 must be positive, got {self.step0}")
        if not self.rel_tol >= 0:
            raise ValueError(f"rel_tol must be nonnegative, got {self.rel_tol}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class SimilarityModel:
    """A learnt similarity matrix together with its training provenance."""

    matrix: np.ndarray
    config: SimilarityConfig
    final_objective: float
    iterations_run: int

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        require_symmetric(matrix)
        object.__setattr__(self, "matrix", matrix)

    @property
    def d(self):
        return self.matrix.shape[0]


def _check_pair_dims(a, x, x2):
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"similarity matrix must be square, got shape {a.shape}")
    if x.shape != (a.shape[0],) or x2.shape != (a.shape[0],):
        raise ValueError(
            f"vectors of shape {x.shape} and {x2.shape} do not match matrix dimension {a.shape[0]}"
        )
    return a, x, x2


def similarity_score(a, x, x2):
    """Bilinear score x^T a x2."""
    a, x, x2 = _check_pair_dims(a, x, x2)
    return float(x @ a @ x2)


def _check_data_dims(a, data):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"similarity matrix must be square, got shape {a.shape}")
    if a.shape[0] != data.d:
        raise ValueError(f"matrix dimension {a.shape[0]} does not match data dimension {data.d}")
    return a


def _pair_margins(a, data, margin):
    # The inner sum over j collapses to a single matrix-vector product:
    # sum_j y_j x_j enters once for the whole dataset.
    w = data.features.T @ data.labels
    scores = data.features @ (a @ w)
    return data.labels * scores / (data.m * margin)


def empirical_similarity_error(a, data, margin):
    """Average hinge loss of the pairwise margins on the sample itself."""
    a = _check_data_dims(a, data)
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    hinges = np.maximum(0.0, 1.0 - _pair_margins(a, data, margin))
    return float(np.mean(hinges))


def true_similarity_error(a, holdout, margin):
    """Plug-in estimate of the population similarity error on held-out data.

    This is the same hinge average, just evaluated on a sample the matrix
    never saw; with a fresh holdout it is a Monte-Carlo estimate of the
    population quantity.
    """
    if holdout.m < 1:
        raise ValueError("holdout must be nonempty")
    return empirical_similarity_error(a, holdout, margin)


def similarity_objective(a, data, config):
    """Hinge term plus lam times the chosen matrix norm."""
    return empirical_similarity_error(a, data, config.margin) + config.lam * norm(
        a, config.norm_kind
    )


def hinge_subgradient(a, data, margin):
    """Subgradient of the hinge term at a.

    Indices whose hinge argument is exactly zero sit at the kink and are
    treated as inactive, so a fully satisfied matrix gets an exact zero.
    """
    a = _check_data_dims(a, data)
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    active = (1.0 - _pair_margins(a, data, margin)) > 0.0
    u = data.features.T @ (data.labels * active)
    w = data.features.T @ data.labels
    outer = np.outer(u, w)
    return -symmetrize(outer) / (data.m ** 2 * margin)


def train_similarity(data, config):
    """Minimize the regularized similarity objective by proximal subgradient.

    Returns the best iterate seen, which by construction never does worse
    than the zero start (objective exactly 1).  Raises NumericalError when
    the objective stops being finite, which indicates a divergent step size.
    """
    _check_data_dims(np.zeros((data.d, data.d)), data)
    a = np.zeros((data.d, data.d))
    best_a = a
    best_obj = similarity_objective(a, data, config)
    window = 50
    window_best = best_obj
    iterations = 0
    for t in range(1, config.max_iters + 1):
        eta = config.step0 / math.sqrt(t)
        g = hinge_subgradient(a, data, config.margin)
        a = prox(a - eta * g, eta * config.lam, config.norm_kind)
        obj = similarity_objective(a, data, config)
        if not math.isfinite(obj):
            raise NumericalError(
                f"non-finite objective at iteration {t}; try a smaller step0 than {config.step0}"
            )
        if obj < best_obj:
            best_obj = obj
            best_a = a
        iterations = t
        if t % window == 0:
            if window_best - best_obj < config.rel_tol * abs(window_best):
                break
            window_best = best_obj
    return SimilarityModel(
        matrix=best_a.copy(),
        config=config,
        final_objective=best_obj,
        iterations_run=iterations,
    )


def model_to_json_dict(model):
    return {
        "dim": model.d,
        "norm_kind": model.config.norm_kind.value,
        "lambda": model.config.lam,
        "margin": model.config.margin,
        "entries": [float(v) for v in model.matrix.ravel()],
        "final_objective": model.final_objective,
        "iterations_run": model.iterations_run,
    }


def save_model(model, path):
    """Serialize to JSON with row-major entries; floats survive exactly."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_json_dict(model), handle, indent=2)
        handle.write("\n")


def model_from_json_dict(doc):
    """Rebuild a model from its JSON document.

    Solver settings are not persisted, so the embedded config carries the
    stored lambda, margin, and norm kind with default solver fields.
    """
    for field in ("dim", "norm_kind", "lambda", "margin", "entries", "final_objective", "iterations_run"):
        if field not in doc:
            raise ValueError(f"model document missing field {field!r}")
    dim = int(doc["dim"])
    entries = np.asarray(doc["entries"], dtype=float)
    if entries.shape != (dim * dim,):
        raise ValueError(f"expected {dim * dim} entries for dim {dim}, got {entries.shape}")
    matrix = entries.reshape(dim, dim)
    config = SimilarityConfig(
        lam=float(doc["lambda"]),
        margin=float(doc["margin"]),
        norm_kind=NormKind(doc["norm_kind"]),
    )
    return SimilarityModel(
        matrix=matrix,
        config=config,
        final_objective=float(doc["final_objective"]),
        iterations_run=int(doc["iterations_run"]),
    )


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_json_dict(json.load(handle))
