"""Stage two: an L1-constrained linear separator over the learnt similarity.

The separator is f(x) = sum_j alpha_j K_A(x_j, x) anchored at the training
points, with coefficients constrained to the L1 ball of radius 1/margin.
Training starts from alpha0_j = y_j / (m * margin), whose empirical hinge
error coincides with the stage-one similarity error, and projected
subgradient steps can only improve on that.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .similarity import SimilarityModel, model_from_json_dict, model_to_json_dict


@dataclass(frozen=True, eq=False)
class Separator:
    """Coefficients, margin, anchor points, and the similarity model they use."""

    alpha: np.ndarray
    margin: float
    anchor_features: np.ndarray
    model: SimilarityModel

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        anchors = np.asarray(self.anchor_features, dtype=float)
        if alpha.ndim != 1:
            raise ValueError(f"alpha must be a vector, got shape {alpha.shape}")
        if anchors.ndim != 2 or anchors.shape != (alpha.shape[0], self.model.d):
            raise ValueError(
                f"anchor_features shape {anchors.shape} does not match "
                f"{alpha.shape[0]} coefficients of dimension {self.model.d}"
            )
        if not self.margin > 0:
            raise ValueError(f"margin must be positive, got {self.margin}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "anchor_features", anchors)

    @property
    def m(self):
        return self.alpha.shape[0]


def anchor_coefficients(labels, margin):
    """The feasible starting point alpha0 = y / (m * margin)."""
    labels = np.asarray(labels, dtype=float)
    return labels / (labels.shape[0] * margin)


def _values(sep, features):
    if features.shape[1] != sep.model.d:
        raise ValueError(
            f"feature dimension {features.shape[1]} does not match model dimension {sep.model.d}"
        )
    pooled = sep.anchor_features.T @ sep.alpha
    return features @ (sep.model.matrix @ pooled)


def separator_value(sep, x):
    """Evaluate f(x) = sum_j alpha_j K_A(x_j, x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sep.model.d,):
        raise ValueError(f"vector shape {x.shape} does not match model dimension {sep.model.d}")
    return float(_values(sep, x[None, :])[0])


def classify(sep, x):
    """Sign of the separator value; exact zero maps to +1."""
    return 1 if separator_value(sep, x) >= 0.0 else -1


def project_l1_ball(v, radius):
    """Euclidean projection onto the L1 ball by the sort-based threshold rule.

    Inside the ball the input is returned unchanged; otherwise the unique
    theta >= 0 with sum max(|v_j| - theta, 0) = radius is found from the
    sorted absolute values and applied by soft thresholding.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    v = np.asarray(v, dtype=float)
    magnitudes = np.abs(v)
    if magnitudes.sum() <= radius:
        return v.copy()
    u = np.sort(magnitudes)[::-1]
    cumulative = np.cumsum(u)
    counts = np.arange(1, u.shape[0] + 1)
    rho = np.nonzero(u * counts > cumulative - radius)[0][-1]
    theta = (cumulative[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(magnitudes - theta, 0.0)


def empirical_hinge_error(sep, data):
    """(1/m) sum_i [1 - y_i f(x_i)]_+ on the given sample."""
    values = _values(sep, data.features)
    return float(np.mean(np.maximum(0.0, 1.0 - data.labels * values)))


def true_hinge_error(sep, holdout):
    """Plug-in estimate of the population hinge error on held-out data."""
    if holdout.m < 1:
        raise ValueError("holdout must be nonempty")
    return empirical_hinge_error(sep, holdout)


def _hinge_error_and_grad(gram, labels, alpha):
    values = gram @ alpha
    slack = 1.0 - labels * values
    active = slack > 0.0
    err = float(np.mean(np.maximum(0.0, slack)))
    grad = -(gram.T @ (labels * active)) / labels.shape[0]
    return err, grad


def train_separator(model, data, max_iters=2000, step0=1.0, seed=0):
    """Projected subgradient descent for the constrained hinge problem.

    The iteration never leaves the L1 ball of radius 1/margin, and the best
    iterate (including the starting point) is returned, so the result's
    hinge error is at most that of alpha0.
    """
    if model.d != data.d:
        raise ValueError(f"model dimension {model.d} does not match data dimension {data.d}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")
    if not step0 > 0:
        raise ValueError(f"step0 must be positive, got {step0}")
    margin = model.config.margin
    radius = 1.0 / margin
    # gram[i, j] = K_A(x_j, x_i); symmetric because the matrix is.
    gram = data.features @ model.matrix @ data.features.T
    alpha = anchor_coefficients(data.labels, margin)
    best_alpha = alpha
    best_err, grad = _hinge_error_and_grad(gram, data.labels, alpha)
    if not math.isfinite(best_err):
        raise NumericalError("non-finite hinge error at the starting point")
    for t in range(1, max_iters + 1):
        stepped = alpha - (step0 / math.sqrt(t)) * grad
        if not np.all(np.isfinite(stepped)):
            raise NumericalError(
                f"non-finite coefficients at iteration {t}; try a smaller step0 than {step0}"
            )
        alpha = project_l1_ball(stepped, radius)
        err, grad = _hinge_error_and_grad(gram, data.labels, alpha)
        if not math.isfinite(err):
            raise NumericalError(
                f"non-finite hinge error at iteration {t}; try a smaller step0 than {step0}"
            )
        if err < best_err:
            best_err = err
            best_alpha = alpha
    return Separator(
        alpha=best_alpha.copy(),
        margin=margin,
        anchor_features=data.features,
        model=model,
    )


def separator_to_json_dict(sep):
    return {
        "alpha": [float(v) for v in sep.alpha],
        "margin": sep.margin,
        "anchor_features": [float(v) for v in sep.anchor_features.ravel()],
        "model": model_to_json_dict(sep.model),
    }


def save_separator(sep, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(separator_to_json_dict(sep), handle, indent=2)
        handle.write("\n")


def load_separator(path):
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    for field in ("alpha", "margin", "anchor_features", "model"):
        if field not in doc:
            raise ValueError(f"separator document missing field {field!r}")
    model = model_from_json_dict(doc["model"])
    alpha = np.asarray(doc["alpha"], dtype=float)
    anchors = np.asarray(doc["anchor_features"], dtype=float).reshape(alpha.shape[0], model.d)
    return Separator(
        alpha=alpha,
        margin=float(doc["margin"]),
        anchor_features=anchors,
        model=model,
    )
