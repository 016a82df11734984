"""Generalization certificates for the learnt similarity and separator.

The certificate machinery has four parts: the sample bound X* on the dual
norm of rank-1 feature outer products, a Monte-Carlo estimate of the
Rademacher average of the dual-norm process, closed-form analytic upper
estimates of the same average for each norm kind, and the two deviation
bounds assembled from those ingredients.  A moment-comparison check for
Rademacher sums is included because the analytic estimates lean on it.

All Monte-Carlo work uses counter-based substreams indexed by draw number,
so estimates do not depend on evaluation order and are reproducible.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import philox_generator
from .norms import NormKind, dual_norm_rank1
from .similarity import empirical_similarity_error


@dataclass(frozen=True)
class BoundReport:
    """Everything needed to restate and audit the two deviation bounds.

    r_m_used is the Rademacher value the certificate was assembled with,
    which is the smaller of the empirical and analytic estimates.
    empirical_error is the training similarity error that theorem2_bound
    builds on.
    """

    norm_kind: NormKind
    x_star: float
    r_m_empirical: float
    r_m_std_error: float
    r_m_analytic: float
    r_m_used: float
    empirical_error: float
    delta: float
    m: int
    lam: float
    margin: float
    theorem1_bound: float
    theorem2_bound: float
    mc_draws: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.x_star < 0 or self.r_m_empirical < 0:
            raise ValueError("x_star and r_m_empirical must be nonnegative")


def x_star(data, kind):
    """Largest dual norm of x x2^T over sample pairs, via rank-1 identities."""
    kind = NormKind(kind)
    max_inf = float(np.max(np.abs(data.features)))
    max_two = float(np.max(np.linalg.norm(data.features, axis=1)))
    if kind is NormKind.L1:
        return max_inf ** 2
    if kind is NormKind.MIXED21:
        return max_inf * max_two
    return max_two ** 2


def rademacher_empirical(data, kind, mc_draws, seed=0):
    """Monte-Carlo estimate of the dual-norm Rademacher average.

    Each draw samples one sign vector from its own substream, forms
    v = (1/m) sum_i sigma_i y_i x_i, and evaluates the sup over the sample
    by the rank-1 dual identity against the sample point of largest vector
    norm.  Returns (mean, standard error) over draws, reduced in draw order.
    """
    kind = NormKind(kind)
    if mc_draws < 1:
        raise ValueError(f"mc_draws must be at least 1, got {mc_draws}")
    if data.m < 1:
        raise ValueError("data must be nonempty")
    if kind is NormKind.L1:
        ref_scores = np.max(np.abs(data.features), axis=1)
    else:
        ref_scores = np.linalg.norm(data.features, axis=1)
    x_ref = data.features[int(np.argmax(ref_scores))]
    values = np.empty(mc_draws)
    for draw in range(mc_draws):
        rng = philox_generator(seed, stream=draw)
        sigma = rng.integers(0, 2, size=data.m).astype(float) * 2.0 - 1.0
        v = (sigma * data.labels) @ data.features / data.m
        values[draw] = dual_norm_rank1(v, x_ref, kind)
    estimate = float(np.mean(values))
    if mc_draws == 1:
        return estimate, 0.0
    return estimate, float(np.std(values, ddof=1) / math.sqrt(mc_draws))


def _analytic_estimate(kind, max_inf, max_two, sum_sq_two, m, d):
    """Closed-form upper estimates with the sample maxima already extracted.

    Kept separate from rademacher_analytic so the formulas can be probed at
    arbitrary real m in tests.
    """
    kind = NormKind(kind)
    if kind is NormKind.L1:
        return 2.0 * max_inf ** 2 * math.sqrt(math.e * math.log(d + 1) / m)
    if kind is NormKind.FROBENIUS:
        return 2.0 * max_two ** 2 * math.sqrt(1.0 / m)
    if kind is NormKind.MIXED21:
        return 2.0 * max_two * max_inf * math.sqrt(math.e * math.log(d + 1) / m)
    return max_two * math.sqrt(sum_sq_two) / m


def rademacher_analytic(data, kind):
    """Per-kind closed-form upper estimate with suprema over the sample."""
    if data.m < 1:
        raise ValueError("data must be nonempty")
    row_norms = np.linalg.norm(data.features, axis=1)
    return _analytic_estimate(
        kind,
        float(np.max(np.abs(data.features))),
        float(np.max(row_norms)),
        float(np.sum(row_norms ** 2)),
        data.m,
        data.d,
    )


def _check_bound_params(margin, lam, delta, m):
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")


def theorem1_bound(x_star_value, r_m, margin, lam, delta, m):
    """Deviation bound on the similarity error gap."""
    _check_bound_params(margin, lam, delta, m)
    tail = (2.0 * x_star_value / (margin * lam)) * math.sqrt(2.0 * math.log(1.0 / delta) / m)
    return 6.0 * r_m / (margin * lam) + tail


def theorem2_bound(e_z_of_a, x_star_value, r_m, margin, lam, delta, m):
    """Bound on the separator's population hinge error."""
    _check_bound_params(margin, lam, delta, m)
    if e_z_of_a < 0:
        raise ValueError(f"e_z_of_a must be nonnegative, got {e_z_of_a}")
    tail = (2.0 * x_star_value / (margin * lam)) * math.sqrt(2.0 * math.log(1.0 / delta) / m)
    return e_z_of_a + 4.0 * r_m / (margin * lam) + tail


def khinchin_check(f, p, q, mode="exact", mc_draws=100000, seed=0):
    """Compare moments of the Rademacher sum sum_i sigma_i f_i.

    Returns (lhs, rhs, holds) where lhs is the q-th moment root, rhs is
    sqrt((q-1)/(p-1)) times the p-th moment root, and holds reports
    lhs <= rhs + 1e-12.  Exact mode enumerates all 2^n sign vectors and is
    limited to n <= 20; mc mode samples sign vectors instead.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.shape[0] < 1:
        raise ValueError(f"f must be a nonempty vector, got shape {f.shape}")
    if not (1.0 < p < q):
        raise ValueError(f"need 1 < p < q, got p={p}, q={q}")
    n = f.shape[0]
    if mode == "exact":
        if n > 20:
            raise ValueError(f"exact mode enumerates 2^n sign vectors; n={n} exceeds 20")
        sums = np.zeros(1)
        for value in f:
            sums = np.concatenate([sums + value, sums - value])
    elif mode == "mc":
        if mc_draws < 1:
            raise ValueError(f"mc_draws must be at least 1, got {mc_draws}")
        rng = philox_generator(seed)
        signs = rng.integers(0, 2, size=(mc_draws, n)).astype(float) * 2.0 - 1.0
        sums = signs @ f
    else:
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    magnitudes = np.abs(sums)
    lhs = float(np.mean(magnitudes ** q) ** (1.0 / q))
    rhs = math.sqrt((q - 1.0) / (p - 1.0)) * float(np.mean(magnitudes ** p) ** (1.0 / p))
    return lhs, rhs, bool(lhs <= rhs + 1e-12)


def build_bound_report(model, data, delta=0.05, mc_draws=1000, seed=0):
    """Assemble both deviation bounds for a trained model on its sample.

    The certificate uses the smaller of the empirical and analytic
    Rademacher estimates; both are recorded, along with the Monte-Carlo
    standard error, so the choice can be audited.
    """
    if model.d != data.d:
        raise ValueError(f"model dimension {model.d} does not match data dimension {data.d}")
    lam = model.config.lam
    margin = model.config.margin
    kind = model.config.norm_kind
    x_s = x_star(data, kind)
    r_emp, r_se = rademacher_empirical(data, kind, mc_draws, seed)
    r_ana = rademacher_analytic(data, kind)
    r_used = min(r_emp, r_ana)
    e_z = empirical_similarity_error(model.matrix, data, margin)
    return BoundReport(
        norm_kind=kind,
        x_star=x_s,
        r_m_empirical=r_emp,
        r_m_std_error=r_se,
        r_m_analytic=r_ana,
        r_m_used=r_used,
        empirical_error=e_z,
        delta=delta,
        m=data.m,
        lam=lam,
        margin=margin,
        theorem1_bound=theorem1_bound(x_s, r_used, margin, lam, delta, data.m),
        theorem2_bound=theorem2_bound(e_z, x_s, r_used, margin, lam, delta, data.m),
        mc_draws=mc_draws,
        seed=seed,
    )


REPORT_FIELDS = (
    "norm_kind",
    "x_star",
    "r_m_empirical",
    "r_m_std_error",
    "r_m_analytic",
    "r_m_used",
    "empirical_error",
    "delta",
    "m",
    "lambda",
    "margin",
    "theorem1_bound",
    "theorem2_bound",
    "mc_draws",
    "seed",
)


def report_to_json_dict(report):
    return {
        "norm_kind": report.norm_kind.value,
        "x_star": report.x_star,
        "r_m_empirical": report.r_m_empirical,
        "r_m_std_error": report.r_m_std_error,
        "r_m_analytic": report.r_m_analytic,
        "r_m_used": report.r_m_used,
        "empirical_error": report.empirical_error,
        "delta": report.delta,
        "m": report.m,
        "lambda": report.lam,
        "margin": report.margin,
        "theorem1_bound": report.theorem1_bound,
        "theorem2_bound": report.theorem2_bound,
        "mc_draws": report.mc_draws,
        "seed": report.seed,
    }


def save_report(report, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report_to_json_dict(report), handle, indent=2)
        handle.write("\n")


def _csv_cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, NormKind):
        return value.value
    return str(value)


def report_csv_header():
    return ",".join(REPORT_FIELDS)


def report_csv_row(report):
    doc = report_to_json_dict(report)
    return ",".join(_csv_cell(doc[field]) for field in REPORT_FIELDS)
