"""Estimating Q from the observed read-out, and the information gained.

All expectation values are taken in the post-measurement ensemble, whose
joint (Q, R) distribution is ``p_ij = |c_ij|^2``.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DimensionError, DomainError
from .measurement import P_ZERO, joint_probabilities


def conditional_mean_estimator(c, q_values):
    """``f(r_j) = E[Q | R = r_j]``; zero for outcomes that never occur."""
    p = joint_probabilities(c)
    q = _q(q_values, p.shape[0])
    cols = p.sum(axis=0)
    f = np.zeros(p.shape[1])
    live = cols > P_ZERO
    f[live] = (q @ p[:, live]) / cols[live]
    return f


def _q(q_values, d_s):
    q = np.asarray(q_values, dtype=float)
    if q.shape != (d_s,):
        raise DimensionError(f"expected {d_s} eigenvalues of Q, got shape {q.shape}")
    return q


def _f(table, d_p):
    f = np.asarray(table, dtype=float)
    if f.shape != (d_p,):
        raise DimensionError(f"estimator table needs {d_p} entries, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise DomainError("estimator table entries must be finite")
    return f


def _residuals(c, q_values, table):
    p = joint_probabilities(c)
    q = _q(q_values, p.shape[0])
    f = _f(table, p.shape[1])
    return p, q[:, None] - f[None, :]


def bias(c, q_values, table):
    """``sum_ij p_ij (q_i - f(r_j))``; an unbiased estimator gives zero."""
    p, diff = _residuals(c, q_values, table)
    return float(np.sum(p * diff))


def squared_error(c, q_values, table):
    """Mean squared estimation error ``sum_ij p_ij (q_i - f(r_j))^2``."""
    p, diff = _residuals(c, q_values, table)
    return float(np.sum(p * diff ** 2))


def mutual_information(c):
    """Mutual information (nats) between the Q index and the observed R index."""
    return max(0.0, float(kernels.mutual_information(np.ascontiguousarray(joint_probabilities(c)))))


def counter_information_heuristic(n_max, delta_n_err):
    """``ln(n_max / delta_n_err)`` for a counter with response range ``n <= n_max``."""
    if not (n_max >= delta_n_err >= 1):
        raise DomainError(f"need n_max >= delta_n_err >= 1, got {n_max}, {delta_n_err}")
    return float(np.log(n_max / delta_n_err))


def nats_to_bits(x):
    return x / np.log(2.0)


@dataclass(frozen=True)
class EstimationReport:
    estimator: tuple
    bias: float
    squared_error: float
    epsilon: float
    info_nats: float
    i_min: float
    error_ok: bool
    info_ok: bool

    @property
    def ok(self):
        return self.error_ok and self.info_ok

    def to_dict(self):
        return {
            "estimator": list(self.estimator),
            "bias": self.bias,
            "squared_error": self.squared_error,
            "epsilon": self.epsilon,
            "info_nats": self.info_nats,
            "i_min": self.i_min,
            "error_ok": self.error_ok,
            "info_ok": self.info_ok,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(x) for x in d["estimator"]), float(d["bias"]),
                   float(d["squared_error"]), float(d["epsilon"]), float(d["info_nats"]),
                   float(d["i_min"]), bool(d["error_ok"]), bool(d["info_ok"]))


def evaluate_estimation_report(c, q_values, table, epsilon, i_min):
    """Bias, squared error and information with their budget verdicts.

    ``table=None`` selects the conditional-mean estimator.
    """
    if table is None:
        table = conditional_mean_estimator(c, q_values)
    err = squared_error(c, q_values, table)
    info = mutual_information(c)
    return EstimationReport(
        estimator=tuple(float(x) for x in table),
        bias=bias(c, q_values, table),
        squared_error=err,
        epsilon=float(epsilon),
        info_nats=info,
        i_min=float(i_min),
        error_ok=err <= epsilon ** 2,
        info_ok=info >= i_min,
    )
