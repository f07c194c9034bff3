"""Certify first-kind / QND conditions on a measurement model.

Every checker returns a :class:`ConditionReport` whose ``violation`` is the
max-norm residual of the corresponding identity; ``verdict`` is
``violation <= tolerance``.

Hierarchy (each implies the next):

* strong: ``u[ij, kl] = 0`` whenever ``i != k`` (independent of a and b)
* moderate: ``sum_j conj(M[i,j,k]) M[i,j,k'] = delta_ki delta_k'i`` with
  ``M[i,j,k] = sum_l u[ij, kl] b_l`` (depends on the probe state only)
* weak: ``sum_j |c_ij|^2 = |a_i|^2`` (depends on both states)
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from ._backend import kernels
from ._kernels_py import first_max
from .errors import ConsistencyError, DimensionError

CONDITIONS = ("weak", "moderate", "strong", "vaidman", "conserve_system",
              "conserve_interaction")


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    violation: float
    tolerance: float
    verdict: bool
    witness: tuple = ()
    note: str = ""

    def to_dict(self):
        return {
            "condition": self.condition,
            "violation": self.violation,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "witness": list(self.witness),
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["condition"], float(d["violation"]), float(d["tolerance"]),
                   bool(d["verdict"]), tuple(d.get("witness", ())), d.get("note", ""))


def _report(name, violation, tol, witness=(), note=""):
    violation = float(violation)
    return ConditionReport(name, violation, float(tol), violation <= tol, tuple(witness), note)


def _unitary_dims(u, b):
    u = np.ascontiguousarray(u, dtype=complex)
    d_p = len(b)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] % d_p:
        raise DimensionError(f"interaction of shape {u.shape} does not factor over d_P={d_p}")
    return u, u.shape[0] // d_p


def weak_violation(model, tol=linalg.DEFAULT_TOL):
    """``max_i |sum_j |c_ij|^2 - |a_i|^2|``; witness is the system index ``i``."""
    value, i = kernels.weak_residual(model.u, model.a, model.b)
    return _report("weak", value, tol, (i,))


def weak_residual(u, a, b):
    """Raw weak residual for arbitrary (unvalidated) unit vectors; used by search."""
    return kernels.weak_residual(u, a, b)


def moderate_violation(u, b, tol=linalg.DEFAULT_TOL):
    """Moderate-condition residual; witness is ``(k, k', i)``."""
    b = np.ascontiguousarray(linalg.make_state(b), dtype=complex)
    u, d_s = _unitary_dims(u, b)
    value, k, k2, i = kernels.moderate_residual(u, b, d_s)
    return _report("moderate", value, tol, (k, k2, i))


def strong_violation(u, d_system, tol=linalg.DEFAULT_TOL):
    """Largest ``|u[ij, kl]|`` with ``i != k``; witness is ``(i, j, k, l)``."""
    u = np.asarray(u, dtype=complex)
    d_p = u.shape[0] // d_system
    t = np.abs(linalg.to_tensor(u, d_system, d_p))
    off = t.copy()
    idx = np.arange(d_system)
    off[idx, :, idx, :] = 0.0
    witness = tuple(int(x) for x in np.unravel_index(first_max(off), off.shape))
    return _report("strong", off.max(), tol, witness)


def conserve_system(q, h_system, tol=linalg.DEFAULT_TOL):
    """``[Q, H_S] = 0``: the measured observable is a constant of motion."""
    return _report("conserve_system", linalg.commutator_norm(q, h_system), tol)


def conserve_interaction(q, h_interaction, tol=linalg.DEFAULT_TOL):
    """``[Q ⊗ I, H_I] = 0`` on the joint space."""
    q = linalg.as_matrix(q, "Q")
    h = linalg.as_matrix(h_interaction, "H_I")
    if h.shape[0] % q.shape[0]:
        raise DimensionError(f"H_I of shape {h.shape} does not factor over d_S={q.shape[0]}")
    return _report("conserve_interaction",
                   linalg.commutator_norm(linalg.lift_system(q, h.shape[0] // q.shape[0]), h), tol)


def vaidman_violation(q, h_interaction, a, b, tol=linalg.DEFAULT_TOL):
    """``|| [Q ⊗ I, H_I] (a ⊗ b) ||``.

    The commutator acts on the joint space, so it is applied to the product
    state with the supplied probe state rather than to the system ket alone.
    """
    q = linalg.as_matrix(q, "Q")
    a = linalg.make_state(a, q.shape[0], "system_state")
    b = linalg.make_state(b, name="probe_state")
    h = linalg.as_matrix(h_interaction, "H_I")
    if h.shape[0] != q.shape[0] * len(b):
        raise DimensionError(f"H_I of shape {h.shape} vs d_S={q.shape[0]}, d_P={len(b)}")
    comm = linalg.commutator(linalg.lift_system(q, len(b)), h)
    value = np.linalg.norm(comm @ np.kron(a, b))
    return _report("vaidman", value, tol, note="evaluated on the joint product state a⊗b")


def implication_report(model, tol=linalg.DEFAULT_TOL):
    """Strong, moderate and weak reports, plus a check of the implication chain.

    Raises
    ------
    ConsistencyError
        If a stronger condition passes while a weaker one fails.
    """
    strong = strong_violation(model.u, model.d_system, tol)
    moderate = moderate_violation(model.u, model.b, tol)
    weak = weak_violation(model, tol)
    if strong.verdict and not moderate.verdict:
        raise ConsistencyError(f"strong passes but moderate fails ({moderate.violation:.3g})")
    if moderate.verdict and not weak.verdict:
        raise ConsistencyError(f"moderate passes but weak fails ({weak.violation:.3g})")
    return [strong, moderate, weak]


def classify_measurement(weak_report, q, h_system, tol=linalg.DEFAULT_TOL):
    """``"not-FK"``, ``"FK-only"`` or ``"QND"``."""
    if not weak_report.verdict:
        return "not-FK"
    return "QND" if conserve_system(q, h_system, tol).verdict else "FK-only"

