"""System + probe + ideal read-out: evolution, Born rule, collapse, ensembles.

A :class:`MeasurementModel` holds the read-out unitary ``u`` on the joint
space (system-major), the eigenvalues of the measured observable ``Q`` and of
the probe read-out ``R``, and the pre-measurement product state ``a ⊗ b``.
Joint amplitudes are returned as a ``(d_S, d_P)`` complex array ``c`` with
``c[i, j] = <q_i r_j| u |a b>``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from ._backend import kernels
from .errors import DimensionError, ImpossibleOutcomeError, ValidationError

P_ZERO = 1e-14
NORM_TOL = 1e-10


@dataclass(frozen=True)
class Observable:
    """Eigenvalues of an observable; its eigenbasis is the computational basis."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DimensionError("observable needs at least one eigenvalue")
        if not all(np.isfinite(vals)):
            raise ValidationError("eigenvalues must be finite", field="values")
        linalg.check_factor_dim(len(vals))
        object.__setattr__(self, "values", vals)
        if self.degenerate:
            warnings.warn(f"degenerate eigenvalues {vals}; outcomes are indexed by basis vector",
                          stacklevel=3)

    @classmethod
    def ladder(cls, d):
        return cls(tuple(range(d)))

    @property
    def dim(self):
        return len(self.values)

    @property
    def degenerate(self):
        return len(set(self.values)) != len(self.values)

    def matrix(self):
        return np.diag(np.asarray(self.values, dtype=complex))


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    system: Observable
    probe: Observable
    u: np.ndarray
    a: np.ndarray
    b: np.ndarray
    tol: float = linalg.DEFAULT_TOL
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        n = self.system.dim * self.probe.dim
        u = linalg.as_matrix(self.u, "interaction.matrix")
        if u.shape != (n, n):
            raise DimensionError(f"interaction must be {n}x{n} for d_S={self.system.dim}, "
                                 f"d_P={self.probe.dim}; got {u.shape}")
        ok, dev = linalg.is_unitary(u, self.tol)
        if not ok:
            raise ValidationError(f"not unitary (deviation {dev:.3g})", field="interaction.matrix")
        object.__setattr__(self, "u", np.ascontiguousarray(u))
        object.__setattr__(self, "a", linalg.make_state(self.a, self.system.dim, "system_state"))
        object.__setattr__(self, "b", linalg.make_state(self.b, self.probe.dim, "probe_state"))
        for arr in (self.u, self.a, self.b):
            arr.setflags(write=False)

    @property
    def d_system(self):
        return self.system.dim

    @property
    def d_probe(self):
        return self.probe.dim

    @property
    def q_values(self):
        return np.asarray(self.system.values)

    def with_states(self, a=None, b=None):
        """Copy of the model with the measured and/or probe state replaced."""
        return MeasurementModel(self.system, self.probe, self.u,
                                self.a if a is None else a,
                                self.b if b is None else b,
                                tol=self.tol, name=self.name)


def _check_amplitudes(c):
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2:
        raise DimensionError(f"joint amplitudes must be 2-D, got shape {c.shape}")
    total = float(np.sum(np.abs(c) ** 2))
    if abs(total - 1.0) > NORM_TOL:
        raise ValidationError(f"joint amplitudes have squared norm {total!r}", field="c")
    return c


def joint_amplitudes(model):
    """Post-interaction amplitudes ``c[i, j] = sum_kl a_k b_l u[ij, kl]``."""
    c = kernels.joint_amplitudes(model.u, model.a, model.b)
    total = float(np.sum(np.abs(c) ** 2))
    if abs(total - 1.0) > NORM_TOL:
        raise ValidationError(f"evolution did not conserve norm ({total!r})")
    return c


def joint_probabilities(c):
    return np.abs(_check_amplitudes(c)) ** 2


def outcome_distribution(c):
    """Born-rule probabilities ``P(r_j) = sum_i |c_ij|^2``."""
    probs = joint_probabilities(c).sum(axis=0)
    probs[probs < 0] = 0.0
    return probs


def collapse(c, j):
    """Reduced joint state after observing probe outcome ``j``.

    Returns
    -------
    state : ndarray
        Normalized joint vector (system-major) with the probe pinned to ``|r_j>``.
    probability : float
        ``P(r_j)``.
    """
    c = _check_amplitudes(c)
    d_s, d_p = c.shape
    if not 0 <= j < d_p:
        raise DimensionError(f"outcome index {j} out of range for d_P={d_p}")
    p = float(np.sum(np.abs(c[:, j]) ** 2))
    if p <= P_ZERO:
        raise ImpossibleOutcomeError(f"outcome {j} has probability {p:.3g}")
    pinned = np.zeros((d_s, d_p), dtype=complex)
    pinned[:, j] = c[:, j] / np.sqrt(p)
    return pinned.reshape(-1), p


@dataclass(frozen=True)
class Branch:
    outcome: int
    probability: float
    state: np.ndarray


@dataclass(frozen=True)
class PostEnsemble:
    """Mixture of collapsed joint states over the observed probe outcomes."""

    d_system: int
    d_probe: int
    branches: tuple

    def density_matrix(self):
        n = self.d_system * self.d_probe
        rho = np.zeros((n, n), dtype=complex)
        for br in self.branches:
            rho += br.probability * np.outer(br.state, br.state.conj())
        return rho

    @property
    def probabilities(self):
        probs = np.zeros(self.d_probe)
        for br in self.branches:
            probs[br.outcome] = br.probability
        return probs


def post_ensemble(c):
    """Post-measurement ensemble; zero-probability outcomes are omitted."""
    c = _check_amplitudes(c)
    d_s, d_p = c.shape
    branches = []
    for j in range(d_p):
        if np.sum(np.abs(c[:, j]) ** 2) > P_ZERO:
            state, p = collapse(c, j)
            branches.append(Branch(j, p, state))
    return PostEnsemble(d_s, d_p, tuple(branches))


def post_density_direct(c):
    """``rho'' = sum_j <r_j|Psi'><Psi'|r_j> ⊗ |r_j><r_j|`` built without collapse."""
    c = _check_amplitudes(c)
    d_s, d_p = c.shape
    rho = np.zeros((d_s * d_p, d_s * d_p), dtype=complex)
    for j in range(d_p):
        proj = np.zeros((d_p, d_p))
        proj[j, j] = 1.0
        rho += np.kron(np.outer(c[:, j], c[:, j].conj()), proj)
    return rho


def reduce_to_system(rho, d_system, d_probe):
    """Partial trace over the probe."""
    return np.einsum("ijkj->ik", np.asarray(rho).reshape(d_system, d_probe, d_system, d_probe))


def q_marginal_pre(a):
    """Distribution of ``Q`` before the measurement, ``|a_i|^2``."""
    return np.abs(linalg.make_state(a)) ** 2


def q_marginal_post(c):
    """Distribution of ``Q`` after the measurement, ``sum_j |c_ij|^2``."""
    return joint_probabilities(c).sum(axis=1)


def q_marginal_reduced(c):
    """Same quantity as :func:`q_marginal_post`, via the diagonal of tr_P rho''."""
    ens = post_ensemble(c)
    red = reduce_to_system(ens.density_matrix(), ens.d_system, ens.d_probe)
    return np.real(np.diagonal(red)).copy()


def sample_outcomes(c, n, seed):
    """Histogram of ``n`` seeded draws from the Born-rule outcome distribution."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    probs = outcome_distribution(c)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, np.random.default_rng(seed).random(n), side="right")
    return np.bincount(np.minimum(draws, len(probs) - 1), minlength=len(probs))
