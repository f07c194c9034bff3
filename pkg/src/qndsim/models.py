"""Builtin read-out interactions with known places in the condition hierarchy.

Each builder returns a :class:`ModelDescriptor`: the validated model with its
default states, the parameters used, and the verdicts (strong, moderate with
the default probe, weak with the default states) the checkers must reproduce.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError
from .measurement import MeasurementModel, Observable


@dataclass(frozen=True, eq=False)
class ModelDescriptor:
    name: str
    params: dict
    expected_profile: dict
    model: MeasurementModel
    hamiltonian: np.ndarray = field(default=None)


def _profile(strong, moderate, weak):
    return {"strong": strong, "moderate": moderate, "weak": weak}


def _need(cond, msg):
    if not cond:
        raise DomainError(msg)


def _perm_unitary(d_s, d_p, target):
    """Permutation matrix sending ``|k, l>`` to ``|target(k, l)>``."""
    n = d_s * d_p
    u = np.zeros((n, n), dtype=complex)
    for k in range(d_s):
        for l in range(d_p):
            i, j = target(k, l)
            u[i * d_p + j, k * d_p + l] = 1.0
    return u


def _uniform(d):
    return np.full(d, 1 / np.sqrt(d), dtype=complex)


def _leading(d, head=(0.6, 0.8)):
    a = np.zeros(d, dtype=complex)
    a[:len(head)] = head[:d]
    return a


def _build(name, params, profile, u, d_s, d_p, a, b, hamiltonian=None):
    model = MeasurementModel(Observable.ladder(d_s), Observable.ladder(d_p), u, a, b, name=name)
    return ModelDescriptor(name, params, profile, model, hamiltonian)


def cnot_readout(d=2, a=None, b=None):
    """``|q_k>|r_l> -> |q_k>|r_{(l+k) mod d}>``: an ideal QND read-out."""
    _need(d >= 2, f"cnot_readout needs d >= 2, got {d}")
    u = _perm_unitary(d, d, lambda k, l: (k, (l + k) % d))
    return _build("cnot_readout", {"d": d}, _profile(True, True, True), u, d, d,
                  _uniform(d) if a is None else a,
                  linalg.basis_state(d, 0) if b is None else b)


def dft_matrix(d):
    idx = np.arange(d)
    return np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)


def phase_probe(d_s=2, d_p=2, g=np.pi, read_in_conjugate_basis=True, a=None, b=None):
    """Phase kick ``exp(-i g Q ⊗ N)`` on the probe, optionally read in the Fourier basis.

    With ``g = 2 pi / d_P`` and a uniform probe, the conjugate-basis read-out
    resolves ``Q mod d_P`` perfectly.
    """
    _need(d_s >= 2 and d_p >= 2, f"phase_probe needs d_S, d_P >= 2, got {d_s}, {d_p}")
    h = g * np.kron(np.diag(np.arange(d_s)), np.diag(np.arange(d_p))).astype(complex)
    u = linalg.hermitian_expm(h, 1.0)
    if read_in_conjugate_basis:
        u = linalg.lift_probe(dft_matrix(d_p), d_s) @ u
    params = {"d_s": d_s, "d_p": d_p, "g": float(g),
              "read_in_conjugate_basis": bool(read_in_conjugate_basis)}
    return _build("phase_probe", params, _profile(True, True, True), u, d_s, d_p,
                  _uniform(d_s) if a is None else a,
                  _uniform(d_p) if b is None else b, hamiltonian=h)


def swap_matrix(d):
    return _perm_unitary(d, d, lambda k, l: (l, k))


def swap_model(d=2, a=None, b=None):
    """Exchange of system and probe: maximal demolition."""
    _need(d >= 2, f"swap_model needs d >= 2, got {d}")
    return _build("swap_model", {"d": d}, _profile(False, False, False), swap_matrix(d), d, d,
                  _leading(d) if a is None else a,
                  linalg.basis_state(d, 0) if b is None else b)


def partial_swap(d=2, theta=np.pi / 4, a=None, b=None):
    """``cos(theta) I + i sin(theta) SWAP``, i.e. ``exp(i theta SWAP)``."""
    _need(d >= 2, f"partial_swap needs d >= 2, got {d}")
    u = np.cos(theta) * np.eye(d * d) + 1j * np.sin(theta) * swap_matrix(d)
    trivial = abs(np.sin(theta)) < 1e-12
    return _build("partial_swap", {"d": d, "theta": float(theta)},
                  _profile(trivial, trivial, trivial), u, d, d,
                  _leading(d) if a is None else a,
                  linalg.basis_state(d, 0) if b is None else b)


def restricted_range_model(d_s=4, d_p=4, n_cut=2, a=None, b=None):
    """QND read-out for ``Q < n_cut``, demolition above it.

    On ``span{|q_i> : i < n_cut} ⊗ probe`` this acts as :func:`cnot_readout`.
    On the complementary sector, with ``m = d_S - n_cut`` and ``x = i - n_cut``,
    it swaps ``x`` with the probe value ``l`` whenever ``l < m`` and acts as the
    identity otherwise, so that sector is invariant and the whole map is a
    permutation.
    """
    _need(d_s == d_p, f"restricted_range_model needs d_S == d_P, got {d_s}, {d_p}")
    _need(1 <= n_cut < d_s, f"need 1 <= n_cut < d_S, got n_cut={n_cut}")
    m = d_s - n_cut
    # a one-dimensional out-of-range sector cannot move probability between Q values
    _need(m >= 2, f"need d_S - n_cut >= 2 for a demolishing sector, got {m}")

    def target(k, l):
        if k < n_cut:
            return k, (l + k) % d_p
        if l < m:
            return n_cut + l, k - n_cut
        return k, l

    u = _perm_unitary(d_s, d_p, target)
    a0 = np.zeros(d_s, dtype=complex)
    a0[:n_cut] = 1 / np.sqrt(n_cut)
    return _build("restricted_range_model", {"d_s": d_s, "d_p": d_p, "n_cut": n_cut},
                  _profile(False, False, True), u, d_s, d_p,
                  a0 if a is None else a,
                  linalg.basis_state(d_p, 0) if b is None else b)


def probe_controlled_flip(d=2, a=None, b=None):
    """``sum_l X^l ⊗ |r_l><r_l|`` with ``X`` the cyclic shift of the system.

    Fails the strong condition, yet probe ``|r_0>`` leaves the system alone,
    so the moderate condition holds for that probe state.
    """
    _need(d >= 2, f"probe_controlled_flip needs d >= 2, got {d}")
    u = _perm_unitary(d, d, lambda k, l: ((k + l) % d, l))
    return _build("probe_controlled_flip", {"d": d}, _profile(False, True, True), u, d, d,
                  _uniform(d) if a is None else a,
                  linalg.basis_state(d, 0) if b is None else b)


BUILTINS = {
    "cnot_readout": cnot_readout,
    "phase_probe": phase_probe,
    "swap_model": swap_model,
    "partial_swap": partial_swap,
    "restricted_range_model": restricted_range_model,
    "probe_controlled_flip": probe_controlled_flip,
}

# parameter schema of each builtin, used by the model-file loader
BUILTIN_PARAMS = {
    "cnot_readout": {"d": int},
    "phase_probe": {"d_s": int, "d_p": int, "g": float, "read_in_conjugate_basis": bool},
    "swap_model": {"d": int},
    "partial_swap": {"d": int, "theta": float},
    "restricted_range_model": {"d_s": int, "d_p": int, "n_cut": int},
    "probe_controlled_flip": {"d": int},
}


def build(name, params=None, a=None, b=None):
    """Build a builtin by name; unknown names or parameters raise ``KeyError``."""
    params = dict(params or {})
    schema = BUILTIN_PARAMS[name]
    unknown = set(params) - set(schema)
    if unknown:
        raise KeyError(f"unknown parameters for {name}: {sorted(unknown)}")
    kwargs = {k: schema[k](v) for k, v in params.items()}
    return BUILTINS[name](a=a, b=b, **kwargs)


def gallery():
    """One descriptor per builtin, with default parameters."""
    return [
        cnot_readout(2),
        cnot_readout(3),
        phase_probe(2, 2, np.pi),
        probe_controlled_flip(2),
        restricted_range_model(4, 4, 2),
        partial_swap(2, np.pi / 4),
        swap_model(2),
    ]
