"""Dense complex linear algebra on small Hilbert spaces.

Conventions used throughout the package:

* hbar = 1, so a Hamiltonian ``H`` generates ``U = exp(-i H t)``.
* The joint space of system (dimension ``d_S``) and probe (dimension ``d_P``)
  is ordered system-major: basis vector ``|q_i>|r_j>`` has flat index
  ``i * d_P + j``. This is the ordering produced by ``np.kron(a, b)``.
* Deviations are max-entry magnitudes (L-infinity over matrix entries).
"""

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_TOL = 1e-9
MAX_FACTOR_DIM = 64
NORM_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m, name="matrix"):
    """Return ``m`` as a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("entries must be finite", field=name)
    return arr


def _square(m, name):
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_factor_dim(d, name="dimension"):
    if int(d) != d or d < 1:
        raise DimensionError(f"{name} must be a positive integer, got {d!r}")
    if d > MAX_FACTOR_DIM:
        raise DimensionError(f"{name} {d} exceeds the limit of {MAX_FACTOR_DIM}")
    return int(d)


def make_state(amplitudes, dim=None, name="state"):
    """Build a normalized complex state vector.

    Parameters
    ----------
    amplitudes : array_like
        Complex amplitudes in the eigenbasis of the relevant observable.
    dim : int, optional
        Expected dimension; a mismatch raises :class:`DimensionError`.

    Returns
    -------
    ndarray
        1-D complex array with unit Euclidean norm.
    """
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise DimensionError(f"{name} has dimension {vec.shape[0]}, expected {dim}")
    if vec.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("amplitudes must be finite", field=name)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValidationError("zero vector cannot be normalized", field=name)
    return vec / norm


def basis_state(d, k):
    vec = np.zeros(d, dtype=complex)
    vec[k] = 1.0
    return vec


def flat_index(i, j, d_probe):
    """Flat joint index of ``|q_i>|r_j>``."""
    if not (0 <= j < d_probe) or i < 0:
        raise DimensionError(f"index pair ({i}, {j}) out of range for d_P={d_probe}")
    return i * d_probe + j


def split_index(flat, d_probe):
    """Inverse of :func:`flat_index`."""
    if flat < 0:
        raise DimensionError(f"negative flat index {flat}")
    return divmod(flat, d_probe)


def is_unitary(m, tol=DEFAULT_TOL):
    """Return ``(ok, deviation)`` with deviation = max |M^dag M - I|."""
    m = _square(m, "matrix")
    dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    return dev <= tol, dev


def is_hermitian(m, tol=DEFAULT_TOL):
    """Return ``(ok, deviation)`` with deviation = max |M - M^dag|."""
    m = _square(m, "matrix")
    dev = float(np.max(np.abs(m - m.conj().T)))
    return dev <= tol, dev


def commutator(a, b):
    a = _square(a, "A")
    b = _square(b, "B")
    if a.shape != b.shape:
        raise DimensionError(f"commutator of {a.shape} and {b.shape} matrices")
    return a @ b - b @ a


def commutator_norm(a, b):
    """Max-entry magnitude of ``AB - BA``."""
    return float(np.max(np.abs(commutator(a, b))))


def hermitian_expm(h, t):
    """Unitary ``exp(-i H t)`` of a Hermitian ``H`` via its eigendecomposition."""
    h = _square(h, "hamiltonian")
    ok, dev = is_hermitian(h, DEFAULT_TOL)
    if not ok:
        raise ValidationError(f"not Hermitian (deviation {dev:.3g})", field="hamiltonian")
    # symmetrize so eigh sees an exactly Hermitian input
    evals, evecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def lift_system(op, d_probe):
    """``op ⊗ I`` on the system-major joint space."""
    return np.kron(as_matrix(op, "operator"), np.eye(d_probe))


def lift_probe(op, d_system):
    """``I ⊗ op`` on the system-major joint space."""
    return np.kron(np.eye(d_system), as_matrix(op, "operator"))


def to_tensor(u, d_system, d_probe):
    """View a joint-space matrix as ``T[i, j, k, l] = <q_i r_j| U |q_k r_l>``."""
    u = np.asarray(u)
    n = d_system * d_probe
    if u.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix, got {u.shape}")
    return u.reshape(d_system, d_probe, d_system, d_probe)


def haar_unitary(d, rng):
    """Haar-random ``d x d`` unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_state(d, rng):
    """Uniformly random unit vector in ``C^d``."""
    return make_state(rng.standard_normal(d) + 1j * rng.standard_normal(d))
