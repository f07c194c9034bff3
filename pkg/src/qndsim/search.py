"""Multi-restart derivative-free search over measured or probe states.

States are parameterized by ``2d`` real coordinates (real and imaginary parts)
and normalized before evaluation; the objectives are phase and scale
invariant, so the redundancy is harmless. Each restart draws its start point
from its own generator seeded with ``(seed, restart_index)``, so results do
not depend on execution order.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import linalg
from ._backend import kernels
from .conditions import moderate_violation, weak_violation
from .measurement import MeasurementModel, Observable

MAX_ITER = 500
F_TOL = 1e-10
MAX_POLISH = 20


@dataclass(frozen=True)
class SearchResult:
    target: str
    best_state: np.ndarray
    best_value: float
    restarts_used: int
    seed: int
    trace: tuple

    def to_dict(self):
        return {
            "target": self.target,
            "best_state": [[float(z.real), float(z.imag)] for z in self.best_state],
            "best_value": self.best_value,
            "restarts_used": self.restarts_used,
            "seed": self.seed,
            "trace": list(self.trace),
        }

    @classmethod
    def from_dict(cls, d):
        state = np.array([complex(re, im) for re, im in d["best_state"]])
        return cls(d["target"], state, float(d["best_value"]), int(d["restarts_used"]),
                   int(d["seed"]), tuple(float(x) for x in d["trace"]))

    def __eq__(self, other):
        if not isinstance(other, SearchResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _unpack(x, d):
    v = x[:d] + 1j * x[d:]
    n = np.linalg.norm(v)
    return None if n < 1e-300 else v / n


def _local_search(objective, x0):
    """Nelder-Mead, restarted from its own optimum until it stops improving."""
    x, fx = x0, objective(x0)
    for _ in range(MAX_POLISH):
        res = minimize(objective, x, method="Nelder-Mead",
                       options={"maxiter": MAX_ITER, "xatol": 1e-13, "fatol": F_TOL})
        improvement = fx - res.fun
        if res.fun < fx:
            x, fx = res.x, res.fun
        if improvement < F_TOL:
            break
    return x, fx


def _multistart(score, d, restarts, seed, maximize):
    """Optimize ``score(unit_vector)``; returns (best_state, trace)."""
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    sign = -1.0 if maximize else 1.0

    def objective(x):
        v = _unpack(x, d)
        return 1e3 if v is None else sign * score(v)

    states, trace = [], []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x, _ = _local_search(objective, rng.standard_normal(2 * d))
        v = _unpack(x, d)
        states.append(v)
        trace.append(float(score(v)))
    # ties go to the lowest restart index
    best = int(np.argmax(trace) if maximize else np.argmin(trace))
    return states[best], tuple(trace), best


def max_weak_violation(u, b, restarts=8, seed=0):
    """Measured state ``a`` that maximizes the weak-condition violation for probe ``b``."""
    b = np.ascontiguousarray(linalg.make_state(b), dtype=complex)
    u = np.ascontiguousarray(u, dtype=complex)
    d_s = u.shape[0] // len(b)
    state, trace, best = _multistart(lambda a: kernels.weak_residual(u, a, b)[0],
                                     d_s, restarts, seed, maximize=True)
    return SearchResult("weak", state, trace[best], restarts, seed, trace)


def probe_design_search(u, restarts=8, seed=0, target="moderate", a=None, d_system=None):
    """Probe state ``b`` that minimizes the moderate or fixed-``a`` weak violation.

    Parameters
    ----------
    target : {"moderate", "weak"}
        ``"weak"`` minimizes the weak violation for the supplied measured state ``a``.
    d_system : int, optional
        System dimension; inferred from ``a`` or from a square joint space.
    """
    u = np.ascontiguousarray(u, dtype=complex)
    if target == "moderate":
        d_s = _system_dim(u, a, d_system)

        def score(b):
            return kernels.moderate_residual(u, b, d_s)[0]
    elif target == "weak":
        if a is None:
            raise ValueError("target 'weak' needs a measured state a")
        a = np.ascontiguousarray(linalg.make_state(a), dtype=complex)
        d_s = len(a)

        def score(b):
            return kernels.weak_residual(u, a, b)[0]
    else:
        raise ValueError(f"unknown target {target!r}")
    d_p = u.shape[0] // d_s
    state, trace, best = _multistart(score, d_p, restarts, seed, maximize=False)
    return SearchResult(f"probe-{target}", state, trace[best], restarts, seed, trace)


def _system_dim(u, a, d_system):
    if d_system is not None:
        return int(d_system)
    if a is not None:
        return len(a)
    d = int(round(np.sqrt(u.shape[0])))
    if d * d != u.shape[0]:
        raise ValueError("cannot infer d_S for a non-square joint space; pass a")
    return d


def recompute(result, u, a=None, b=None):
    """Re-evaluate a search result's objective through the public checkers."""
    state = result.best_state
    if result.target == "weak":
        d_s = len(state)
        model = MeasurementModel(Observable.ladder(d_s), Observable.ladder(len(b)), u, state, b)
        return weak_violation(model).violation
    if result.target == "probe-moderate":
        return moderate_violation(u, state).violation
    d_s = len(a)
    model = MeasurementModel(Observable.ladder(d_s), Observable.ladder(len(state)), u, a, state)
    return weak_violation(model).violation
