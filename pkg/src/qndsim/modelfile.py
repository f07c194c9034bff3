"""JSON model files and machine-readable reports.

Complex numbers are ``[re, im]`` pairs. Matrices are lists of rows (a flat
row-major list of ``n*n`` pairs is also accepted on input). The joint space is
system-major: row/column ``i * d_P + j`` is ``|q_i>|r_j>``.

Model file layout::

    {
      "system": {"dim": 2, "q_values": [0, 1], "hamiltonian": <matrix, optional>},
      "probe": {"dim": 2, "r_values": [0, 1]},
      "system_state": [[0.6, 0], [0.8, 0]],
      "probe_state": [[1, 0], [0, 0]],
      "interaction": {"kind": "matrix", "matrix": <matrix>}
                   | {"kind": "hamiltonian", "hamiltonian": {"matrix": <matrix>, "time": 1.0}}
                   | {"kind": "builtin", "builtin": {"name": "cnot_readout", "params": {"d": 2}}},
      "estimator": {"kind": "conditional_mean"} | {"kind": "table", "table": [0.0, 1.0]},
      "budgets": {"epsilon": 0.1, "i_min": 0.5},
      "tolerance": 1e-9
    }

For builtin interactions ``system``, ``probe`` and the states are optional and
default to the builtin's own.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__, linalg, models
from .conditions import ConditionReport
from .errors import DimensionError, ModelFileError, QndError, ValidationError
from .estimation import EstimationReport
from .measurement import MeasurementModel, Observable
from .search import SearchResult

STATE_NORM_TOL = 1e-6
INTERACTION_KINDS = ("matrix", "hamiltonian", "builtin")


@dataclass(frozen=True, eq=False)
class LoadedModel:
    model: MeasurementModel
    estimator: np.ndarray = None  # None selects the conditional mean
    epsilon: float = None
    i_min: float = None
    tolerance: float = linalg.DEFAULT_TOL
    h_interaction: np.ndarray = None
    h_system: np.ndarray = None
    digest: str = ""
    source: str = ""

    @property
    def has_budgets(self):
        return self.epsilon is not None and self.i_min is not None


def complex_list(data, where):
    try:
        out = np.array([complex(float(re), float(im)) for re, im in data])
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"{where}: expected a list of [re, im] pairs ({exc})") from None
    if not np.all(np.isfinite(out)):
        raise ValidationError("entries must be finite", field=where)
    return out


def complex_matrix(data, where, n=None):
    if not isinstance(data, list) or not data:
        raise ModelFileError(f"{where}: expected a non-empty matrix")
    if isinstance(data[0], list) and data[0] and isinstance(data[0][0], list):
        rows = [complex_list(row, where) for row in data]
        if len({len(r) for r in rows}) != 1:
            raise ModelFileError(f"{where}: ragged rows")
        mat = np.array(rows)
    else:
        flat = complex_list(data, where)
        side = int(round(np.sqrt(flat.size)))
        if side * side != flat.size:
            raise ModelFileError(f"{where}: flat matrix of {flat.size} entries is not square")
        mat = flat.reshape(side, side)
    if mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"matrix of shape {mat.shape} is not square", field=where)
    if n is not None and mat.shape != (n, n):
        raise ValidationError(f"expected a {n}x{n} matrix, got {mat.shape}", field=where)
    return mat


def encode_complex(values):
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def encode_matrix(m):
    return [encode_complex(row) for row in np.asarray(m, dtype=complex)]


def _state(data, dim, where):
    vec = complex_list(data, where)
    if vec.size != dim:
        raise ValidationError(f"has {vec.size} amplitudes, expected {dim}", field=where)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ValidationError(f"norm {norm:.9g} is not within {STATE_NORM_TOL} of 1", field=where)
    return vec / norm


def _observable(section, key, where):
    if not isinstance(section, dict):
        raise ModelFileError(f"{where}: expected an object")
    try:
        dim = int(section["dim"])
        values = section.get(key, list(range(dim)))
        obs = Observable(tuple(float(v) for v in values))
    except KeyError as exc:
        raise ModelFileError(f"{where}: missing {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, QndError):
            raise
        raise ModelFileError(f"{where}.{key}: {exc}") from None
    if obs.dim != dim:
        raise ValidationError(f"{obs.dim} values for dim {dim}", field=f"{where}.{key}")
    return obs


def load_model(doc, digest="", source=""):
    """Validate a decoded model-file document."""
    if not isinstance(doc, dict):
        raise ModelFileError("model file must be a JSON object")
    inter = doc.get("interaction")
    if not isinstance(inter, dict) or inter.get("kind") not in INTERACTION_KINDS:
        raise ModelFileError(f"interaction.kind must be one of {INTERACTION_KINDS}")
    kind = inter["kind"]
    populated = [k for k in INTERACTION_KINDS if k in inter]
    if populated != [kind]:
        raise ModelFileError(f"interaction: exactly one of {INTERACTION_KINDS} must be "
                             f"populated and match kind {kind!r}, found {populated}")
    tol = float(doc.get("tolerance", linalg.DEFAULT_TOL))
    h_int = None

    if kind == "builtin":
        entry = inter["builtin"]
        if not isinstance(entry, dict) or "name" not in entry:
            raise ModelFileError("interaction.builtin: needs a name")
        try:
            desc = models.build(entry["name"], entry.get("params", {}))
        except KeyError as exc:
            raise ModelFileError(f"interaction.builtin: unknown name or parameter {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, QndError):
                raise
            raise ModelFileError(f"interaction.builtin.params: {exc}") from None
        base = desc.model
        system = _observable(doc["system"], "q_values", "system") if "system" in doc else base.system
        probe = _observable(doc["probe"], "r_values", "probe") if "probe" in doc else base.probe
        if (system.dim, probe.dim) != (base.d_system, base.d_probe):
            raise ValidationError(f"builtin has dims ({base.d_system}, {base.d_probe})",
                                  field="system.dim")
        u, h_int = base.u, desc.hamiltonian
        a = _state(doc["system_state"], system.dim, "system_state") if "system_state" in doc else base.a
        b = _state(doc["probe_state"], probe.dim, "probe_state") if "probe_state" in doc else base.b
    else:
        for key in ("system", "probe", "system_state", "probe_state"):
            if key not in doc:
                raise ModelFileError(f"missing required field {key!r}")
        system = _observable(doc["system"], "q_values", "system")
        probe = _observable(doc["probe"], "r_values", "probe")
        n = system.dim * probe.dim
        if kind == "matrix":
            u = complex_matrix(inter["matrix"], "interaction.matrix", n)
        else:
            ham = inter["hamiltonian"]
            if not isinstance(ham, dict) or "matrix" not in ham:
                raise ModelFileError("interaction.hamiltonian: needs matrix and time")
            h_int = complex_matrix(ham["matrix"], "interaction.hamiltonian.matrix", n)
            try:
                u = linalg.hermitian_expm(h_int, float(ham.get("time", 1.0)))
            except ValidationError as exc:
                raise ValidationError(str(exc), field="interaction.hamiltonian.matrix") from None
        a = _state(doc["system_state"], system.dim, "system_state")
        b = _state(doc["probe_state"], probe.dim, "probe_state")

    model = MeasurementModel(system, probe, u, a, b, tol=max(tol, linalg.DEFAULT_TOL),
                             name=inter.get("builtin", {}).get("name", kind))

    h_sys = None
    if isinstance(doc.get("system"), dict) and "hamiltonian" in doc["system"]:
        h_sys = complex_matrix(doc["system"]["hamiltonian"], "system.hamiltonian", system.dim)
        ok, dev = linalg.is_hermitian(h_sys, tol)
        if not ok:
            raise ValidationError(f"not Hermitian (deviation {dev:.3g})", field="system.hamiltonian")

    table = None
    est = doc.get("estimator", {"kind": "conditional_mean"})
    if not isinstance(est, dict):
        raise ModelFileError("estimator: expected an object")
    if est.get("kind") == "table":
        try:
            table = np.array([float(x) for x in est["table"]])
        except (KeyError, TypeError, ValueError):
            raise ModelFileError("estimator.table: expected a list of reals") from None
        if table.shape != (probe.dim,):
            raise ValidationError(f"{table.size} entries for {probe.dim} outcomes",
                                  field="estimator.table")
    elif est.get("kind") != "conditional_mean":
        raise ModelFileError("estimator.kind must be 'conditional_mean' or 'table'")

    eps = i_min = None
    if "budgets" in doc:
        if not isinstance(doc["budgets"], dict):
            raise ModelFileError("budgets: expected an object")
        try:
            eps = float(doc["budgets"]["epsilon"])
            i_min = float(doc["budgets"]["i_min"])
        except (KeyError, TypeError, ValueError):
            raise ModelFileError("budgets: needs numeric epsilon and i_min") from None

    return LoadedModel(model, table, eps, i_min, tol, h_int, h_sys, digest, source)


def parse_model(path):
    """Read and validate a model file.

    Raises
    ------
    ModelFileError
        Unreadable or malformed file.
    ValidationError, DimensionError
        Physically inconsistent content; ``field`` names the failing entry.
    """
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: not valid JSON ({exc})") from None
    digest = "sha256:" + hashlib.sha256(raw).hexdigest()
    try:
        return load_model(doc, digest=digest, source=str(path))
    except DimensionError as exc:
        raise ValidationError(str(exc)) from None


def dump_model(model, **extra):
    """Model-file document for ``model`` with an explicit matrix interaction."""
    doc = {
        "system": {"dim": model.d_system, "q_values": list(model.system.values)},
        "probe": {"dim": model.d_probe, "r_values": list(model.probe.values)},
        "system_state": encode_complex(model.a),
        "probe_state": encode_complex(model.b),
        "interaction": {"kind": "matrix", "matrix": encode_matrix(model.u)},
    }
    doc.update(extra)
    return doc


@dataclass(eq=True)
class ReportDocument:
    command: str
    input_digest: str
    tool_version: str = __version__
    exit_code: int = 0
    conditions: list = field(default_factory=list)
    estimation: EstimationReport = None
    classification: str = None
    sampling: dict = None
    search: SearchResult = None

    def to_dict(self):
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "input_digest": self.input_digest,
            "exit_code": self.exit_code,
            "conditions": [r.to_dict() for r in self.conditions],
            "estimation": None if self.estimation is None else self.estimation.to_dict(),
            "classification": self.classification,
            "sampling": self.sampling,
            "search": None if self.search is None else self.search.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            command=d["command"],
            input_digest=d["input_digest"],
            tool_version=d["tool_version"],
            exit_code=int(d["exit_code"]),
            conditions=[ConditionReport.from_dict(r) for r in d["conditions"]],
            estimation=None if d["estimation"] is None else EstimationReport.from_dict(d["estimation"]),
            classification=d["classification"],
            sampling=d["sampling"],
            search=None if d["search"] is None else SearchResult.from_dict(d["search"]),
        )


def emit_report(doc):
    return json.dumps(doc.to_dict(), indent=2, sort_keys=True)


def parse_report(text):
    return ReportDocument.from_dict(json.loads(text))
