"""File formats: frame and dual-pair JSON, coefficient CSV and canonical reports."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .core import DEFAULT_TOL, Frame, ToleranceConfig, validate_frame
from .duals import DualPair, canonical_dual, is_dual_pair
from .errors import InputError, IoError, ParseError

__all__ = [
    "Report",
    "to_jsonable",
    "canonical_json",
    "frame_to_dict",
    "frame_from_dict",
    "parse_frame_file",
    "write_frame_file",
    "pair_to_dict",
    "pair_from_dict",
    "parse_pair_file",
    "write_pair_file",
    "read_coefficient_csv",
    "write_coefficient_csv",
    "inputs_digest",
    "write_report",
]


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values, complex numbers and dataclasses into plain JSON types.

    Complex scalars become ``[re, im]``; non-finite floats become ``None``.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    """Sorted keys, shortest round-trip floats, no NaN."""
    return json.dumps(to_jsonable(obj), sort_keys=True, allow_nan=False, indent=2) + "\n"


# -- frames -----------------------------------------------------------------


def frame_to_dict(F: Frame) -> dict:
    real = F.is_real
    vectors = []
    for v in F.vectors:
        if real:
            vectors.append([float(x.real) for x in v])
        else:
            vectors.append([[float(x.real), float(x.imag)] for x in v])
    return {
        "dim": F.dim,
        "field": "real" if real else "complex",
        "vectors": vectors,
        "tol": {"rank_tol": F.tol.rank_tol, "eq_tol": F.tol.eq_tol},
    }


def _number(x, where, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {type(x).__name__}", path, where)
    if not math.isfinite(x):
        raise ParseError("NaN or infinite entry", path, where)
    return float(x)


def _entry(x, where, path) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError("complex entries are [re, im] pairs", path, where)
        return complex(_number(x[0], where, path), _number(x[1], where, path))
    return complex(_number(x, where, path), 0.0)


def _tolerance(obj, path) -> ToleranceConfig:
    if obj is None:
        return DEFAULT_TOL
    if not isinstance(obj, dict) or set(obj) - {"rank_tol", "eq_tol"}:
        raise ParseError("tol must be an object with rank_tol and eq_tol", path, "tol")
    kw = {k: _number(v, f"tol.{k}", path) for k, v in obj.items()}
    try:
        return ToleranceConfig(**kw)
    except ValueError as exc:
        raise ParseError(str(exc), path, "tol") from None


def frame_from_dict(obj, path=None, prefix: str = "") -> Frame:
    """Validate a decoded frame object; NotAFrame propagates unchanged."""
    if not isinstance(obj, dict):
        raise ParseError("frame must be a JSON object", path, prefix or None)
    for key in ("dim", "vectors"):
        if key not in obj:
            raise ParseError("missing required field", path, prefix + key)
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError("dim must be a positive integer", path, prefix + "dim")
    field = obj.get("field", "complex")
    if field not in ("real", "complex"):
        raise ParseError("field must be 'real' or 'complex'", path, prefix + "field")
    vectors = obj["vectors"]
    if not isinstance(vectors, list) or not vectors:
        raise ParseError("vectors must be a nonempty list", path, prefix + "vectors")
    parsed = []
    for i, v in enumerate(vectors):
        where = f"{prefix}vectors[{i}]"
        if not isinstance(v, list) or len(v) != dim:
            n = len(v) if isinstance(v, list) else "non-list"
            raise ParseError(f"vector {i} has length {n}, expected {dim}", path, where)
        vec = np.array([_entry(x, f"{where}[{j}]", path) for j, x in enumerate(v)])
        if field == "real" and np.any(vec.imag):
            raise ParseError(f"vector {i} has imaginary parts in a real frame", path, where)
        parsed.append(vec)
    return validate_frame(parsed, _tolerance(obj.get("tol"), path))


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, line=exc.lineno) from None


def _write_text(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


def parse_frame_file(path) -> Frame:
    return frame_from_dict(_load_json(path), path)


def write_frame_file(F: Frame, path):
    _write_text(path, canonical_json(frame_to_dict(F)))


# -- dual pairs -------------------------------------------------------------


def pair_to_dict(pair: DualPair) -> dict:
    return {"primary": frame_to_dict(pair.primary), "dual": frame_to_dict(pair.dual)}


def pair_from_dict(obj, path=None) -> DualPair:
    """A ``{"primary", "dual"}`` object, or a bare frame paired with its canonical dual."""
    if isinstance(obj, dict) and "primary" in obj:
        if "dual" not in obj:
            raise ParseError("missing required field", path, "dual")
        F = frame_from_dict(obj["primary"], path, "primary.")
        G = frame_from_dict(obj["dual"], path, "dual.")
        if (F.dim, F.count) != (G.dim, G.count):
            raise ParseError("primary and dual have different shapes", path, "dual")
        ok, r = is_dual_pair(F, G)
        if not ok:
            raise ParseError(f"frames are not dual (residual {r:.3e})", path, "dual")
        return DualPair(F, G)
    return canonical_dual(frame_from_dict(obj, path))


def parse_pair_file(path) -> DualPair:
    return pair_from_dict(_load_json(path), path)


def write_pair_file(pair: DualPair, path):
    _write_text(path, canonical_json(pair_to_dict(pair)))


# -- coefficient streams ----------------------------------------------------

CSV_HEADER = ["signal_id", "index", "re", "im"]


def read_coefficient_csv(path, n: int | None = None) -> dict[str, np.ndarray]:
    """Rows ``signal_id,index,re,im`` with 1-based ``index``; absent rows are NaN.

    Returns vectors keyed by signal id in order of first appearance.  When
    ``n`` is omitted the length is the largest index seen.
    """
    rows: dict[str, dict[int, complex]] = {}
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or (lineno == 1 and row[0].strip() == "signal_id"):
                    continue
                if len(row) != 4:
                    raise ParseError("expected 4 columns", path, line=lineno)
                sid = row[0].strip()
                try:
                    idx = int(row[1])
                    val = complex(float(row[2]), float(row[3]))
                except ValueError:
                    raise ParseError("malformed index or value", path, line=lineno) from None
                if not (math.isfinite(val.real) and math.isfinite(val.imag)):
                    raise ParseError("NaN or infinite value", path, line=lineno)
                if idx < 1 or (n is not None and idx > n):
                    raise ParseError(f"index {idx} out of range", path, "index", lineno)
                entries = rows.setdefault(sid, {})
                if idx - 1 in entries:
                    raise ParseError(f"duplicate index {idx} for signal {sid}", path, line=lineno)
                entries[idx - 1] = val
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from None
    if n is None:
        n = max((max(e) + 1 for e in rows.values() if e), default=0)
    out = {}
    for sid, entries in rows.items():
        vec = np.full(n, np.nan, dtype=np.complex128)
        for i, v in entries.items():
            vec[i] = v
        out[sid] = vec
    return out


def write_coefficient_csv(path, signals: dict[str, np.ndarray] | Iterable[np.ndarray]):
    """Write vectors as CSV rows, skipping NaN entries (erasures)."""
    if not isinstance(signals, dict):
        signals = {str(i + 1): v for i, v in enumerate(signals)}
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for sid, vec in signals.items():
                for i, v in enumerate(np.asarray(vec, dtype=np.complex128)):
                    if np.isfinite(v):
                        w.writerow([sid, i + 1, repr(float(v.real)), repr(float(v.imag))])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- reports ----------------------------------------------------------------


def inputs_digest(paths: Iterable) -> str:
    """SHA-256 over the contents of the input files, in the given order."""
    h = hashlib.sha256()
    for p in paths:
        try:
            data = Path(p).read_bytes()
        except OSError as exc:
            raise IoError(f"cannot read {p}: {exc.strerror or exc}") from None
        h.update(len(data).to_bytes(8, "little"))
        h.update(data)
    return h.hexdigest()


@dataclasses.dataclass
class Report:
    command: str
    inputs_digest: str
    verdicts: dict = dataclasses.field(default_factory=dict)
    timings: dict = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "verdicts": to_jsonable(self.verdicts),
            "timings": to_jsonable(self.timings),
        }

    def verdict_json(self) -> str:
        """Canonical JSON of everything except timings."""
        d = self.to_dict()
        d.pop("timings")
        return canonical_json(d)


def write_report(report: Report, path=None) -> str:
    """Canonical JSON of the report, written to ``path`` when given."""
    try:
        text = canonical_json(report.to_dict())
    except (TypeError, ValueError) as exc:
        raise InputError(f"report is not serializable: {exc}") from None
    if path is not None:
        _write_text(path, text)
    return text
