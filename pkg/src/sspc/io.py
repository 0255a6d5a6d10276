"""File formats: channel matrices, Pauli channels, circuits, spin specs, CSV exports, reports.

Matrix file::

    {"kind": "ptm", "n_qubits": 1, "data": [[1, 0, 0, 0], ...]}

Entries are real numbers or ``[re, im]`` pairs. Kraus files hold a list of
matrices under ``data``. The ``kind`` field is mandatory and the payload is
checked against it (shape, realness, unitarity) before use.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .channels import KINDS, ChannelRep, unitarity_residual
from .circuit import CircuitLayer, LayeredCircuit, tensor_layer
from .errors import InvalidArgument
from .noise import NoiseSpec, make_channel
from .pauli import PauliErrorChannel
from .spin import PulseSchedule, Spectrum, SpinSystemSpec

UNITARY_FILE_TOL = 1e-8


def data_path(name: str) -> Path:
    """Path of a file shipped in the package's ``data`` directory."""
    return Path(str(resources.files("sspc") / "data" / name))


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise InvalidArgument(f"{path}: cannot read ({exc.strerror})") from exc


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def _entry(x):
    if isinstance(x, bool):
        raise InvalidArgument("boolean matrix entry")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise InvalidArgument(f"matrix entry {x!r} is neither a number nor a [re, im] pair")


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidArgument("matrix data must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidArgument("ragged matrix rows")
    return np.array([[_entry(x) for x in r] for r in rows], dtype=np.complex128)


def encode_matrix(m: np.ndarray, real: bool | None = None) -> list:
    m = np.asarray(m)
    if real is None:
        real = not np.iscomplexobj(m) or np.max(np.abs(np.imag(m)), initial=0.0) == 0
    if real:
        return np.real(m).tolist()
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def channel_from_dict(obj: dict) -> ChannelRep:
    if not isinstance(obj, dict):
        raise InvalidArgument("channel file must hold a JSON object")
    kind = obj.get("kind")
    if not isinstance(kind, str):
        raise InvalidArgument("channel file is missing a string 'kind' field")
    kind = {"superoperator": "superop"}.get(kind, kind)
    if kind not in KINDS:
        raise InvalidArgument(f"unknown channel kind {kind!r}; expected one of {KINDS}")
    if "data" not in obj:
        raise InvalidArgument("channel file is missing 'data'")
    if kind == "kraus":
        if not isinstance(obj["data"], list) or not obj["data"]:
            raise InvalidArgument("kraus data must be a non-empty list of matrices")
        payload = [decode_matrix(m) for m in obj["data"]]
    else:
        payload = decode_matrix(obj["data"])
        if kind == "unitary" and unitarity_residual(payload) > UNITARY_FILE_TOL:
            raise InvalidArgument("'unitary' payload is not unitary")
    rep = ChannelRep.of(kind, payload)
    n = obj.get("n_qubits")
    if n is not None and n != rep.n_qubits:
        raise InvalidArgument(f"n_qubits={n} disagrees with a {rep.kind} payload on {rep.n_qubits} qubits")
    return rep


def channel_to_dict(rep: ChannelRep) -> dict:
    if rep.kind == "kraus":
        data = [encode_matrix(a) for a in rep.payload]
    else:
        data = encode_matrix(rep.payload, real=rep.kind == "ptm" or None)
    return {"kind": rep.kind, "n_qubits": rep.n_qubits, "data": data}


def load_channel(path) -> ChannelRep:
    try:
        return channel_from_dict(read_json(path))
    except InvalidArgument as exc:
        raise InvalidArgument(f"{path}: {exc}") from exc


def save_channel(rep: ChannelRep, path) -> None:
    write_json(channel_to_dict(rep), path)


# ---------------------------------------------------------------------------
# Pauli channels and circuits
# ---------------------------------------------------------------------------


def pauli_channel_from_dict(obj: dict) -> PauliErrorChannel:
    if not isinstance(obj, dict) or "probs" not in obj:
        raise InvalidArgument("Pauli channel needs a 'probs' field")
    probs = obj["probs"]
    if isinstance(probs, dict):
        n = obj.get("n_qubits") or len(next(iter(probs)))
        return PauliErrorChannel.from_dict(n, probs)
    arr = np.asarray(probs, dtype=float)
    n = obj.get("n_qubits")
    if n is None:
        n = int(round(np.log(arr.size) / np.log(4)))
    return PauliErrorChannel(n, arr)


def pauli_channel_to_dict(ch: PauliErrorChannel, cutoff: float = 0.0) -> dict:
    return {"type": "pauli_channel", "n_qubits": ch.n_qubits, "probs": ch.as_dict(cutoff)}


def load_pauli_channel(path) -> PauliErrorChannel:
    obj = read_json(path)
    if isinstance(obj, dict) and "kind" in obj:
        # a channel matrix: project it
        from .pauli import project_to_pauli_channel

        return project_to_pauli_channel(channel_from_dict(obj))
    return pauli_channel_from_dict(obj)


def _resolve(ref: str, base: Path) -> Path:
    if ref.startswith("builtin:"):
        return data_path(ref[len("builtin:"):])
    p = Path(ref)
    return p if p.is_absolute() else base / p


def _part(obj, base: Path, digests: dict) -> PauliErrorChannel:
    if isinstance(obj, str):
        path = _resolve(obj, base)
        digests[str(path)] = file_digest(path)
        return load_pauli_channel(path)
    if not isinstance(obj, dict):
        raise InvalidArgument(f"layer part {obj!r} is neither a file reference nor an object")
    if "noise" in obj:
        spec = obj["noise"]
        return make_channel(
            NoiseSpec(spec["model"], float(spec["p"]), bool(spec.get("per_qubit", True))),
            int(spec.get("n_qubits", 1)),
        )
    if "ideal" in obj and "experimental" in obj:
        from .pipeline import analyze

        paths = [_resolve(obj[k], base) for k in ("ideal", "experimental")]
        for p in paths:
            digests[str(p)] = file_digest(p)
        return analyze(load_channel(paths[0]), load_channel(paths[1])).channel
    return pauli_channel_from_dict(obj)


def circuit_from_dict(obj: dict, base=".", digests: dict | None = None) -> LayeredCircuit:
    """Build a circuit; ``digests`` collects SHA-256 of every referenced file."""
    digests = {} if digests is None else digests
    base = Path(base)
    if not isinstance(obj, dict) or "layers" not in obj or "n_qubits" not in obj:
        raise InvalidArgument("circuit file needs 'n_qubits' and 'layers'")
    n = obj["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"n_qubits must be a positive integer, got {n!r}")
    layers = []
    for i, layer in enumerate(obj["layers"]):
        if not isinstance(layer, dict) or not layer.get("parts"):
            raise InvalidArgument(f"layer {i} needs a non-empty 'parts' list")
        parts = [_part(p, base, digests) for p in layer["parts"]]
        layers.append(CircuitLayer(str(layer.get("name", f"layer{i + 1}")), tensor_layer(parts)))
    return LayeredCircuit(n, tuple(layers))


def load_circuit(path, digests: dict | None = None) -> LayeredCircuit:
    path = Path(path)
    return circuit_from_dict(read_json(path), path.parent, digests)


# ---------------------------------------------------------------------------
# spin specs and schedules
# ---------------------------------------------------------------------------

SPEC_FIELDS = ("gamma_e", "gamma_n", "b0", "a1", "a2", "b1_max")


def spin_spec_from_dict(obj: dict) -> SpinSystemSpec:
    if not isinstance(obj, dict):
        raise InvalidArgument("spin spec must be a JSON object")
    missing = [k for k in SPEC_FIELDS if k not in obj]
    if missing:
        raise InvalidArgument(f"spin spec is missing {missing}")
    vals = {}
    for k in SPEC_FIELDS:
        v = obj[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidArgument(f"spin spec field {k!r} must be a number")
        vals[k] = float(v)
    return SpinSystemSpec(**vals)


def load_spin_spec(path) -> SpinSystemSpec:
    return spin_spec_from_dict(read_json(path))


def write_schedule_csv(schedule: PulseSchedule, path, names=None) -> None:
    names = names or [f"control{k}" for k in range(schedule.n_controls)]
    carriers = schedule.carriers or (None,) * schedule.n_controls
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# dt_ns={schedule.dt!r}\n")
        fh.write("# carriers_mhz=" + ",".join("none" if c is None else repr(c) for c in carriers) + "\n")
        if schedule.b1_max is not None:
            fh.write(f"# b1_max_t={schedule.b1_max!r}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slot", "time_ns", *names])
        for j, t in enumerate(schedule.times):
            w.writerow([j, repr(float(t)), *(repr(float(x)) for x in schedule.amplitudes[:, j])])


def read_schedule_csv(path) -> PulseSchedule:
    meta, rows = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            else:
                rows.append(line)
    table = list(csv.reader(rows))
    if len(table) < 2 or table[0][:2] != ["slot", "time_ns"]:
        raise InvalidArgument(f"{path}: not a schedule CSV")
    try:
        body = np.array([[float(x) for x in r[2:]] for r in table[1:] if r], dtype=float)
        times = np.array([float(r[1]) for r in table[1:] if r])
    except ValueError as exc:
        raise InvalidArgument(f"{path}: bad number ({exc})") from exc
    if "dt_ns" in meta:
        dt = float(meta["dt_ns"])
    elif times.size > 1:
        dt = float(times[1] - times[0])
    else:
        raise InvalidArgument(f"{path}: cannot infer slot length")
    carriers = None
    if "carriers_mhz" in meta:
        parsed = tuple(None if c == "none" else float(c) for c in meta["carriers_mhz"].split(","))
        carriers = parsed if any(c is not None for c in parsed) else None
    b1 = float(meta["b1_max_t"]) if "b1_max_t" in meta else None
    return PulseSchedule(dt, body.T, carriers, b1)


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frequency_mhz", "magnitude"])
        for f, m in zip(spectrum.frequencies, spectrum.magnitude):
            w.writerow([repr(float(f)), repr(float(m))])


def write_trace_csv(trace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "layer", "perfection"])
        for k, (name, value) in enumerate(trace, start=1):
            w.writerow([k, name, repr(float(value))])


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(encode_matrix(x) if x.ndim == 2 else x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat(timespec="seconds")


def make_report(command: str, results: dict, inputs: dict | None = None, settings: dict | None = None) -> dict:
    """Report body plus a ``metadata`` field that holds everything run-dependent."""
    return {
        "tool": {"name": "sspc", "version": __version__},
        "command": command,
        "inputs": dict(sorted((inputs or {}).items())),
        "settings": settings or {},
        "results": results,
        "metadata": {"timestamp": timestamp()},
    }


def strip_metadata(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "metadata"}
