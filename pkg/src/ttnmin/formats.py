"""File formats: topology JSON, tensor JSON / binary ``TTN1``, network bundles,
and JSON views of verdicts, reports, traces and experiment results.

All JSON is written by :func:`dumps`: keys in a fixed order, floats with 17
significant digits, so equal inputs always give equal bytes.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ShapeMismatch, TTNError
from .network import (
    Failure,
    MinimalityCertificate,
    RankReport,
    TreeNetwork,
    local_labels,
)
from .reduction import ReductionTrace
from .sampling import GenericityResult
from .tensors import AxisLabel, Bond, DenseTensor, Physical
from .topology import AdmissibilityVerdict, TreeTopology

MAGIC = b"TTN1"


class FormatError(TTNError, ValueError):
    """A file does not follow the expected layout."""


# JSON emitter ----------------------------------------------------------------


def _scalar(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot encode non-finite float {x}")
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for n, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append("  " * indent + "}")
    elif isinstance(obj, (list, tuple)):
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            out.append("[" + ", ".join(_scalar(x) for x in obj) + "]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append("  " * indent + "]")
    else:
        out.append(_scalar(obj))


def dumps(obj) -> str:
    """Deterministic JSON text (trailing newline included)."""
    out: list[str] = []
    _emit(obj, 0, out)
    return "".join(out) + "\n"


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from None


def _edge_str(e) -> str:
    return f"{e[0]}-{e[1]}"


def _parse_edge_str(s: str) -> tuple[int, int]:
    u, v = s.split("-")
    return int(u), int(v)


# topology --------------------------------------------------------------------


def topology_to_json(topo: TreeTopology) -> dict:
    return {
        "vertices": [{"id": v, "phys_dim": n} for v, n in topo.phys_dims.items()],
        "edges": [{"u": u, "v": v, "bond": r} for (u, v), r in topo.bond_dims.items()],
    }


def topology_from_json(obj) -> TreeTopology:
    try:
        phys = {}
        for entry in obj["vertices"]:
            if entry["id"] in phys:
                raise FormatError(f"vertex {entry['id']} listed twice")
            phys[entry["id"]] = entry["phys_dim"]
        edges = [(e["u"], e["v"], e["bond"]) for e in obj.get("edges", [])]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad topology object: {exc!r}") from None
    return TreeTopology(phys, edges)


def load_topology(path) -> TreeTopology:
    return topology_from_json(_loads(Path(path).read_text()))


def save_topology(topo: TreeTopology, path) -> None:
    Path(path).write_text(dumps(topology_to_json(topo)))


# tensors ---------------------------------------------------------------------


def label_to_json(label: AxisLabel) -> dict:
    if isinstance(label, Physical):
        return {"physical": label.vertex}
    return {"bond": [label.u, label.v]}


def label_from_json(obj) -> AxisLabel:
    if isinstance(obj, dict) and len(obj) == 1:
        if "physical" in obj:
            return Physical(int(obj["physical"]))
        if "bond" in obj and len(obj["bond"]) == 2:
            return Bond(int(obj["bond"][0]), int(obj["bond"][1]))
    raise FormatError(f"bad axis label {obj!r}")


def tensor_to_json(t: DenseTensor) -> dict:
    return {
        "dims": list(t.dims),
        "labels": [label_to_json(l) for l in t.labels],
        "data": [float(x) for x in t.data.ravel()],
    }


def tensor_from_json(obj) -> DenseTensor:
    try:
        dims = [int(n) for n in obj["dims"]]
        labels = [label_from_json(l) for l in obj["labels"]]
        data = np.asarray(obj["data"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad tensor object: {exc!r}") from None
    return DenseTensor.from_flat(dims, data, labels)


def write_binary(t: DenseTensor, path) -> None:
    """``TTN1`` | u32 order | u32 dims... | f64 data, all little-endian."""
    head = MAGIC + struct.pack(f"<I{t.order}I", t.order, *t.dims)
    Path(path).write_bytes(head + t.data.astype("<f8").tobytes(order="C"))


def read_binary(path, labels) -> DenseTensor:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: missing TTN1 magic")
    (k,) = struct.unpack_from("<I", raw, 4)
    dims = struct.unpack_from(f"<{k}I", raw, 8)
    off = 8 + 4 * k
    n = math.prod(dims)
    if len(raw) != off + 8 * n:
        raise FormatError(f"{path}: expected {n} float64 values after header")
    data = np.frombuffer(raw, dtype="<f8", count=n, offset=off)
    return DenseTensor.from_flat(dims, data, labels)


def load_tensor(path) -> DenseTensor:
    return tensor_from_json(_loads(Path(path).read_text()))


def save_tensor(t: DenseTensor, path) -> None:
    Path(path).write_text(dumps(tensor_to_json(t)))


# network bundles -------------------------------------------------------------


def network_to_json(net: TreeNetwork, binary_dir=None) -> dict:
    """Bundle manifest; with ``binary_dir`` the tensors go to ``v<id>.ttn``
    side files there and the manifest stores their names and labels."""
    tensors = {}
    for i, t in net.tensors.items():
        if binary_dir is None:
            tensors[str(i)] = tensor_to_json(t)
        else:
            name = f"v{i}.ttn"
            write_binary(t, Path(binary_dir) / name)
            tensors[str(i)] = {"file": name, "labels": [label_to_json(l) for l in t.labels]}
    return {"topology": topology_to_json(net.topology), "tensors": tensors}


def network_from_json(obj, base_dir=".") -> TreeNetwork:
    try:
        topo = topology_from_json(obj["topology"])
        entries = obj["tensors"]
        tensors = {}
        for key, entry in entries.items():
            i = int(key)
            if "file" in entry:
                if "labels" in entry:
                    labels = [label_from_json(l) for l in entry["labels"]]
                else:
                    labels = local_labels(topo, i)
                tensors[i] = read_binary(Path(base_dir) / entry["file"], labels)
            else:
                tensors[i] = tensor_from_json(entry)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"bad network bundle: {exc!r}") from None
    return TreeNetwork(topo, tensors)


def load_network(path) -> TreeNetwork:
    path = Path(path)
    return network_from_json(_loads(path.read_text()), base_dir=path.parent)


def save_network(net: TreeNetwork, path, binary: bool = False) -> None:
    path = Path(path)
    obj = network_to_json(net, binary_dir=path.parent if binary else None)
    path.write_text(dumps(obj))


# verdicts, reports, traces ---------------------------------------------------


def verdict_to_json(v: AdmissibilityVerdict) -> dict:
    return {
        "admissible": v.admissible,
        "violations": [
            {"vertex": x.vertex, "neighbor": x.neighbor, "bond": x.bond, "bound": x.bound}
            for x in v.violations
        ],
    }


def report_to_json(r: RankReport) -> dict:
    return {
        "tol_rel": r.tol_rel,
        "bond_dims": {_edge_str(e): n for e, n in sorted(r.bond_dims.items())},
        "effective_ranks": [
            {"vertex": i, "neighbor": j, "rank": n} for (i, j), n in sorted(r.effective_ranks.items())
        ],
        "edge_cut_ranks": None
        if r.edge_cut_ranks is None
        else {_edge_str(e): n for e, n in sorted(r.edge_cut_ranks.items())},
        "singular_tails": {k: list(v) for k, v in r.singular_tails.items()},
    }


def report_from_json(obj) -> RankReport:
    cuts = obj.get("edge_cut_ranks")
    return RankReport(
        effective_ranks={(e["vertex"], e["neighbor"]): e["rank"] for e in obj["effective_ranks"]},
        bond_dims={_parse_edge_str(k): n for k, n in obj["bond_dims"].items()},
        tol_rel=float(obj["tol_rel"]),
        edge_cut_ranks=None if cuts is None else {_parse_edge_str(k): n for k, n in cuts.items()},
        singular_tails={k: tuple(v) for k, v in obj.get("singular_tails", {}).items()},
    )


def certificate_to_json(c: MinimalityCertificate) -> dict:
    return {
        "minimal": c.minimal,
        "failures": [f._asdict() for f in c.failures],
        "report": report_to_json(c.report),
    }


def certificate_from_json(obj) -> MinimalityCertificate:
    try:
        return MinimalityCertificate(
            minimal=bool(obj["minimal"]),
            failures=[Failure(**f) for f in obj["failures"]],
            report=report_from_json(obj["report"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad certificate: {exc!r}") from None


def load_certificate(path) -> MinimalityCertificate:
    return certificate_from_json(_loads(Path(path).read_text()))


def trace_to_json(t: ReductionTrace) -> dict:
    return {
        "steps": [s._asdict() for s in t.steps],
        "before": {_edge_str(e): n for e, n in sorted(t.before.items())},
        "after": {_edge_str(e): n for e, n in sorted(t.after.items())},
        "reconstruction_error": t.reconstruction_error,
    }


def genericity_to_json(g: GenericityResult) -> dict[str, Any]:
    return {
        "trials": g.trials,
        "minimal_count": g.minimal_count,
        "seed": g.seed,
        "tol_rel": g.tol_rel,
        "failure_margins": list(g.failure_margins),
    }
