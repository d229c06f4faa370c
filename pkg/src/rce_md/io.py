"""File formats.

JSON documents carry ``format_version`` and ``kind``.  Coefficient lists are
written over the canonical half-set as ``[{"k": [...], "re": .., "im": ..}]``.

Lattice fields use a little-endian binary layout::

    bytes 0-7    magic b"RCEMDFLD"
    bytes 8-11   uint32 format_version
    bytes 12-15  uint32 d
    bytes 16-19  uint32 N
    then N**d complex128 samples in row-major order (axis 1 slowest)

or, as a fallback, CSV rows ``t_1,...,t_d,re,im`` with a header line.
"""
import csv
import json
from pathlib import Path
import struct

import numpy as np

from .arma import ArmaModel
from .dual import SolveReport, StructuredLagrangian
from .errors import FormatError
from .indexing import MultiIndexSet
from .moments import LatticeField, MomentSequence
from .spectral import RationalSpectralDensity

FORMAT_VERSION = 1
FIELD_MAGIC = b"RCEMDFLD"
_HEADER = struct.Struct("<8sIII")


def _coef_list(omega, box, members=None):
    members = omega.half if members is None else members
    out = []
    for k in members:
        v = complex(box[omega.box_index(k)])
        out.append({"k": [int(x) for x in k], "re": v.real, "im": v.imag})
    return out


def _half_values(omega, items):
    lookup = {tuple(int(v) for v in k): i for i, k in enumerate(omega.half)}
    vals = np.zeros(len(omega.half), dtype=complex)
    for item in items:
        k = tuple(item["k"])
        if k not in lookup:
            raise FormatError(f"index {k} is not on the half-set of order {omega.n}")
        vals[lookup[k]] = complex(item["re"], item["im"])
    return vals


def _header(kind, **fields):
    return {"format_version": FORMAT_VERSION, "kind": kind, **fields}


def _check(doc, kind):
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {doc.get('format_version')!r}")
    if doc.get("kind") != kind:
        raise FormatError(f"expected a {kind!r} document, got {doc.get('kind')!r}")
    return MultiIndexSet(int(doc["d"]), int(doc["n"]))


def moments_to_dict(c):
    om = c.omega
    return _header("moments", d=om.d, n=om.n, values=_coef_list(om, c.box))


def moments_from_dict(doc):
    om = _check(doc, "moments")
    return MomentSequence.from_half(om, _half_values(om, doc["values"]))


def density_to_dict(phi):
    om = phi.omega
    return _header("density", d=om.d, n=om.n, p=_coef_list(om, phi.p.box),
                   **{"lambda": _coef_list(om, phi.lam.box)})


def density_from_dict(doc):
    om = _check(doc, "density")
    p = MomentSequence.from_half(om, _half_values(om, doc["p"]))
    lam = StructuredLagrangian.from_half(om, _half_values(om, doc["lambda"]))
    return RationalSpectralDensity(p, lam)


def report_to_dict(report, **extra):
    lam = report.lambda_star
    om = lam.omega
    return _header("solve_report", d=om.d, n=om.n, iterations=report.iterations,
                   grad_norm=report.grad_norm, moment_residual=report.moment_residual,
                   lambda_matrix_pd=report.lambda_matrix_pd, lambda_min=report.lambda_min,
                   converged=report.converged, objective_trace=list(report.objective_trace),
                   **{"lambda": _coef_list(om, lam.box)}, **extra)


def report_from_dict(doc):
    om = _check(doc, "solve_report")
    lam = StructuredLagrangian.from_half(om, _half_values(om, doc["lambda"]))
    return SolveReport(lam, int(doc["iterations"]), float(doc["grad_norm"]),
                       float(doc["moment_residual"]), bool(doc["lambda_matrix_pd"]),
                       float(doc["lambda_min"]), bool(doc["converged"]),
                       list(doc.get("objective_trace", [])))


def arma_to_dict(model):
    om = MultiIndexSet(model.d, model.n)
    lags = model.lags()
    rhs = [{"k": list(k), "re": float(model.rhs_weights[k].real), "im": float(model.rhs_weights[k].imag)}
           for k in lags]
    ar = None
    if model.ar_taps is not None:
        ar = [{"k": list(k), "re": float(model.ar_taps[k].real), "im": float(model.ar_taps[k].imag)}
              for k in lags]
    doc = _header("arma", d=model.d, n=model.n, form=model.form, ar=ar, rhs_weights=rhs)
    phi = model.meta.get("density")
    if phi is not None:
        doc["p"] = _coef_list(om, phi.p.box)
        doc["lambda"] = _coef_list(om, phi.lam.box)
    if model.meta.get("moment_residual") is not None:
        doc["moment_residual"] = model.meta["moment_residual"]
    return doc


def arma_from_dict(doc):
    om = _check(doc, "arma")
    shape = (om.n + 1,) * om.d

    def taps(items):
        out = np.zeros(shape, dtype=complex)
        for item in items:
            out[tuple(item["k"])] = complex(item["re"], item["im"])
        return out

    ar = None if doc.get("ar") is None else taps(doc["ar"])
    meta = {"moment_residual": doc.get("moment_residual")}
    if "p" in doc and "lambda" in doc:
        p = MomentSequence.from_half(om, _half_values(om, doc["p"]))
        lam = StructuredLagrangian.from_half(om, _half_values(om, doc["lambda"]))
        meta["density"] = RationalSpectralDensity(p, lam)
    return ArmaModel(om.d, om.n, ar, taps(doc["rhs_weights"]), doc["form"], meta)


def write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_field(path, field):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"t_{j + 1}" for j in range(field.d)] + ["re", "im"])
            for t in np.ndindex(*field.values.shape):
                v = field.values[t]
                w.writerow(list(t) + [repr(float(v.real)), repr(float(v.imag))])
        return
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FIELD_MAGIC, FORMAT_VERSION, field.d, field.N))
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())


def read_field(path):
    path = Path(path)
    if path.suffix == ".csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise FormatError(f"{path}: empty field file")
        d = len(rows[0]) - 2
        body = np.array(rows[1:], dtype=float)
        N = int(round(len(body) ** (1.0 / d)))
        if N ** d != len(body):
            raise FormatError(f"{path}: {len(body)} rows do not form a hypercube in d={d}")
        vals = np.zeros((N,) * d, dtype=complex)
        vals[tuple(body[:, :d].astype(int).T)] = body[:, d] + 1j * body[:, d + 1]
        return LatticeField(vals)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, d, N = _HEADER.unpack_from(raw)
    if magic != FIELD_MAGIC:
        raise FormatError(f"{path}: not a lattice field file")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format_version {version}")
    data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if data.size != N ** d:
        raise FormatError(f"{path}: expected {N ** d} samples, found {data.size}")
    return LatticeField(data.reshape((N,) * d).astype(complex))


def write_grid_csv(path, f):
    """One row per node: ``theta_1..theta_d, value``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nodes = f.grid.nodes()
    vals = np.real_if_close(f.flat)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"theta_{j + 1}" for j in range(f.grid.d)] + ["value"])
        for row, v in zip(nodes, vals):
            w.writerow([f"{x:.17g}" for x in row] + [f"{float(np.real(v)):.17g}"])


def _complex_array(doc, key):
    re = np.asarray(doc[key], dtype=float)
    im = doc.get(key + "_im")
    return re + 1j * np.asarray(im, dtype=float) if im is not None else re.astype(complex)


def filter_to_dict(fc):
    doc = _header("filter", d=fc.d, n=fc.n, b=fc.b.real.tolist(), a=fc.a.real.tolist())
    if np.any(fc.b.imag):
        doc["b_im"] = fc.b.imag.tolist()
    if np.any(fc.a.imag):
        doc["a_im"] = fc.a.imag.tolist()
    return doc


def filter_from_dict(doc):
    """Filter taps as nested lists ``b``, ``a`` with optional ``b_im``, ``a_im``."""
    from .synth import FilterCoefficients

    if doc.get("kind", "filter") != "filter":
        raise FormatError(f"expected a 'filter' document, got {doc.get('kind')!r}")
    try:
        return FilterCoefficients(_complex_array(doc, "b"), _complex_array(doc, "a"))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad filter document: {exc}") from exc
