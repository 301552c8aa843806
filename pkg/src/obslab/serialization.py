"""JSON/CSV file formats.

Matrices are stored as ``{"d": n, "re": [[...]], "im": [[...]]}``; kernels
add ``"grid": {"p0", "h", "n"}`` and ``"theta"``.  Floats are written with
17 significant digits and keys in a fixed order, so identical inputs give
byte-identical files.
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidInput


def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInput(f"cannot serialize non-finite value {x!r}")
    if x == 0.0:
        return "0.0"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent=1, _level=0):
    """Deterministic JSON text for nested dict/list/scalar data."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_dict(C):
    C = np.asarray(C, dtype=complex)
    return {"d": int(C.shape[0]), "re": C.real.tolist(), "im": C.imag.tolist()}


def matrix_from_dict(data):
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix JSON: {exc}") from None
    if re.shape != im.shape or re.ndim != 2:
        raise InvalidInput(f"re/im blocks must be matching 2-D arrays, got {re.shape} and {im.shape}")
    if "d" in data and int(data["d"]) != re.shape[0]:
        raise InvalidInput(f"declared d={data['d']} but matrix has {re.shape[0]} rows")
    return re + 1j * im


def kernel_to_dict(kernel):
    out = matrix_to_dict(kernel.K)
    g = kernel.grid
    out["grid"] = {"p0": float(g.p0), "h": float(g.h), "n": int(g.n)}
    out["theta"] = float(kernel.theta)
    return out


def kernel_from_dict(data):
    from .quadrature import MomentumGrid, QuadratureKernel

    K = matrix_from_dict(data)
    try:
        g = data["grid"]
        grid = MomentumGrid(float(g["p0"]), float(g["h"]), int(g["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"kernel JSON needs a grid block: {exc}") from None
    return QuadratureKernel(grid, K, float(data.get("theta", 0.0)))


def matrix_to_csv(C):
    """One row per matrix row, columns re(c_m0), im(c_m0), re(c_m1), ..."""
    C = np.asarray(C, dtype=complex)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{p}{j}" for j in range(C.shape[1]) for p in ("re", "im")])
    for row in C:
        w.writerow([_fmt_float(v) for x in row for v in (x.real, x.imag)])
    return buf.getvalue()


def matrix_from_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        vals = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise InvalidInput(f"malformed matrix CSV: {exc}") from None
    if vals.ndim != 2 or vals.shape[1] % 2:
        raise InvalidInput("CSV needs an even number of interleaved re/im columns")
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from None


def load_matrix(path):
    """Matrix from a JSON (``.json``) or interleaved CSV (``.csv``) file."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            return matrix_from_csv(path.read_text())
        except OSError as exc:
            raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    return matrix_from_dict(read_json(path))


def save_matrix(path, C):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(matrix_to_csv(C))
    else:
        path.write_text(dumps(matrix_to_dict(C)) + "\n")


def family_to_dict(fam, C=None):
    """``re``/``im`` hold the r x d array whose columns are the eta_n."""
    out = {"kind": "kolmogorov_family", "d": fam.d, "r": fam.r, "tol": fam.tol}
    if C is not None:
        out["gram_error"] = float(np.max(np.abs(fam.gram() - np.asarray(C))))
    out["re"] = fam.vectors.real.tolist()
    out["im"] = fam.vectors.imag.tolist()
    return out


def certificate_to_dict(cert, C=None):
    out = {
        "verdict": cert.verdict,
        "scope": "truncated model",
        "d": cert.d,
        "r": cert.r,
        "r_squared": cert.r_squared,
        "constraint_rank": cert.constraint_rank,
        "epsilon": cert.epsilon,
        "witness": None,
        "split": None,
    }
    if cert.witness is not None:
        out["witness"] = {"re": cert.witness.real.tolist(), "im": cert.witness.imag.tolist()}
        plus, minus = cert.split
        out["split"] = {
            "weight": 0.5,
            "plus": matrix_to_dict(plus.C),
            "minus": matrix_to_dict(minus.C),
        }
    return out
