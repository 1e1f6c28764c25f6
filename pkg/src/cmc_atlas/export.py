"""File output: atomic writes, 17-significant-digit JSON/CSV, OBJ meshes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

DIGITS = 17


def fmt(x) -> str:
    return format(float(x), f".{DIGITS}g")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            out.append(f"{pad}{json.dumps(k)}: ")
            _encode(obj[k], indent, level + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
        elif all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                _encode(v, indent, level + 1, out)
                if i < len(obj) - 1:
                    out.append(", ")
            out.append("]")
        else:
            out.append("[\n")
            for i, v in enumerate(obj):
                out.append(pad)
                _encode(v, indent, level + 1, out)
                out.append(",\n" if i < len(obj) - 1 else "\n")
            out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """Sorted-key JSON with every float at 17 significant digits; nan/inf -> null."""
    out: list = []
    _encode(_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def write_json(path, obj) -> None:
    atomic_write(path, dumps_json(obj))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    atomic_write(path, csv_text(header, rows))


def obj_text(points: np.ndarray, comment: str = "") -> str:
    """Triangulated lattice mesh; vertices carry every embedding coordinate, t last."""
    n1, n2, _ = points.shape
    lines = [f"# {comment}"] if comment else []
    for p in points.reshape(-1, points.shape[-1]):
        lines.append("v " + " ".join(fmt(c) for c in p))
    idx = np.arange(n1 * n2).reshape(n1, n2) + 1
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    return "\n".join(lines) + "\n"


def write_obj(path, points: np.ndarray, comment: str = "") -> None:
    atomic_write(path, obj_text(points, comment))


def patch_json(patch) -> dict:
    return {
        "schema": 1,
        "kind": "patch",
        "chart": patch.chart,
        "space": patch.space.as_dict(),
        "u": patch.u,
        "v": patch.v,
        "points": patch.points,
    }
