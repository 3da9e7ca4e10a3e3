"""File formats for the batch front end.

Readers: dense CSV matrices, feature tables with an optional trailing
integer ``label`` column, and coordinate MatrixMarket for symmetric
matrices (lower triangle, densified on load).  Parse failures carry the
file path and 1-based line number.

Writers: CSV and JSON with floats at 17 significant digits so reruns are
byte-identical and values round-trip exactly.
"""

import json

import numpy as np

from .exceptions import InputDataError


def format_float(x):
    """17-significant-digit decimal form of a float (round-trip exact)."""
    return f"{float(x):.17g}"


def _parse_float(tok, path, lineno, col):
    try:
        return float(tok)
    except ValueError:
        raise InputDataError(f"invalid number {tok!r} in column {col}", path, lineno) from None


def _parse_int(tok, path, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise InputDataError(f"invalid integer {tok!r} in {what}", path, lineno) from None


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            yield lineno, raw.rstrip("\n").rstrip("\r")


def load_dense_matrix_csv(path):
    """Square matrix from headerless comma-separated rows."""
    rows = []
    width = None
    for lineno, line in _data_lines(path):
        if not line.strip():
            raise InputDataError("empty row", path, lineno)
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise InputDataError(f"expected {width} columns, got {len(fields)}", path, lineno)
        rows.append([_parse_float(tok, path, lineno, j + 1) for j, tok in enumerate(fields)])
    if not rows:
        raise InputDataError("file is empty", path)
    A = np.array(rows, dtype=np.float64)
    if A.shape[0] != A.shape[1]:
        raise InputDataError(f"matrix must be square, got {A.shape[0]} rows x {A.shape[1]} columns", path)
    if not np.all(np.isfinite(A)):
        raise InputDataError("matrix contains non-finite values", path)
    return A


def load_features_csv(path):
    """Feature rows, optionally with a header whose last column is ``label``.

    Returns (X, labels) where labels is None unless the header names its
    final column ``label``; label entries must be non-negative integers.
    """
    X_rows = []
    labels = []
    has_label = False
    width = None
    first = True
    for lineno, line in _data_lines(path):
        if not line.strip():
            raise InputDataError("empty row", path, lineno)
        fields = [tok.strip() for tok in line.split(",")]
        if first:
            first = False
            numeric = True
            for tok in fields:
                try:
                    float(tok)
                except ValueError:
                    numeric = False
                    break
            if not numeric:  # header row
                has_label = fields[-1] == "label"
                width = len(fields)
                continue
            width = len(fields)
        elif len(fields) != width:
            raise InputDataError(f"expected {width} columns, got {len(fields)}", path, lineno)
        if has_label:
            label = _parse_int(fields[-1], path, lineno, "label column")
            if label < 0:
                raise InputDataError(f"label must be non-negative, got {label}", path, lineno)
            labels.append(label)
            fields = fields[:-1]
        X_rows.append([_parse_float(tok, path, lineno, j + 1) for j, tok in enumerate(fields)])
    if not X_rows:
        raise InputDataError("file holds no data rows", path)
    if width is not None and len(X_rows[0]) == 0:
        raise InputDataError("no feature columns", path)
    X = np.array(X_rows, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise InputDataError("features contain non-finite values", path)
    return X, (np.array(labels, dtype=np.int64) if has_label else None)


_MM_BANNER = ("matrix", "coordinate", "real", "symmetric")


def load_matrix_market_symmetric(path):
    """Dense symmetric matrix from ``%%MatrixMarket matrix coordinate real
    symmetric`` with 1-based lower-triangle entries."""
    lines = _data_lines(path)
    try:
        lineno, banner = next(lines)
    except StopIteration:
        raise InputDataError("file is empty", path) from None
    parts = banner.split()
    if not banner.startswith("%%MatrixMarket") or tuple(p.lower() for p in parts[1:]) != _MM_BANNER:
        raise InputDataError(
            "unsupported header; expected '%%MatrixMarket matrix coordinate real symmetric'",
            path, lineno,
        )
    size = None
    for lineno, line in lines:
        if line.startswith("%"):
            continue
        if not line.strip():
            raise InputDataError("empty row", path, lineno)
        size = line.split()
        if len(size) != 3:
            raise InputDataError(f"size line needs 'rows cols nnz', got {line!r}", path, lineno)
        break
    if size is None:
        raise InputDataError("missing size line", path)
    n = _parse_int(size[0], path, lineno, "size line")
    m = _parse_int(size[1], path, lineno, "size line")
    nnz = _parse_int(size[2], path, lineno, "size line")
    if n != m:
        raise InputDataError(f"matrix must be square, got {n} x {m}", path, lineno)
    if n < 1 or nnz < 0:
        raise InputDataError(f"invalid dimensions {n} x {m} with {nnz} entries", path, lineno)
    A = np.zeros((n, n))
    seen = set()
    count = 0
    for lineno, line in lines:
        if not line.strip():
            raise InputDataError("empty row", path, lineno)
        if count == nnz:
            raise InputDataError(f"more than the declared {nnz} entries", path, lineno)
        parts = line.split()
        if len(parts) != 3:
            raise InputDataError(f"entry needs 'row col value', got {line!r}", path, lineno)
        i = _parse_int(parts[0], path, lineno, "row index")
        j = _parse_int(parts[1], path, lineno, "column index")
        v = _parse_float(parts[2], path, lineno, 3)
        if not 1 <= i <= n or not 1 <= j <= n:
            raise InputDataError(f"index ({i}, {j}) outside 1..{n}", path, lineno)
        if j > i:
            raise InputDataError(f"entry ({i}, {j}) above the diagonal; store the lower triangle", path, lineno)
        if (i, j) in seen:
            raise InputDataError(f"duplicate entry for ({i}, {j})", path, lineno)
        seen.add((i, j))
        A[i - 1, j - 1] = v
        A[j - 1, i - 1] = v
        count += 1
    if count != nnz:
        raise InputDataError(f"declared {nnz} entries but found {count}", path)
    if not np.all(np.isfinite(A)):
        raise InputDataError("matrix contains non-finite values", path)
    return A


def write_matrix_csv(path, M):
    M = np.asarray(M, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in np.atleast_2d(M):
            fh.write(",".join(format_float(v) for v in row))
            fh.write("\n")


def write_labels_csv(path, labels):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


TRACE_HEADER = "iter,objective,rel_error,stepsize,lipschitz,split_gap,wall_ms"


def write_trace_csv(path, trace, timing=False):
    """One row per recorded iteration; inapplicable fields stay empty.

    wall_ms is written only with ``timing`` so that reruns of the same
    configuration stay byte-identical.
    """

    def opt(v):
        return "" if v is None else format_float(v)

    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        for i in range(len(trace.objective)):
            fh.write(",".join([
                str(i),
                format_float(trace.objective[i]),
                format_float(trace.rel_error[i]),
                opt(trace.stepsize[i]),
                opt(trace.lipschitz[i]),
                opt(trace.split_gap[i]),
                format_float(trace.wall_ms[i]) if timing else "",
            ]))
            fh.write("\n")


def _json_fragment(obj, indent):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if np.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{inner}{json.dumps(str(k))}: {_json_fragment(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = (f"{inner}{_json_fragment(v, indent + 1)}" for v in seq)
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj):
    """Deterministic pretty JSON with floats at 17 significant digits."""
    return _json_fragment(obj, 0) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_json(obj))
