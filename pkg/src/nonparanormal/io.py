"""Plain-text interchange: comma-separated data and matrices, tab-separated
edge lists and metric tables."""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .estimator import DataMatrix
from .graphs import GraphSpec


class DataParseError(ValueError):
    pass


def fmt(x):
    """Shortest round-trip text for a number."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _ensure_parent(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def read_data_csv(path):
    """Read a comma-separated file with a header row into a ``DataMatrix``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataParseError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise DataParseError(f"{path}: row {i + 1} has {len(row)} fields, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataParseError(
                    f"{path}: non-numeric value {cell!r} at row {i + 1}, column {header[j]!r}"
                ) from None
    return DataMatrix(values, names=tuple(h.strip() for h in header))


def write_data_csv(path, data):
    write_matrix_csv(path, data.values, header=data.names)


def write_matrix_csv(path, matrix, header=None):
    path = _ensure_parent(path)
    matrix = np.atleast_2d(np.asarray(matrix))
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in matrix:
            writer.writerow([fmt(v) for v in row])


def read_matrix_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh) if row])


def write_edges_tsv(path, graph):
    """Edge list, one ``j<TAB>k`` line per edge, vertices numbered from 1."""
    rows = [(j + 1, k + 1) for j, k in graph.sorted_edges()]
    write_tsv(path, None, rows)


def read_edges_tsv(path, p):
    edges = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                j, k = (int(v) for v in line.split("\t"))
            except ValueError:
                raise DataParseError(f"{path}: line {lineno} is not 'j<TAB>k': {line!r}") from None
            if not (1 <= j <= p and 1 <= k <= p) or j == k:
                raise DataParseError(f"{path}: line {lineno} has invalid edge ({j}, {k}) for p={p}")
            edges.append((j - 1, k - 1))
    return GraphSpec(p, frozenset(edges))


def write_tsv(path, header, rows):
    path = _ensure_parent(path)
    with path.open("w", encoding="utf-8") as fh:
        if header is not None:
            fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def read_tsv(path):
    """Header and rows (as strings) of a tab-separated table."""
    with Path(path).open(encoding="utf-8") as fh:
        lines = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    return lines[0], lines[1:]


def write_json(path, obj):
    path = _ensure_parent(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
