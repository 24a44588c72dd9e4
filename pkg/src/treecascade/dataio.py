"""Dataset ingestion, standardization, and fit-document serialization.

CSV files are RFC-4180-style UTF-8 with a mandatory header row and '.'
decimal separators.  Fit documents are JSON with a top-level
``format_version`` and every decimal field written with 17 significant
digits, so doubles round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import DataError, InvalidInputError, SchemaError
from .trees import Tree, canonical_edge, root_tree

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Dataset:
    """An n-by-d observation matrix with unique column names.

    ``standardized`` marks data whose columns have mean zero and sample
    standard deviation one; ``means``/``scales`` then record the affine
    map that produced it.  Values are validated finite and frozen.
    """

    values: np.ndarray
    names: tuple[str, ...]
    standardized: bool = False
    means: np.ndarray | None = None
    scales: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidInputError(f"values must be a 2-D matrix, got ndim={values.ndim}")
        if len(self.names) != values.shape[1]:
            raise InvalidInputError(
                f"{len(self.names)} column names for {values.shape[1]} columns"
            )
        if len(set(self.names)) != len(self.names):
            dupes = sorted({n for n in self.names if self.names.count(n) > 1})
            raise DataError(f"duplicate column names: {', '.join(dupes)}")
        bad = ~np.isfinite(values)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise DataError(
                f"non-finite value at row {r + 1}, column {self.names[c]!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def read_csv_header(path) -> tuple[str, ...]:
    """Column names from the first row only; no data rows are touched."""
    with open(path, newline="", encoding="utf-8") as handle:
        try:
            header = next(csv.reader(handle))
        except StopIteration:
            raise DataError(f"{path}: file is empty, expected a header row") from None
    return tuple(name.strip() for name in header)


def load_csv(path) -> Dataset:
    """Parse a CSV of decimal reals under a header of column names.

    Trailing blank lines are ignored; interior blank lines, ragged rows,
    and unparseable cells are errors naming the 1-based data row and the
    column.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    while rows and all(cell.strip() == "" for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise DataError(f"{path}: file is empty, expected a header row")
    names = tuple(name.strip() for name in rows[0])
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DataError(f"{path}: duplicate header names: {', '.join(dupes)}")
    d = len(names)
    parsed = np.empty((len(rows) - 1, d))
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != d:
            raise DataError(f"{path}: row {r}: expected {d} values, got {len(row)}")
        for c, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {r}, column {names[c]!r}: "
                    f"could not parse {cell!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise DataError(
                    f"{path}: row {r}, column {names[c]!r}: non-finite value {cell!r}"
                )
            parsed[r - 1, c] = value
    return Dataset(values=parsed, names=names)


def save_csv(ds: Dataset, path) -> None:
    """Write header plus rows; floats use shortest round-trip decimals."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(ds.names)
        for row in ds.values:
            writer.writerow([repr(float(v)) for v in row])


def standardize(ds: Dataset) -> Dataset:
    """Center each column and scale to unit sample standard deviation.

    The divisor is n - 1.  Already-standardized input passes through
    numerically unchanged.  A column with zero spread is an error naming
    the column; the structure of any downstream fit is invariant to the
    n vs n - 1 convention because correlations are scale-free.
    """
    if ds.n < 2:
        raise InvalidInputError(f"standardization needs at least 2 rows, got {ds.n}")
    means = ds.values.mean(axis=0)
    centered = ds.values - means
    scales = np.sqrt((centered * centered).sum(axis=0) / (ds.n - 1))
    for c, s in enumerate(scales):
        if not (math.isfinite(s) and s > 0.0):
            raise DataError(f"column {ds.names[c]!r} has zero variance; cannot standardize")
    return Dataset(
        values=centered / scales,
        names=ds.names,
        standardized=True,
        means=means,
        scales=scales,
    )


def price_changes(ds: Dataset) -> Dataset:
    """First differences of time-ordered rows (one fewer row).

    Downstream fitting treats the differences as exchangeable draws; any
    serial dependence is deliberately ignored.
    """
    if ds.n < 2:
        raise InvalidInputError(f"need at least 2 rows to difference, got {ds.n}")
    return Dataset(values=np.diff(ds.values, axis=0), names=ds.names)


def sample_prices_path() -> Path:
    """Location of the bundled 30-column sample of daily price levels."""
    return Path(str(files("treecascade").joinpath("data/dow30_prices.csv")))


# --- fit documents -----------------------------------------------------------

_SOURCES = ("default", "user")


def fit_to_document(fit) -> dict:
    """Plain-dict form of a fit, ready for JSON serialization.

    The model part carries the rooted edges with coefficients, per-vertex
    error variances (1 - coeff**2 off the root), and the unit-variance
    flag; fit metadata adds objective, per-edge weights aligned with the
    edges array, the uniqueness flag, and how the root was chosen.
    """
    rt = root_tree(fit.tree, fit.root)
    error_vars = [0.0] * fit.tree.d
    error_vars[fit.root] = 1.0
    edges = []
    weights = []
    for child in sorted(fit.coeffs):
        coeff = fit.coeffs[child]
        parent = rt.parent[child]
        edges.append({"child": child, "parent": parent, "coeff": float(coeff)})
        weights.append(float(fit.weights[canonical_edge(child, parent)]))
        error_vars[child] = 1.0 - coeff * coeff
    return {
        "format_version": FORMAT_VERSION,
        "d": fit.tree.d,
        "root": fit.root,
        "edges": edges,
        "error_vars": error_vars,
        "unit_variance": True,
        "objective": float(fit.objective),
        "weights": weights,
        "tree_unique": bool(fit.tree_unique),
        "root_hint_source": fit.root_hint_source,
        "names": list(fit.names) if fit.names is not None else None,
    }


def document_to_fit(doc: Mapping):
    """Validate a fit document and rebuild the fit result.

    Raises a schema error naming the offending field path.
    """
    from .regression import FitResult

    _check_version(doc)
    d = _require_int(doc, "d", minimum=1)
    root = _require_int(doc, "root", minimum=0)
    if root >= d:
        raise SchemaError(f"root: {root} out of range for d={d}")
    edges_field = _require(doc, "edges", list)
    if len(edges_field) != d - 1:
        raise SchemaError(f"edges: expected {d - 1} entries for d={d}, got {len(edges_field)}")
    coeffs: dict[int, float] = {}
    parents: dict[int, int] = {}
    pairs = []
    for k, entry in enumerate(edges_field):
        if not isinstance(entry, Mapping):
            raise SchemaError(f"edges[{k}]: expected an object")
        child = _require_int(entry, "child", minimum=0, prefix=f"edges[{k}].")
        parent = _require_int(entry, "parent", minimum=0, prefix=f"edges[{k}].")
        coeff = _require_number(entry, "coeff", prefix=f"edges[{k}].")
        if child >= d or parent >= d:
            raise SchemaError(f"edges[{k}]: vertex out of range for d={d}")
        if child == root:
            raise SchemaError(f"edges[{k}].child: the root {root} cannot be a child")
        if child in coeffs:
            raise SchemaError(f"edges[{k}].child: vertex {child} appears twice")
        coeffs[child] = coeff
        parents[child] = parent
        pairs.append((child, parent))
    try:
        tree = Tree.from_edges(d, pairs)
    except InvalidInputError as exc:
        raise SchemaError(f"edges: {exc}") from None
    rt = root_tree(tree, root)
    for child, parent in parents.items():
        if rt.parent[child] != parent:
            raise SchemaError(
                f"edges: edge orientation {parent} -> {child} inconsistent with root {root}"
            )
    error_vars = _require(doc, "error_vars", list)
    if len(error_vars) != d:
        raise SchemaError(f"error_vars: expected {d} entries, got {len(error_vars)}")
    # zero is legal here (a perfectly collinear pair fits with |coeff| = 1);
    # rebuilding a generative model from such a document fails separately
    for k, v in enumerate(error_vars):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v >= 0:
            raise SchemaError(f"error_vars[{k}]: expected a nonnegative number, got {v!r}")
    _require(doc, "unit_variance", bool)
    weights_field = _require(doc, "weights", list)
    if len(weights_field) != d - 1:
        raise SchemaError(f"weights: expected {d - 1} entries aligned with edges")
    weights = {}
    for k, w in enumerate(weights_field):
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise SchemaError(f"weights[{k}]: expected a number, got {w!r}")
        weights[canonical_edge(*pairs[k])] = float(w)
    source = _require(doc, "root_hint_source", str)
    if source not in _SOURCES:
        raise SchemaError(f"root_hint_source: expected one of {_SOURCES}, got {source!r}")
    names_field = doc.get("names")
    if names_field is not None:
        if not isinstance(names_field, list) or not all(isinstance(s, str) for s in names_field):
            raise SchemaError("names: expected a list of strings or null")
        if len(names_field) != d:
            raise SchemaError(f"names: expected {d} entries, got {len(names_field)}")
    return FitResult(
        tree=tree,
        root=root,
        coeffs=coeffs,
        objective=_require_number(doc, "objective"),
        weights=weights,
        tree_unique=_require(doc, "tree_unique", bool),
        root_hint_source=source,
        names=tuple(names_field) if names_field is not None else None,
    )


def model_from_document(doc: Mapping):
    """Rebuild the generative model a fit document describes.

    Unit-variance documents go through the checked unit-variance
    constructor (so zero or out-of-range coefficients are rejected) and
    the stored error variances must agree with the reconstruction.
    """
    from .cascade import CascadeModel, make_unit_variance_model

    fit = document_to_fit(doc)
    rt = root_tree(fit.tree, fit.root)
    error_vars = {i: float(v) for i, v in enumerate(doc["error_vars"])}
    if doc["unit_variance"]:
        try:
            model = make_unit_variance_model(rt, fit.coeffs)
        except InvalidInputError as exc:
            raise SchemaError(f"edges: unit-variance model rejected: {exc}") from None
        for i in range(fit.tree.d):
            if abs(model.error_vars[i] - error_vars[i]) > 1e-12:
                raise SchemaError(
                    f"error_vars[{i}]: {error_vars[i]!r} inconsistent with "
                    "unit-variance coefficients"
                )
        return model
    return CascadeModel(rt, fit.coeffs, error_vars, unit_variance=False)


def save_fit(fit, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_document(fit_to_document(fit)))
        handle.write("\n")


def load_fit(path):
    return document_to_fit(load_document(path))


def load_document(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object at top level")
    return doc


def dumps_document(value) -> str:
    """Serialize with a fixed layout and 17-significant-digit decimals."""
    return _dumps(value, 0)


def _dumps(value, level: int) -> str:
    pad = "  " * level
    inner = "  " * (level + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError(f"cannot serialize non-finite number {value!r}")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(inner + _dumps(v, level + 1) for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_dumps(v, level + 1)}" for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    raise InvalidInputError(f"cannot serialize {type(value).__name__} to a document")


def _check_version(doc: Mapping) -> None:
    version = _require_int(doc, "format_version", minimum=1)
    if version != FORMAT_VERSION:
        raise SchemaError(f"format_version: unsupported version {version}")


def _require(doc: Mapping, key: str, kind, prefix: str = ""):
    if key not in doc:
        raise SchemaError(f"missing field: {prefix}{key}")
    value = doc[key]
    if kind is bool:
        if not isinstance(value, bool):
            raise SchemaError(f"{prefix}{key}: expected a boolean, got {value!r}")
    elif not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(f"{prefix}{key}: expected {kind.__name__}, got {value!r}")
    return value


def _require_int(doc: Mapping, key: str, minimum: int, prefix: str = "") -> int:
    value = _require(doc, key, int, prefix)
    if value < minimum:
        raise SchemaError(f"{prefix}{key}: expected an integer >= {minimum}, got {value}")
    return value


def _require_number(doc: Mapping, key: str, prefix: str = "") -> float:
    if key not in doc:
        raise SchemaError(f"missing field: {prefix}{key}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{prefix}{key}: expected a number, got {value!r}")
    return float(value)
