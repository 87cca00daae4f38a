"""Directed-dyad panel data.

A :class:`DyadDataset` holds one outcome ``y_ij >= 0`` and one regressor
vector ``r_ij`` for every ordered pair ``(i, j)`` of distinct nodes. Records
are stored flat in lexicographic ``(i, j)`` order, so the position of a pair
is a closed-form function of its indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateDyad,
    DuplicateLabel,
    IncompletePanel,
    MissingNodeRow,
    NegativeOutcome,
    NonFiniteValue,
    SelfLoop,
    UnknownColumn,
    UnknownLabel,
)

__all__ = [
    "DyadDataset",
    "NodeTable",
    "build_dataset",
    "dataset_from_dense",
    "expand_node_covariates",
    "add_intercept",
    "relabel_nodes",
    "pair_index",
]


def pair_index(i: int, j: int, n_nodes: int) -> int:
    """Flat position of the ordered pair (i, j) in lexicographic storage."""
    return i * (n_nodes - 1) + j - (j > i)


def _pair_arrays(n_nodes):
    ego = np.repeat(np.arange(n_nodes), n_nodes - 1)
    alter = np.tile(np.arange(n_nodes - 1), n_nodes)
    alter = alter + (alter >= ego)
    return ego, alter


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DyadDataset:
    """Complete directed-dyad panel.

    ``y`` has shape ``(N(N-1),)`` and ``X`` shape ``(N(N-1), p)``; row ``k``
    is the ordered pair ``(ego[k], alter[k])``. Arrays are read-only.
    """

    node_labels: tuple
    regressor_names: tuple
    y: np.ndarray
    X: np.ndarray
    ego: np.ndarray = field(repr=False)
    alter: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def n_dyads(self) -> int:
        return self.y.shape[0]

    @property
    def n_regressors(self) -> int:
        return self.X.shape[1]

    def node_index(self, label) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise UnknownLabel(f"unknown node label {label!r}") from None

    @property
    def _label_index(self):
        # cached lazily; dataclass is frozen so bypass __setattr__
        idx = self.__dict__.get("_label_index_cache")
        if idx is None:
            idx = {lab: k for k, lab in enumerate(self.node_labels)}
            object.__setattr__(self, "_label_index_cache", idx)
        return idx

    def record(self, i: int, j: int):
        """Return ``(y_ij, r_ij)`` for node indices ``i != j``."""
        if i == j:
            raise SelfLoop(f"no record for self-pair ({i}, {i})")
        k = pair_index(i, j, self.n_nodes)
        return float(self.y[k]), self.X[k]

    def records(self) -> Iterator[tuple]:
        """Yield ``(ego_label, alter_label, y, r)`` in lexicographic index order."""
        labels = self.node_labels
        for k in range(self.n_dyads):
            yield labels[self.ego[k]], labels[self.alter[k]], float(self.y[k]), self.X[k].copy()

    def dense_y(self) -> np.ndarray:
        """Outcomes as an ``(N, N)`` array with a zero diagonal."""
        out = np.zeros((self.n_nodes, self.n_nodes))
        out[self.ego, self.alter] = self.y
        return out

    def dense_X(self) -> np.ndarray:
        """Regressors as an ``(N, N, p)`` array with zero diagonal blocks."""
        out = np.zeros((self.n_nodes, self.n_nodes, self.n_regressors))
        out[self.ego, self.alter] = self.X
        return out


def _validate_values(y, X):
    if not np.all(np.isfinite(y)):
        k = int(np.flatnonzero(~np.isfinite(y))[0])
        raise NonFiniteValue(f"non-finite outcome at record {k}")
    if not np.all(np.isfinite(X)):
        k = int(np.flatnonzero(~np.all(np.isfinite(X), axis=1))[0])
        raise NonFiniteValue(f"non-finite regressor at record {k}")
    if np.any(y < 0):
        k = int(np.flatnonzero(y < 0)[0])
        raise NegativeOutcome(f"negative outcome {y[k]!r} at record {k}")


def _default_names(p):
    return tuple(f"x{k}" for k in range(p))


def _make(labels, names, y, X):
    n = len(labels)
    ego, alter = _pair_arrays(n)
    return DyadDataset(
        node_labels=tuple(labels),
        regressor_names=tuple(names),
        y=_readonly(np.asarray(y, dtype=float)),
        X=_readonly(np.asarray(X, dtype=float)),
        ego=_readonly(ego),
        alter=_readonly(alter),
    )


def _check_labels(node_labels):
    labels = [str(lab) for lab in node_labels]
    if len(labels) < 2:
        raise IncompletePanel("a dyad panel needs at least 2 nodes")
    seen = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"duplicate node label {lab!r}")
        seen.add(lab)
    return labels


def build_dataset(
    node_labels: Sequence,
    dyad_records: Iterable,
    regressor_names: Sequence[str] | None = None,
) -> DyadDataset:
    """Validate ``(ego_label, alter_label, y, r)`` records into a complete panel.

    Node indices follow the order of ``node_labels``. Every ordered pair of
    distinct labels must appear exactly once.
    """
    labels = _check_labels(node_labels)
    n = len(labels)
    index = {lab: k for k, lab in enumerate(labels)}

    y = np.full(n * (n - 1), np.nan)
    seen = np.zeros(n * (n - 1), dtype=bool)
    X = None
    for rec in dyad_records:
        a, b, yv, r = rec
        a, b = str(a), str(b)
        if a not in index:
            raise UnknownLabel(f"unknown ego label {a!r}")
        if b not in index:
            raise UnknownLabel(f"unknown alter label {b!r}")
        i, j = index[a], index[b]
        if i == j:
            raise SelfLoop(f"self-loop record ({a!r}, {a!r})")
        k = pair_index(i, j, n)
        if seen[k]:
            raise DuplicateDyad(f"duplicate record for ({a!r}, {b!r})")
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if X is None:
            X = np.zeros((n * (n - 1), r.shape[0]))
        elif r.shape[0] != X.shape[1]:
            raise ValueError(f"record ({a!r}, {b!r}) has {r.shape[0]} regressors, expected {X.shape[1]}")
        seen[k] = True
        y[k] = yv
        X[k] = r

    if not seen.all():
        k = int(np.flatnonzero(~seen)[0])
        ego, alter = _pair_arrays(n)
        pair = (labels[ego[k]], labels[alter[k]])
        raise IncompletePanel(
            f"incomplete panel: {int((~seen).sum())} ordered pairs missing, e.g. {pair}",
            missing=pair,
        )
    _validate_values(y, X)
    names = _default_names(X.shape[1]) if regressor_names is None else tuple(regressor_names)
    if len(names) != X.shape[1]:
        raise ValueError("regressor_names length does not match regressor vectors")
    return _make(labels, names, y, X)


def dataset_from_dense(y, X, node_labels=None, regressor_names=None) -> DyadDataset:
    """Build a dataset from ``(N, N)`` outcomes and ``(N, N, p)`` regressors.

    Diagonal entries are ignored.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[:, :, None]
    n = y.shape[0]
    if y.shape != (n, n) or X.shape[:2] != (n, n):
        raise ValueError("dense inputs must have shapes (N, N) and (N, N, p)")
    labels = _check_labels(range(n) if node_labels is None else node_labels)
    if len(labels) != n:
        raise ValueError("node_labels length does not match N")
    ego, alter = _pair_arrays(n)
    yf, Xf = y[ego, alter], X[ego, alter]
    _validate_values(yf, Xf)
    names = _default_names(X.shape[2]) if regressor_names is None else tuple(regressor_names)
    if len(names) != X.shape[2]:
        raise ValueError("regressor_names length does not match p")
    return _make(labels, names, yf, Xf)


def add_intercept(dataset: DyadDataset, name: str = "intercept") -> DyadDataset:
    """Prepend an all-ones regressor column."""
    X = np.column_stack([np.ones(dataset.n_dyads), dataset.X])
    return _make(dataset.node_labels, (name,) + dataset.regressor_names, dataset.y, X)


@dataclass(frozen=True)
class NodeTable:
    """Numeric node attributes keyed by label."""

    labels: tuple
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        if len(set(labels)) != len(labels):
            dup = next(lab for lab in labels if labels.count(lab) > 1)
            raise DuplicateLabel(f"duplicate node label {dup!r}")
        cols = {}
        for name, values in self.columns.items():
            values = np.asarray(values, dtype=float)
            if values.shape != (len(labels),):
                raise ValueError(f"column {name!r} has wrong length")
            cols[name] = _readonly(values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "columns", cols)

    @property
    def shape(self):
        return len(self.labels), len(self.columns)

    def column_names(self):
        return list(self.columns)


def expand_node_covariates(
    dataset: DyadDataset,
    node_table: NodeTable,
    ego_cols: Sequence[str] = (),
    alter_cols: Sequence[str] = (),
) -> DyadDataset:
    """Append ego values of ``ego_cols`` then alter values of ``alter_cols``.

    New regressors are named ``<col>_ego`` and ``<col>_alter``.
    """
    ego_cols, alter_cols = list(ego_cols), list(alter_cols)
    if not ego_cols and not alter_cols:
        return dataset
    for col in ego_cols + alter_cols:
        if col not in node_table.columns:
            raise UnknownColumn(f"node table has no column {col!r}")
    row = {lab: k for k, lab in enumerate(node_table.labels)}
    missing = [lab for lab in dataset.node_labels if lab not in row]
    if missing:
        raise MissingNodeRow(f"node table has no row for {missing[0]!r}")
    order = np.array([row[lab] for lab in dataset.node_labels])
    ego_rows, alter_rows = order[dataset.ego], order[dataset.alter]

    new_cols = [node_table.columns[c][ego_rows] for c in ego_cols]
    new_cols += [node_table.columns[c][alter_rows] for c in alter_cols]
    X = np.column_stack([dataset.X] + new_cols)
    _validate_values(dataset.y, X)
    names = dataset.regressor_names + tuple(f"{c}_ego" for c in ego_cols) + tuple(f"{c}_alter" for c in alter_cols)
    return _make(dataset.node_labels, names, dataset.y, X)


def relabel_nodes(dataset: DyadDataset, order: Sequence[int]) -> DyadDataset:
    """Reindex nodes so that new node ``k`` is old node ``order[k]``."""
    order = np.asarray(order)
    if sorted(order.tolist()) != list(range(dataset.n_nodes)):
        raise ValueError("order must be a permutation of node indices")
    y = dataset.dense_y()[np.ix_(order, order)]
    X = dataset.dense_X()[np.ix_(order, order)]
    labels = [dataset.node_labels[k] for k in order]
    return dataset_from_dense(y, X, labels, dataset.regressor_names)
