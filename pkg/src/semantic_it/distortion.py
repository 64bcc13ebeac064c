"""Semantic distortion matrices: cosine distance on features, 0/1 class loss, files."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ratedistortion import DistortionMatrix


class DistortionFileError(ValidationError):
    pass


class DistortionParseError(DistortionFileError):
    """A cell is not a number."""


class RaggedRowsError(DistortionFileError):
    """Rows of the grid have different lengths."""


class NegativeEntryError(DistortionFileError):
    """A cell is negative."""


@dataclass(frozen=True, eq=False)
class FeatureTable:
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError("feature table: expected one vector of dimension >= 1 per symbol")
        if not np.all(np.isfinite(v)):
            raise ValidationError("feature table: non-finite component")
        zero = np.flatnonzero(~np.any(v != 0, axis=1))
        if zero.size:
            raise ValidationError(f"feature table: vector {int(zero[0])} is all zeros (cosine undefined)")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def load(cls, path) -> "FeatureTable":
        """Rows 'index, c1, c2, ...'; indices must cover 0..n-1 exactly once."""
        rows = {}
        for lineno, fields in _read_rows(path):
            try:
                idx = int(fields[0])
                vec = [float(t) for t in fields[1:]]
            except ValueError:
                raise DistortionParseError(f"{path}:{lineno}: unparsable feature row") from None
            if idx in rows:
                raise ValidationError(f"{path}:{lineno}: duplicate symbol index {idx}")
            rows[idx] = (lineno, vec)
        if sorted(rows) != list(range(len(rows))):
            raise ValidationError(f"{path}: symbol indices must be exactly 0..{len(rows) - 1}")
        dims = {len(v) for _, v in rows.values()}
        if len(dims) != 1:
            bad = next(ln for ln, v in rows.values() if len(v) != len(rows[0][1]))
            raise RaggedRowsError(f"{path}:{bad}: feature dimension differs from row 0")
        return cls([rows[i][1] for i in range(len(rows))])


def cosine_distortion(ft: FeatureTable) -> DistortionMatrix:
    """d(i, j) = (1 - cos(v_i, v_j)) / 2, in [0, 1]."""
    u = ft.vectors / np.linalg.norm(ft.vectors, axis=1, keepdims=True)
    # for unit vectors (1 - cos) / 2 = |u_i - u_j|^2 / 4, which is exactly 0 for
    # identical directions and avoids cancellation near cos = 1
    diff = u[:, None, :] - u[None, :, :]
    d = np.clip(np.einsum("ijk,ijk->ij", diff, diff) / 4.0, 0.0, 1.0)
    d = (d + d.T) / 2.0
    return DistortionMatrix(d)


def class_mismatch_distortion(m: int) -> DistortionMatrix:
    if m < 1:
        raise ValidationError("class count must be >= 1")
    return DistortionMatrix(1.0 - np.eye(m))


def _read_rows(path):
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line.replace(",", " ").split()


def load_distortion(path) -> DistortionMatrix:
    """Numeric grid, comma or whitespace separated; row = source, column = reconstruction."""
    grid = []
    width = None
    for lineno, fields in _read_rows(path):
        try:
            row = [float(t) for t in fields]
        except ValueError:
            raise DistortionParseError(f"{path}:{lineno}: non-numeric cell") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRowsError(f"{path}:{lineno}: {len(row)} cells, expected {width}")
        for c, v in enumerate(row):
            if np.isnan(v):
                raise DistortionParseError(f"{path}:{lineno}: row {len(grid)}, column {c} is NaN")
            if v < 0:
                raise NegativeEntryError(f"{path}:{lineno}: row {len(grid)}, column {c} is {v}")
        grid.append(row)
    if not grid:
        raise DistortionParseError(f"{path}: no rows")
    return DistortionMatrix(grid)


def format_distortion(d: DistortionMatrix) -> str:
    return "".join(",".join(f"{v:.12g}" for v in row) + "\n" for row in d.cells)
