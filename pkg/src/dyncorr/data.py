"""Dataset ingestion and standardization.

Input time series arrive as CSV: comma-separated numeric rows, an optional
single header row with channel names, UTF-8, LF or CRLF line endings. Leading
lines starting with '#' are skipped (our own outputs carry provenance there).
Columns are standardized to zero mean and unit sample standard deviation
(divisor K - 1) across the whole session.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .exceptions import (
    ConstantChannelError,
    InvalidDataError,
    NonFiniteValueError,
    ParseError,
    RaggedRowsError,
)


@dataclass(frozen=True)
class Dataset:
    """A standardized multivariate session: K time points by m channels."""

    values: np.ndarray  # (K, m), finite, columnwise mean 0 / sample std 1
    channel_names: List[str]
    sampling_interval: Optional[float] = None  # seconds, metadata only

    @property
    def K(self):
        return self.values.shape[0]

    @property
    def m(self):
        return self.values.shape[1]


def load_csv(path):
    """Parse a CSV of numeric rows into (matrix, channel_names_or_None).

    The first non-comment row is taken as a header when any of its cells is
    non-numeric. Errors carry 1-based row/column locations.
    """
    rows = []
    header = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if not cells or (len(cells) == 1 and not cells[0].strip()):
                continue  # blank line
            if cells[0].lstrip().startswith("#"):
                continue  # provenance/comment line
            if not rows and header is None and _is_header(cells):
                header = [c.strip() for c in cells]
                continue
            if rows and len(cells) != len(rows[0][1]):
                raise RaggedRowsError(
                    f"row {lineno} has {len(cells)} columns, expected {len(rows[0][1])}",
                    row=lineno,
                )
            parsed = []
            for col, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"row {lineno}, column {col}: cannot parse {cell!r} as a number",
                        row=lineno,
                        column=col,
                    ) from None
                if not math.isfinite(value):
                    raise NonFiniteValueError(
                        f"row {lineno}, column {col}: non-finite value {cell!r}",
                        row=lineno,
                        column=col,
                    )
                parsed.append(value)
            rows.append((lineno, parsed))
    if not rows:
        raise InvalidDataError(f"no data rows in {path}")
    if header is not None and len(header) != len(rows[0][1]):
        raise RaggedRowsError(
            f"header has {len(header)} columns, data rows have {len(rows[0][1])}"
        )
    matrix = np.array([r[1] for r in rows], dtype=np.float64)
    return matrix, header


def _is_header(cells):
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def standardize(raw, channel_names=None, sampling_interval=None):
    """Columnwise (x - mean) / sample std (divisor K - 1).

    Parameters
    ----------
    raw : array_like, shape (K, m)
        Session matrix, K >= 2, all finite, no constant column.
    channel_names : list of str, optional
        Defaults to ch1..chm.

    Returns
    -------
    Dataset
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise InvalidDataError(f"expected a 2-d matrix, got shape {raw.shape}")
    K, m = raw.shape
    if K < 2:
        raise InvalidDataError(f"need at least 2 time points, got {K}")
    if not np.all(np.isfinite(raw)):
        raise InvalidDataError("matrix contains non-finite values")
    mean = raw.mean(axis=0)
    std = raw.std(axis=0, ddof=1)
    zero = np.where(std == 0.0)[0]
    if zero.size:
        raise ConstantChannelError(
            f"column(s) {zero.tolist()} have zero variance and cannot be standardized"
        )
    values = (raw - mean) / std
    if channel_names is None:
        channel_names = [f"ch{i + 1}" for i in range(m)]
    elif len(channel_names) != m:
        raise InvalidDataError(
            f"got {len(channel_names)} channel names for {m} columns"
        )
    return Dataset(
        values=values,
        channel_names=list(channel_names),
        sampling_interval=sampling_interval,
    )
