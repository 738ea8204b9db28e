"""CSV reading and writing for censored datasets.

Files need a header row and comma delimiters.  Column roles are chosen by
name: one or more covariate columns, a time column and a status column
holding 1 for an observed event and 0 for a censored one.  Row numbers in
error messages count data rows, starting at 1 for the first row after the
header.
"""

import csv
import math

import numpy as np

from censfit.exceptions import SchemaError
from censfit.likelihood import Dataset


def _parse_float(text, what, row):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise SchemaError(f"row {row}: {what} value {text!r} is not a number", row=row) from None
    if not math.isfinite(value):
        raise SchemaError(f"row {row}: {what} value {text!r} is not finite", row=row)
    return value


def _parse_status(text, row):
    try:
        value = float(text)
    except (TypeError, ValueError):
        value = None
    if value not in (0.0, 1.0):
        raise SchemaError(f"row {row}: status value {text!r} must be 0 or 1", row=row)
    return int(value)


def read_csv(path, covariates, time, status, intercept=False):
    """Load a dataset from ``path``.

    Args:
        covariates: covariate column names, in design-matrix order.
        time: name of the observed-time column.
        status: name of the censoring-indicator column.
        intercept: prepend a constant column of ones.

    Raises:
        OSError: the file cannot be read.
        SchemaError: header or values do not match the expected layout.
    """
    covariates = list(covariates)
    if not covariates and not intercept:
        raise SchemaError("at least one covariate column (or an intercept) is required")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError("file is empty; a header row is required") from None
        index = {name: j for j, name in enumerate(header)}
        for name in covariates + [time, status]:
            if name not in index:
                raise SchemaError(f"column {name!r} not found in header {header}")
        X, z, delta = [], [], []
        for row, fields in enumerate(reader, start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != len(header):
                raise SchemaError(
                    f"row {row}: expected {len(header)} fields, found {len(fields)}", row=row
                )
            x = [_parse_float(fields[index[c]], f"covariate {c!r}", row) for c in covariates]
            if intercept:
                x = [1.0] + x
            X.append(x)
            z.append(_parse_float(fields[index[time]], "time", row))
            delta.append(_parse_status(fields[index[status]].strip(), row))
    if not X:
        raise SchemaError("file contains a header but no data rows")
    return Dataset(np.array(X), np.array(z), np.array(delta))


def write_csv(data, path, names=None):
    """Write ``data`` with covariates ``x1..xp`` (or ``names``), then ``z`` and ``delta``.

    Floats are written with ``repr`` so reading back is exact.
    """
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(data.p)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["z", "delta"])
        for x, z, d in zip(data.X, data.z, data.delta):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(z)), int(d)])
