"""CSV panels and JSON reports.

Panels are stored one series per row, comma separated, with optional ``#``
comment lines. Values are written with 17 significant digits so reading a
written file returns the exact same doubles.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from ._version import __version__
from .estimator import OrderEstimate
from .exceptions import PanelError, RaggedRows
from .panel import Panel, validate_panel

__all__ = ["CsvParseError", "read_panel_csv", "write_panel_csv", "report_dict", "REPORT_SCHEMA"]

REPORT_SCHEMA = "dfmorder.report/1"


class CsvParseError(PanelError):
    kind = "CsvParseError"

    def __init__(self, row, col, line, text, reason="cannot parse"):
        self.row, self.col, self.line = row, col, line
        super().__init__(f"row {row}, column {col} (line {line}): {reason} {text!r}")


def _data_lines(text, header):
    skipped = not header
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not skipped:
            skipped = True
            continue
        yield lineno, line


def read_panel_csv(source, header: bool = False) -> Panel:
    """Read a panel from a path, a file object or CSV text.

    Rows and columns in diagnostics are 1-based and count data rows only.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    rows = []
    for r, (lineno, line) in enumerate(_data_lines(text, header), start=1):
        cells = next(csv.reader([line]))
        values = []
        for j, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise CsvParseError(r, j, lineno, cell) from None
            if not math.isfinite(v):
                raise CsvParseError(r, j, lineno, cell, "non-finite value")
            values.append(v)
        if rows and len(values) != len(rows[0]):
            raise RaggedRows(r, len(rows[0]), len(values))
        rows.append(values)
    return validate_panel(rows)


def write_panel_csv(panel, dest=None, comments=()) -> str | None:
    """Write ``panel`` as CSV to ``dest`` (path or file object); return the text if ``dest`` is None."""
    data = panel.data if isinstance(panel, Panel) else np.asarray(panel, dtype=float)
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    for row in np.atleast_2d(data):
        buf.write(",".join("%.17g" % v for v in row))
        buf.write("\n")
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return None


def _num(x):
    return None if x is None or (isinstance(x, float) and math.isnan(x)) else x


def report_dict(est: OrderEstimate, report_eigs: int = 13) -> dict:
    spec0 = est.spectra[0]
    counts = []
    for (tau, cnt), spec in zip(est.counts, est.spectra):
        top = spec.abs_sorted[: max(0, int(report_eigs))]
        counts.append({"tau": tau, "count": cnt, "top_eigenvalues": [float(v) for v in top]})
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "n": spec0.n,
        "T": spec0.t_used,
        "c": spec0.c,
        "sigma2_hat": est.sigma2_hat,
        "sigma2_source": est.sigma2_source,
        "thresholds": est.thresholds.as_dict(),
        "s0": est.s0,
        "counts": counts,
        "k_hat": _num(est.k_hat),
        "q_hat": _num(est.q_hat),
        "warnings": list(est.warnings),
    }
