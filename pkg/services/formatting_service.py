"""
Formatting and output helpers for reports.
JSON goes to stdout or a file, tables are written as RFC-4180 CSV through pandas.
"""

import csv
import json
import math
import sys
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd


def fmt_complex(value, digits: int = 12) -> str:
    """Format a complex number as 'a+bj' with fixed significant digits"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    value = complex(value)
    return f"{value.real:.{digits}g}{value.imag:+.{digits}g}j"


def fmt_error(value) -> str:
    if value is None or pd.isna(value):
        return "-"
    return f"{value:.2e}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars, arrays and complex numbers into JSON types"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def format_report(report: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=False)


def emit_report(report: Dict[str, Any], path: Optional[str] = None) -> None:
    """Write a JSON report to path, or to stdout when no path is given"""
    text = format_report(report)
    if path:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def write_csv(frame: pd.DataFrame, path: Optional[str] = None) -> str:
    """RFC-4180 CSV (CRLF line ends, minimal quoting); returns the text"""
    text = frame.to_csv(index=False, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    if path:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    return text
