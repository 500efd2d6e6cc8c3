"""
Result rows and their CSV/JSON serialization.

Output is byte-identical for identical rows: CSV uses \\r\\n line endings,
minimal quoting and floats formatted with 12 significant digits; JSON is an
indented array of objects with shortest round-trip floats.
"""

import csv
import io
import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional, Sequence

from src.model.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResultRow:
    sweep_value: Optional[float]
    policy: str
    analytic_hit: float
    simulated_hit: Optional[float] = None
    stderr: Optional[float] = None
    objective_gap: Optional[float] = None
    backhaul_latency_ms: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.analytic_hit <= 1.0):
            raise DomainError(f"analytic_hit must lie in [0, 1], got {self.analytic_hit}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


FIELD_NAMES = [f.name for f in fields(ResultRow)]


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def format_csv(rows: Sequence[ResultRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(FIELD_NAMES)
    for row in rows:
        record = row.to_dict()
        writer.writerow([_csv_value(record[name]) for name in FIELD_NAMES])
    return buffer.getvalue()


def format_json(rows: Sequence[ResultRow]) -> str:
    return json.dumps([row.to_dict() for row in rows], indent=2) + "\n"


def render_results(rows: Sequence[ResultRow], fmt: str) -> str:
    if fmt == "csv":
        return format_csv(rows)
    if fmt == "json":
        return format_json(rows)
    raise DomainError(f"unknown output format '{fmt}' (expected csv or json)")


def emit_results(rows: Sequence[ResultRow], fmt: str, path: Optional[str] = None) -> str:
    """Write rows to ``path`` (or return them only, when path is None).

    Returns:
        The serialized text
    """
    text = render_results(rows, fmt)
    if path:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logger.info(f"Wrote {len(rows)} rows to {path}")
    return text


def rows_from_json(text: str) -> List[ResultRow]:
    return [ResultRow(**record) for record in json.loads(text)]
