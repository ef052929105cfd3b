"""Deterministic JSON and CSV writers for command outputs."""
from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from pydantic import BaseModel

from src.lab.fem import FemField

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    # repr keeps every digit of a float so reruns compare byte for byte.
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_json(model: BaseModel, path: Path, exclude: Optional[set] = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(by_alias=True, indent=2, exclude=exclude) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    logger.info(f"Wrote {path}")
    return path


def field_rows(field: FemField) -> list[tuple[float, float, float]]:
    """Rows "x,y,value" of a nodal field."""
    nodes = field.mesh.nodes
    return [
        (float(x), float(y), float(v))
        for (x, y), v in zip(nodes.tolist(), field.values.tolist())
    ]
