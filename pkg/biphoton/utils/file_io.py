import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from biphoton.exceptions import InvalidInputError, SpectrumParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class FileHandler:
    @staticmethod
    def parse_numeric_table(text: str, n_columns: int, header: Sequence[str] = ()) -> np.ndarray:
        """Parse comma-separated numeric rows, skipping blank and '#' lines.

        A first non-comment line equal to `header` is skipped. Malformed rows
        raise SpectrumParseError carrying their 1-based line number; read line
        by line rather than through pandas, which does not report source lines.
        """
        rows = []
        expect_header = bool(header)
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if expect_header:
                expect_header = False
                if [f.lower() for f in fields] == [h.lower() for h in header]:
                    continue
            if len(fields) != n_columns:
                raise SpectrumParseError(f"expected {n_columns} columns, got {len(fields)}", line_number)
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise SpectrumParseError(f"non-numeric value in '{line}'", line_number) from None
            if not all(np.isfinite(values)):
                raise SpectrumParseError(f"non-finite value in '{line}'", line_number)
            rows.append(values)
        if not rows:
            raise SpectrumParseError("document contains no data rows")
        return np.array(rows, dtype=float)

    @staticmethod
    def read_text(path: PathLike) -> str:
        path = Path(path)
        if not path.exists():
            raise InvalidInputError(f"File '{path}' not found")
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    @staticmethod
    def write_text(text: str, path: PathLike) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return path

    @staticmethod
    def save_table_csv(rows: Sequence[Sequence[Any]], columns: Sequence[str], filename: PathLike) -> Path:
        """Write rows to CSV with a fixed header and '\\n' line endings."""
        frame = pd.DataFrame(list(rows), columns=list(columns))
        path = Path(filename)
        frame.to_csv(path, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to '{path}'")
        return path

    @staticmethod
    def read_curve_csv(filename: PathLike, x_column: str = "delta_l_nm",
                       y_column: str = "rate_hv") -> List[Tuple[float, float]]:
        """Read a (delta_l, rate) curve from a CSV produced by a scan or an instrument."""
        path = Path(filename)
        if not path.exists():
            raise InvalidInputError(f"File '{path}' not found")
        try:
            frame = pd.read_csv(path, comment="#")
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise InvalidInputError(f"Cannot parse '{path}': {e}") from e
        missing = [c for c in (x_column, y_column) if c not in frame.columns]
        if missing:
            raise InvalidInputError(f"Columns {missing} not in '{path}' (has {list(frame.columns)})")
        try:
            x = frame[x_column].astype(float).to_numpy()
            y = frame[y_column].astype(float).to_numpy()
        except ValueError as e:
            raise InvalidInputError(f"Non-numeric data in '{path}': {e}") from e
        return list(zip(x.tolist(), y.tolist()))

    @staticmethod
    def save_json(document: Dict[str, Any], filename: PathLike) -> Path:
        path = Path(filename)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(document, sort_keys=True, indent=2))
            f.write("\n")
        logger.info(f"Wrote report '{path}'")
        return path
