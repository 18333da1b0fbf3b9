import json
import logging
import os
import tempfile
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .scenarios import SweepTable

logger = logging.getLogger(__name__)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def rows_to_csv(names: Sequence[str], rows: Iterable[Sequence[float]]) -> List[str]:
    """Header line followed by one .17g-formatted line per row."""
    return [",".join(names)] + [",".join(format_float(x) for x in row) for row in rows]


def table_to_csv(table: SweepTable, metadata: Optional[Mapping[str, Any]] = None) -> str:
    """
    Render a table as CSV.

    Parameters
    ----------
    table : SweepTable
        Table to render
    metadata : Mapping[str, Any], optional
        Extra "# key=value" lines written after the table's own parameters

    Returns
    -------
    str
        Metadata comment lines, a header and one row per grid point, LF endings
    """
    lines = [f"# scenario={table.scenario}"]
    for key, value in {**table.params, **(metadata or {})}.items():
        lines.append(f"# {key}={value}")
    lines.extend(rows_to_csv(table.names, table.rows))
    return "\n".join(lines) + "\n"


def table_to_json(table: SweepTable) -> str:
    return json.dumps(
        {
            "scenario": table.scenario,
            "params": table.params,
            "columns": [{"name": n, "unit": u} for n, u in table.columns],
            "rows": [list(row) for row in table.rows],
        }
    ) + "\n"


def render_table(
    table: SweepTable, fmt: str = "csv", metadata: Optional[Mapping[str, Any]] = None
) -> str:
    return table_to_json(table) if fmt == "json" else table_to_csv(table, metadata)


def to_jsonl(records: Iterable[Mapping[str, Any]]) -> str:
    return "".join(json.dumps(record) + "\n" for record in records)


class ArtifactWriter:
    """Handles result files for sweeps, checks and audits."""

    def __init__(self, output_dir: str = "."):
        """
        Initialize ArtifactWriter.

        Parameters
        ----------
        output_dir : str
            Directory that relative paths resolve against (default: ".")
        """
        self.output_dir = os.path.abspath(output_dir)

    def _resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.output_dir, path)

    def write_text(self, path: str, content: str) -> Dict[str, Any]:
        """
        Write content through a temporary file and an atomic rename.

        Parameters
        ----------
        path : str
            Target file
        content : str
            Text to write, LF line endings kept as is

        Returns
        -------
        dict
            Result with success status and the file path or error message
        """
        target = self._resolve(path)
        directory = os.path.dirname(target) or "."
        temp_path = None
        try:
            os.makedirs(directory, mode=0o755, exist_ok=True)
            fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".coherence-", suffix=".tmp")
            with os.fdopen(fd, "w", newline="\n") as f:
                f.write(content)
            os.replace(temp_path, target)
            logger.info(f"Wrote {target}")
            return {"success": True, "file_path": target}
        except OSError as e:
            error_msg = f"Failed to write {target}: {e}"
            logger.error(error_msg)
            self.cleanup_temp_file(temp_path)
            return {"success": False, "error": error_msg}

    def write_table(
        self,
        path: str,
        table: SweepTable,
        fmt: str = "csv",
        metadata: Optional[Mapping[str, Any]] = None,
    ) -> Dict[str, Any]:
        return self.write_text(path, render_table(table, fmt, metadata))

    def write_jsonl(self, path: str, records: Iterable[Mapping[str, Any]]) -> Dict[str, Any]:
        return self.write_text(path, to_jsonl(records))

    def cleanup_temp_file(self, file_path: Optional[str]) -> bool:
        """
        Remove a leftover temporary file.

        Returns
        -------
        bool
            True if nothing is left behind, False otherwise
        """
        try:
            if file_path and os.path.exists(file_path):
                os.unlink(file_path)
                logger.info(f"Cleaned up temporary file: {file_path}")
            return True
        except OSError as e:
            logger.warning(f"Failed to clean up file {file_path}: {e}")
            return False
