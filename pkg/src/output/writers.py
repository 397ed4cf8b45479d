"""Write CSV, JSON and gnuplot artifacts with provenance headers."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class ArtifactWriter:
    """Write run outputs into one directory.

    Every file carries the same provenance (config hash, seed, command) so
    that equal inputs produce byte-identical artifacts.
    """

    def __init__(self, output_dir: Union[str, Path], provenance: Optional[Dict[str, Any]] = None):
        """Initialize the writer.

        Args:
            output_dir: Directory for artifacts (created if missing)
            provenance: Key/value pairs written into every artifact
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.provenance = dict(provenance or {})

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def write_csv(self, frame: pd.DataFrame, name: str, extra: Optional[Dict[str, Any]] = None) -> Path:
        """Write a table preceded by ``# key: value`` comment lines.

        Args:
            frame: Table to write
            name: File name inside the output directory
            extra: Additional header entries for this file

        Returns:
            Path to the written file
        """
        path = self.path(name)
        header = {**self.provenance, **(extra or {})}
        with open(path, "w", newline="") as f:
            for key in sorted(header):
                f.write(f"# {key}: {_format_value(header[key])}\n")
            frame.to_csv(f, float_format=FLOAT_FORMAT, index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, data: Dict[str, Any], name: str) -> Path:
        """Write a report with the provenance keys merged in."""
        path = self.path(name)
        payload = {**data, **self.provenance}
        with open(path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=str)
            f.write("\n")
        logger.info(f"Wrote report to {path}")
        return path

    def write_gnuplot(self, csv_name: str, name: str, x_label: str, y_label: str, title: str = "") -> Path:
        """Emit a gnuplot script plotting the first two columns of a CSV."""
        path = self.path(name)
        lines = [
            "set datafile separator ','",
            "set datafile commentschars '#'",
            f"set xlabel '{x_label}'",
            f"set ylabel '{y_label}'",
            f"set title '{title}'",
            "set key off",
            f"plot '{csv_name}' every ::1 using 1:2 with lines lw 2",
        ]
        path.write_text("\n".join(lines) + "\n")
        logger.debug(f"Wrote gnuplot script {path}")
        return path


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, default=str)
    return str(value)


def write_series_csv(frame: pd.DataFrame, path: Union[str, Path], provenance: Optional[Dict[str, Any]] = None) -> Path:
    """Convenience function writing one CSV artifact.

    Args:
        frame: Table to write
        path: Output file path
        provenance: Header entries

    Returns:
        Path to the written file
    """
    path = Path(path)
    return ArtifactWriter(path.parent, provenance).write_csv(frame, path.name)
