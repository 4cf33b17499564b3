"""Export functionality for simulation results"""

import csv
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from data.models import RunManifest

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Locale-independent text for one CSV cell; floats keep 17 significant digits"""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _atomic_write(path: Path, write) -> None:
    """Write through a temporary file in the target directory, then rename"""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', newline='', encoding='utf-8') as f:
            write(f)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise


class DataExporter:
    """Write result tables and run manifests"""

    def __init__(self, out_dir: str = "."):
        self.out_dir = Path(out_dir)

    def resolve(self, file_name: str) -> Path:
        """Place relative output names under the output directory"""
        path = Path(file_name)
        return path if path.is_absolute() else self.out_dir / path

    def export_csv(self, file_name: str, header: Sequence[str],
                   rows: Iterable[Sequence[Any]]) -> Path:
        """Export rows to a CSV file with a fixed column order"""
        path = self.resolve(file_name)

        def write(f):
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v) for v in row])

        _atomic_write(path, write)
        logger.info("Wrote %s", path)
        return path

    def export_manifest(self, file_name: str, manifest: RunManifest) -> Path:
        """Export a run manifest as sorted JSON"""
        path = self.resolve(file_name)

        def write(f):
            json.dump(manifest.to_dict(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write('\n')

        _atomic_write(path, write)
        logger.info("Wrote %s", path)
        return path

    @staticmethod
    def load_manifest(file_path: str) -> RunManifest:
        """Read a manifest written by export_manifest"""
        with open(file_path, 'r', encoding='utf-8') as f:
            return RunManifest.from_dict(json.load(f))


def manifest_name(csv_name: str) -> str:
    """Manifest file name that sits next to a CSV output"""
    path = Path(csv_name)
    return str(path.with_name(path.stem + ".manifest.json"))


def column_names(variances: List[float]) -> List[str]:
    """Probability column per variance, e.g. P_0.1"""
    return [f"P_{float(v)!r}" for v in variances]
