"""JSON and CSV artifacts with the run configuration as provenance header."""
import csv
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

from painlab import __version__
from painlab.config import RunConfig

logger = logging.getLogger(__name__)


class ArtifactWriter:
    """Serializes results deterministically: sorted keys, no timestamps."""

    def __init__(self, config: RunConfig):
        self.config = config

    def payload(self, result: Dict[str, Any]) -> Dict[str, Any]:
        return {
            "painlab_version": __version__,
            "config": self.config.to_dict(),
            "result": result,
        }

    def dumps(self, result: Dict[str, Any]) -> str:
        return json.dumps(self.payload(result), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def write_json(self, result: Dict[str, Any], path: Optional[str] = None) -> str:
        """Returns the JSON text; also writes it when a path is given."""
        text = self.dumps(result)
        path = path or self.config.output_path
        if path:
            _ensure_parent(path)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logger.info(f"wrote {path}")
        return text

    def write_csv(self, path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
        _ensure_parent(path)
        count = 0
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(list(header))
            for row in rows:
                writer.writerow(list(row))
                count += 1
        logger.info(f"wrote {count} rows to {path}")
        return count


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def read_json(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def read_csv(path: str) -> List[List[str]]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [row for row in csv.reader(f)]
