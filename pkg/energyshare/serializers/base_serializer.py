#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import io
import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, List, Mapping, Optional, Union

import pandas as pd
from loguru import logger

FLOAT_FORMAT = "%.10g"


class ResultSerializer(ABC):
    """Writes results as CSV preceded by `# key: value` provenance lines.

    Values in the provenance block are JSON encoded, so the resolved
    configuration can be read back from any output file.
    """

    @property
    @abstractmethod
    def columns(self) -> List[str]:
        pass

    @abstractmethod
    def rows(self, data: Any) -> List[Mapping[str, Any]]:
        pass

    def to_frame(self, data: Any) -> pd.DataFrame:
        return pd.DataFrame(self.rows(data), columns=self.columns)

    def serialize(self, data: Any, provenance: Optional[Mapping[str, Any]] = None) -> str:
        buffer = io.StringIO()
        for key, value in (provenance or {}).items():
            buffer.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        self.to_frame(data).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()

    def write(self, data: Any, path: Union[str, Path], provenance: Optional[Mapping[str, Any]] = None):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.serialize(data, provenance))
        logger.debug(f"{self.__class__.__name__} wrote {path}")


def read_provenance(path: Union[str, Path]) -> dict:
    """Provenance block of a file written by a `ResultSerializer`."""
    provenance = {}
    with open(path) as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].rstrip("\n").partition(": ")
            provenance[key] = json.loads(value)
    return provenance


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")
