import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import pandas as pd

pylogger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def header_line(kind: str, version: int = FORMAT_VERSION) -> str:
    return f"# bbdpd-{kind} v{version}"


def write_versioned_records(path: Union[str, Path], kind: str, meta: Dict, records: List[Dict]) -> Path:
    """Header line, one JSON line of metadata, then one JSON line per record."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with open(path, "w") as f:
        f.write(header_line(kind) + "\n")
        f.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")

    pylogger.info(f"Wrote {len(records)} {kind} records to {path}")
    return path


def read_versioned_records(path: Union[str, Path], kind: str) -> Tuple[Dict, List[Dict]]:
    with open(path) as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]

    if not lines or not lines[0].startswith(f"# bbdpd-{kind} v"):
        raise ValueError(f"{path} is not a bbdpd {kind} dump")

    version = int(lines[0].rsplit("v", 1)[1])
    if version != FORMAT_VERSION:
        raise ValueError(f"Unsupported {kind} dump version {version}, expected {FORMAT_VERSION}")

    meta = json.loads(lines[1])["meta"]
    records = [json.loads(line) for line in lines[2:]]
    return meta, records


def save_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Deterministic CSV: fixed column order, no index, repr-stable floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    pylogger.info(f"Wrote {len(df)} rows to {path}")
    return path
