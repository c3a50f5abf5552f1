"""Deterministic CSV/JSON output and run manifests.

CSV is RFC-4180 with LF newlines; floats are written with ``repr`` so
files are byte-stable across runs.  JSON uses sorted keys.  A RunManifest
records everything needed to reproduce a command's outputs bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: str | Path, header: tuple, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_value(v) for v in row])


def write_json(path: str | Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


TOOL_VERSION = "0.1.0"


def _library_versions() -> dict:
    import numpy
    import scipy
    return {"numpy": numpy.__version__, "scipy": scipy.__version__}


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None
    outputs: list[str] = field(default_factory=list)
    started_at: str = ""
    finished_at: str = ""
    tool_version: str = TOOL_VERSION
    output_hashes: dict = field(default_factory=dict)
    versions: dict = field(default_factory=_library_versions)

    def start(self) -> "RunManifest":
        self.started_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return self

    def finish(self) -> "RunManifest":
        self.finished_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        for out in self.outputs:
            if Path(out).exists():
                self.output_hashes[out] = sha256_file(out)
        return self

    def save(self, path: str | Path) -> None:
        write_json(path, {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "outputs": self.outputs,
            "output_hashes": self.output_hashes,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "tool_version": self.tool_version,
            "versions": self.versions,
        })

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        d = json.loads(Path(path).read_text())
        return cls(command=d["command"], params=d["params"], seed=d["seed"],
                   outputs=d["outputs"], started_at=d["started_at"],
                   finished_at=d["finished_at"],
                   tool_version=d["tool_version"],
                   output_hashes=d.get("output_hashes", {}),
                   versions=d.get("versions", {}))
