# Copyright 2026 The Ladder Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writers for the engine's on-disk formats."""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

LADREMB_MAGIC = b"LADR"
LADREMB_VERSION = 1


class FormatError(ValueError):
    """Raised when exporter inputs cannot be written in a valid layout."""


def write_ladremb(path: Path, matrix: np.ndarray) -> None:
    """Writes a rows x dim float32 matrix with the 24-byte LADR header."""
    m = np.asarray(matrix, dtype="<f4")
    if m.ndim != 2 or m.shape[1] == 0:
        raise FormatError(f"{path}: expected a 2-D matrix with dim >= 1, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise FormatError(f"{path}: non-finite values")
    with open(path, "wb") as f:
        f.write(LADREMB_MAGIC)
        f.write(struct.pack("<IQQ", LADREMB_VERSION, m.shape[0], m.shape[1]))
        f.write(np.ascontiguousarray(m).tobytes())


def read_ladremb(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != LADREMB_MAGIC:
        raise FormatError(f"{path}: bad magic")
    version, rows, dim = struct.unpack_from("<IQQ", data, 4)
    if version != LADREMB_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    return np.frombuffer(data, dtype="<f4", offset=24, count=rows * dim).reshape(rows, dim)


def _write_jsonl(path: Path, rows: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def write_dataset(out_dir: Path, *, name: str, split: str, classes: Sequence[str],
                  samples: Sequence[Mapping], features: np.ndarray,
                  vlr_image: np.ndarray | None = None,
                  provenance: Mapping | None = None) -> Path:
    """Writes manifest.json, samples.jsonl and the embedding files.

    Each sample needs "id", "label" and "prediction"; "groups" and "score"
    are optional. Embedding row i belongs to samples[i].
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids = [s.get("id") for s in samples]
    if any(not isinstance(i, str) or not i for i in ids):
        raise FormatError("every sample needs a non-empty string id")
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate sample id")
    if len(samples) != np.asarray(features).shape[0]:
        raise FormatError(f"{len(samples)} samples but {np.asarray(features).shape[0]} feature rows")
    for s in samples:
        for key in ("label", "prediction"):
            if not 0 <= int(s[key]) < len(classes):
                raise FormatError(f"{s['id']}: {key} {s[key]} outside [0, {len(classes)})")
    write_ladremb(out_dir / "features.ladremb", features)
    manifest = {"name": name, "split": split, "classes": list(classes),
                "samples": "samples.jsonl", "features": "features.ladremb"}
    if vlr_image is not None:
        if len(samples) != np.asarray(vlr_image).shape[0]:
            raise FormatError("vlr_image row count differs from samples")
        write_ladremb(out_dir / "vlr_image.ladremb", vlr_image)
        manifest["vlr_image"] = "vlr_image.ladremb"
    if provenance:
        manifest["provenance"] = dict(provenance)
    _write_jsonl(out_dir / "samples.jsonl", samples)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_corpus(out_dir: Path, sentences: Sequence[Mapping], embeddings: np.ndarray) -> None:
    """Writes corpus.jsonl ({"id", "text"} per line) and corpus.ladremb."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(sentences) != np.asarray(embeddings).shape[0]:
        raise FormatError("sentence count differs from embedding rows")
    _write_jsonl(out_dir / "corpus.jsonl",
                 ({"id": s["id"], "text": s["text"]} for s in sentences))
    write_ladremb(out_dir / "corpus.ladremb", embeddings)
