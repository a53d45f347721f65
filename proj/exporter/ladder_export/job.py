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

"""Export jobs: real image datasets into engine artifacts."""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from ladder_export.formats import FormatError, write_corpus, write_dataset


class EncoderLoadError(RuntimeError):
    pass


class ImageDecodeError(RuntimeError):
    pass


class CaptionSource(enum.Enum):
    PROVIDED = "provided"
    INSTRUCTION_MODEL = "instruction-model"


@dataclasses.dataclass(frozen=True)
class ExportJob:
    image_root: Path
    labels_file: Path  # CSV header: id,path,label then optional group columns
    classes: Sequence[str]
    classifier_checkpoint: str
    vlr_encoder: str
    captions: CaptionSource
    out_dir: Path
    captions_file: Path | None = None  # JSONL {id, text} in provided mode
    split: str = "validation"
    name: str = "export"


class ClassifierBackend(Protocol):
    name: str
    precision: str

    def encode_images(self, paths: Sequence[Path]) -> np.ndarray: ...

    def predict(self, features: np.ndarray) -> np.ndarray: ...


class VlrBackend(Protocol):
    name: str
    precision: str

    def encode_images(self, paths: Sequence[Path]) -> np.ndarray: ...

    def encode_text(self, sentences: Sequence[str]) -> np.ndarray: ...


@dataclasses.dataclass
class Backends:
    classifier: ClassifierBackend
    vlr: VlrBackend


def load_backends(job: ExportJob) -> Backends:
    """Resolves checkpoint references to encoder backends."""
    raise EncoderLoadError(
        f"no encoder backend registered for classifier '{job.classifier_checkpoint}' "
        f"and VLR encoder '{job.vlr_encoder}'")


def _read_labels(job: ExportJob) -> list[dict]:
    with open(job.labels_file, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = {"id", "path", "label"} - set(reader.fieldnames or [])
        if missing:
            raise FormatError(f"{job.labels_file}: missing columns {sorted(missing)}")
        rows = list(reader)
    for row in rows:
        image = Path(job.image_root) / row["path"]
        if not image.is_file():
            raise ImageDecodeError(f"{row['id']}: cannot read {image}")
        row["path"] = image
    return rows


def _read_captions(job: ExportJob, ids: Sequence[str]) -> list[dict]:
    if job.captions is CaptionSource.INSTRUCTION_MODEL:
        raise EncoderLoadError("instruction-model captioning needs a captioner backend")
    if job.captions_file is None:
        raise FormatError("provided caption mode needs a captions file")
    by_id = {}
    with open(job.captions_file, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                row = json.loads(line)
                by_id[row["id"]] = row["text"]
    for sample_id in ids:
        if sample_id not in by_id:
            raise FormatError(f"missing caption for {sample_id}")
    return [{"id": f"cap-{sample_id}", "text": by_id[sample_id]} for sample_id in ids]


def export(job: ExportJob, backends: Backends | None = None) -> Path:
    """Encodes the dataset and writes dataset plus corpus artifacts to job.out_dir.

    Returns the manifest path. Embedding row order follows the labels file.
    """
    rows = _read_labels(job)
    ids = [r["id"] for r in rows]
    corpus = _read_captions(job, ids)
    backends = backends or load_backends(job)
    paths = [r["path"] for r in rows]
    features = backends.classifier.encode_images(paths)
    predictions = backends.classifier.predict(features)
    group_columns = [c for c in rows[0] if c not in ("id", "path", "label")] if rows else []
    samples = []
    for r, pred in zip(rows, predictions):
        sample = {"id": r["id"], "label": int(r["label"]), "prediction": int(pred)}
        if group_columns:
            sample["groups"] = {c: int(r[c]) for c in group_columns}
        samples.append(sample)
    provenance = {
        "classifier": {"name": backends.classifier.name,
                       "precision": backends.classifier.precision},
        "vlr": {"name": backends.vlr.name, "precision": backends.vlr.precision},
    }
    manifest = write_dataset(Path(job.out_dir) / job.split, name=job.name, split=job.split,
                             classes=job.classes, samples=samples, features=features,
                             vlr_image=backends.vlr.encode_images(paths),
                             provenance=provenance)
    write_corpus(job.out_dir, corpus, backends.vlr.encode_text([c["text"] for c in corpus]))
    return manifest
