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

import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from ladder_export import (Backends, CaptionSource, ExportJob, FormatError, ImageDecodeError,
                           read_ladremb, write_ladremb)
from ladder_export import export as run_export

CLI = os.environ.get("LADDER_CLI")
EXPORT_PY = Path(__file__).resolve().parents[1] / "export.py"


class FakeClassifier:
    name = "fake-classifier"
    precision = "float32"

    def encode_images(self, paths):
        return np.array([[len(str(p)) % 7, i, 1.0] for i, p in enumerate(paths)], dtype=np.float32)

    def predict(self, features):
        return (features[:, 1] % 2).astype(int)


class FakeVlr:
    name = "fake-vlr"
    precision = "float32"

    def encode_images(self, paths):
        return np.eye(len(paths), 4, dtype=np.float32) + 0.5

    def encode_text(self, sentences):
        return np.array([[len(s), 1.0, 0.0, 2.0] for s in sentences], dtype=np.float32)


def make_toy(root: Path, n=10, drop_caption=None):
    images = root / "images"
    images.mkdir(parents=True)
    lines = ["id,path,label,water"]
    captions = []
    for i in range(n):
        (images / f"img{i}.png").write_bytes(b"\x89PNG fake")
        lines.append(f"im{i},img{i}.png,{i % 2},{(i // 2) % 2}")
        if i != drop_caption:
            captions.append(json.dumps({"id": f"im{i}", "text": f"a photo number {i}"}))
    (root / "labels.csv").write_text("\n".join(lines) + "\n")
    (root / "captions.jsonl").write_text("\n".join(captions) + "\n")
    return ExportJob(image_root=images, labels_file=root / "labels.csv", classes=["a", "b"],
                     classifier_checkpoint="fake", vlr_encoder="fake",
                     captions=CaptionSource.PROVIDED, out_dir=root / "out",
                     captions_file=root / "captions.jsonl")


def test_ladremb_round_trip(tmp_path):
    m = np.arange(12, dtype=np.float32).reshape(3, 4) / 4
    write_ladremb(tmp_path / "m.ladremb", m)
    raw = (tmp_path / "m.ladremb").read_bytes()
    assert raw[:4] == b"LADR" and len(raw) == 24 + 12 * 4
    np.testing.assert_array_equal(read_ladremb(tmp_path / "m.ladremb"), m)
    with pytest.raises(FormatError):
        write_ladremb(tmp_path / "bad.ladremb", np.array([[np.nan]]))


@pytest.mark.skipif(CLI is None, reason="LADDER_CLI not set")
def test_toy_export_passes_validate(tmp_path):
    job = make_toy(tmp_path)
    manifest = run_export(job, Backends(FakeClassifier(), FakeVlr()))
    out = job.out_dir
    result = subprocess.run(
        [CLI, "validate", "--val", str(manifest), "--corpus", str(out / "corpus.jsonl"),
         "--corpus-embeddings", str(out / "corpus.ladremb"), "--work-dir", str(tmp_path / "w")],
        capture_output=True, text=True, check=False)
    assert result.returncode == 0, result.stderr
    summary = json.loads(result.stdout)
    assert summary["valid"] and summary["errors"] == []
    assert summary["datasets"][0]["samples"] == 10
    assert summary["corpus"] == {"sentences": 10, "dim": 4}
    m = json.loads(manifest.read_text())
    assert m["provenance"]["vlr"]["name"] == "fake-vlr"
    assert json.loads((manifest.parent / "samples.jsonl").read_text().splitlines()[3]) == {
        "groups": {"water": 1}, "id": "im3", "label": 1, "prediction": 1}


def test_missing_caption_names_id(tmp_path):
    job = make_toy(tmp_path, drop_caption=4)
    with pytest.raises(FormatError, match="im4"):
        run_export(job, Backends(FakeClassifier(), FakeVlr()))


def test_unreadable_image(tmp_path):
    job = make_toy(tmp_path)
    (job.image_root / "img2.png").unlink()
    with pytest.raises(ImageDecodeError, match="im2"):
        run_export(job, Backends(FakeClassifier(), FakeVlr()))


def test_cli_without_backends_reports_encoder_error(tmp_path):
    job = make_toy(tmp_path)
    result = subprocess.run(
        [sys.executable, str(EXPORT_PY), "--images", str(job.image_root), "--labels",
         str(job.labels_file), "--classes", "a,b", "--checkpoint", "resnet", "--vlr", "clip",
         "--captions", str(job.captions_file), "--out", str(job.out_dir)],
        capture_output=True, text=True, check=False)
    assert result.returncode == 1
    assert result.stderr.startswith("EncoderLoadError")
