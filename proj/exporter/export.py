#!/usr/bin/env python3
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

"""Exports an image dataset into engine artifacts."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ladder_export import (CaptionSource, EncoderLoadError, ExportJob, FormatError,
                           ImageDecodeError, export)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--images", required=True, type=Path, help="Image root directory")
    p.add_argument("--labels", required=True, type=Path,
                   help="Labels CSV with id,path,label and optional group columns")
    p.add_argument("--classes", required=True, help="Comma-separated class names")
    p.add_argument("--checkpoint", required=True, help="Classifier checkpoint reference")
    p.add_argument("--vlr", required=True, help="Vision-language encoder reference")
    p.add_argument("--captions", type=Path,
                   help="Captions JSONL; omit to generate captions with an instruction model")
    p.add_argument("--split", default="validation", help="train, validation or test")
    p.add_argument("--out", required=True, type=Path, help="Output directory")
    args = p.parse_args(argv)
    job = ExportJob(
        image_root=args.images,
        labels_file=args.labels,
        classes=args.classes.split(","),
        classifier_checkpoint=args.checkpoint,
        vlr_encoder=args.vlr,
        captions=(CaptionSource.PROVIDED if args.captions
                  else CaptionSource.INSTRUCTION_MODEL),
        out_dir=args.out,
        captions_file=args.captions,
        split=args.split,
    )
    try:
        print(export(job))
    except (FormatError, EncoderLoadError, ImageDecodeError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
