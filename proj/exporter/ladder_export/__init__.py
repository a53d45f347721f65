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

"""Writes engine input artifacts from real image datasets."""

from ladder_export.formats import (FormatError, read_ladremb, write_corpus, write_dataset,
                                   write_ladremb)
from ladder_export.job import (Backends, CaptionSource, EncoderLoadError, ExportJob,
                               ImageDecodeError, export, load_backends)
