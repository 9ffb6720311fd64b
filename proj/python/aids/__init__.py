# Copyright 2026 The AIDS Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Adaptive intrusion detection core: KDD99 records, classifiers and scenarios."""

import os as _os
from pathlib import Path as _Path

_taxonomy = _Path(__file__).with_name("data") / "kdd_taxonomy.csv"
if _taxonomy.is_file():
    _os.environ.setdefault("AIDS_TAXONOMY", str(_taxonomy))

from ._aids import (  # noqa: E402
    AidsError,
    Artifact,
    ConnectionRecord,
    TrainSpec,
    count_by_category,
    feature_names,
    load_kdd_file,
    message_type,
    parse_kdd_line,
    render_kdd_line,
    roundtrip_message,
    run_scenario,
    stratified_sample,
    synthetic_traffic,
    train,
)

__all__ = [
    "AidsError",
    "Artifact",
    "ConnectionRecord",
    "TrainSpec",
    "count_by_category",
    "feature_names",
    "load_kdd_file",
    "message_type",
    "parse_kdd_line",
    "render_kdd_line",
    "roundtrip_message",
    "run_scenario",
    "stratified_sample",
    "synthetic_traffic",
    "train",
]
