# Copyright 2026 The ctxread Authors.
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
"""Python interface to the ctxread core."""

import json as _json

from ._core import (
    ConfigError,
    CoverageError,
    Error,
    FormatError,
    IdentityError,
    LanguageModel,
    NumericalError,
    fit_smooth,
    generate_synthetic,
    lambda_grid,
    lmg,
    ols,
)
from ._core import analyze as _analyze


def pmi(surprisal, frequency):
    """Pointwise mutual information in nats: frequency - surprisal."""
    return frequency - surprisal


def analyze(corpus_tsv, lm, **options):
    """Runs the cross-validated comparison; returns (report dict, lmg csv)."""
    out = _analyze(corpus_tsv, lm, **options)
    return _json.loads(out["report"]), out["lmg_csv"]


__all__ = [
    "ConfigError",
    "CoverageError",
    "Error",
    "FormatError",
    "IdentityError",
    "LanguageModel",
    "NumericalError",
    "analyze",
    "fit_smooth",
    "generate_synthetic",
    "lambda_grid",
    "lmg",
    "ols",
    "pmi",
]
