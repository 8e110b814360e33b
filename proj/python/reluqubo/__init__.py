# Copyright 2026 The reluqubo Authors
#
#    Licensed under the Apache License, Version 2.0 (the "License");
#    you may not use this file except in compliance with the License.
#    You may obtain a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS,
#    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#    See the License for the specific language governing permissions and
#    limitations under the License.

"""Compile regression models into QUBO problems via ReLU expansion."""

import json

from ._core import (
    CapabilityError,
    Compilation,
    ConvexityError,
    Curve,
    DimensionError,
    Error,
    FitFailureError,
    InvalidConfigError,
    InvalidPolylineError,
    Model,
    ParseError,
    Polyline,
    QuboProblem,
    ReluExpansion,
    SizeError,
    SolveResult,
    TangentFit,
    UnsupportedCombinationError,
    brute_force,
    c2_expansion,
    error_sweep,
    fit_spline,
    fit_tangent,
    max_grid_error,
    quadratize,
    simulated_annealing,
    structured_brute_force,
    table2_formula,
)
from . import _core


def verify(compilation):
    """Exhaustive audit of a compilation, as a dict."""
    return json.loads(_core.verify_json(compilation))


def resources(compilation):
    """Closed-form and actual auxiliary and penalty counts, as a dict."""
    return json.loads(_core.resources_json(compilation))


def sidecar(compilation):
    """Penalties, sign split and fitted curves of a compilation, as a dict."""
    return json.loads(compilation.sidecar_json())


__all__ = [
    "CapabilityError",
    "Compilation",
    "ConvexityError",
    "Curve",
    "DimensionError",
    "Error",
    "FitFailureError",
    "InvalidConfigError",
    "InvalidPolylineError",
    "Model",
    "ParseError",
    "Polyline",
    "QuboProblem",
    "ReluExpansion",
    "SizeError",
    "SolveResult",
    "TangentFit",
    "UnsupportedCombinationError",
    "brute_force",
    "c2_expansion",
    "error_sweep",
    "fit_spline",
    "fit_tangent",
    "max_grid_error",
    "quadratize",
    "resources",
    "sidecar",
    "simulated_annealing",
    "structured_brute_force",
    "table2_formula",
    "verify",
]
