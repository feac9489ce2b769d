"""Human-in-the-loop Bayesian optimization with explanation-guided preference learning."""

import json as _json

from . import _core
from ._core import (
    Error,
    GPModel,
    InputError,
    Objective,
    PreferenceGP,
    Session,
    SessionFileError,
    SoftCopeland,
    StateError,
    baseline_names,
    build_soft_copeland,
    coexbo_af,
    fit_gp,
    fit_preference_gp,
    load_custom_objective,
    make_objective,
    objective_names,
    product_of_gaussians,
    selection_accuracy,
    shapley,
)

__all__ = [
    "Error",
    "GPModel",
    "InputError",
    "Objective",
    "PreferenceGP",
    "Session",
    "SessionFileError",
    "SoftCopeland",
    "StateError",
    "baseline_names",
    "build_soft_copeland",
    "coexbo_af",
    "create_session",
    "fit_gp",
    "fit_preference_gp",
    "load_custom_objective",
    "make_objective",
    "objective_names",
    "product_of_gaussians",
    "run_baseline",
    "selection_accuracy",
    "shapley",
]


def create_session(**config):
    """Start a session from keyword config fields, e.g. objective="ackley", T=10."""
    return Session.create(_json.dumps(config))


def run_baseline(kind, **config):
    """Regret trace of a fully synthetic run."""
    return list(_core.run_baseline(kind, _json.dumps(config)))
