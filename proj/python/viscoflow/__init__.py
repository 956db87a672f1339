"""Vanishing-viscosity solver for damage coupled with plasticity."""
import json
from pathlib import Path

from ._viscoflow import (  # noqa: F401
    DomainError,
    Params,
    Session,
    StepError,
    columns,
    constitutive_check,
    sweep_points,
)


def load(path):
    """Session from a JSON config file."""
    return Session(Path(path).read_text())


def from_dict(cfg):
    return Session(json.dumps(cfg))
