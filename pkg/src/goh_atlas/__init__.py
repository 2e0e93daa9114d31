"""Exact free-nilpotent Lie algebra models, polynomial frames in normal form,
Goh varieties, and numeric abnormal-extremal diagnostics."""

from . import (
    cli,
    errors,
    freelie,
    goh,
    metabelian,
    normalform,
    polyfield,
    scenarios,
    serialize,
    trajectories,
)

__all__ = [
    "cli",
    "errors",
    "freelie",
    "goh",
    "metabelian",
    "normalform",
    "polyfield",
    "scenarios",
    "serialize",
    "trajectories",
]
__version__ = "0.1.0"
