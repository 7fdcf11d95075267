"""Python interface to the genuslab core library."""

import json as _json

from ._core import (
    ClassGroup,
    ResourceError,
    compose,
    genus_represents_local,
    kronecker,
    li,
    reduce,
    theorem1,
    u_f,
)
from . import _core

__all__ = [
    "ClassGroup",
    "ResourceError",
    "census",
    "class_group_json",
    "compose",
    "constants",
    "genus_represents_local",
    "kronecker",
    "li",
    "reduce",
    "theorem1",
    "u_f",
]


def census(experiment, D, X, *, a=None, form=None, r=3, seed=1, threads=1, segmented=False):
    """Run a census experiment and return its report as a dict."""
    return _json.loads(
        _core.census_json(experiment, D, X, a, form, r, seed, threads, segmented)
    )


def constants(D, a=1, truncation=1_000_000):
    """Sieve constants for the discriminant and shift, as a dict."""
    return _json.loads(_core.constants_json(D, a, truncation))


def class_group_json(D):
    return _json.loads(ClassGroup(D).to_json())
