"""Volumes, Euler-form fluxes and indices of unit vector fields on odd spheres."""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    DegeneratePointError,
    DomainError,
    NumericError,
    ResourceError,
    SingularityError,
    __version__,
    elem_sym,
    graph_volume,
    sphere_volume,
)


def field(kind, n=1, pole=None, d=1, eps=0.2, seed=0):
    """Field spec dict accepted by volume() and field_index()."""
    spec = {"kind": kind, "n": n, "d": d, "eps": eps, "seed": seed}
    if pole is not None:
        spec["pole"] = list(pole)
    return spec


def volume(spec, grid=None):
    return _json.loads(_core.volume_json(_json.dumps(spec), _json.dumps(grid) if grid else ""))


def field_index(spec, point, radius=0.1):
    return _json.loads(_core.field_index_json(_json.dumps(spec), list(point), radius))


def verify_lemma(n):
    return _json.loads(_core.verify_lemma_json(n))


def bounds(n, indices):
    return _json.loads(_core.bounds_json(n, list(indices)))


def chain_table(ns):
    return _json.loads(_core.chain_table_json(list(ns)))


def run(*args):
    """Runs one CLI invocation in-process; returns (exit_code, stdout, stderr)."""
    return _core.run([str(a) for a in args])
