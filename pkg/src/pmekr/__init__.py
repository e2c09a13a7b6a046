"""Exhaustive tools for intersecting families of induced subgraphs of a perfect matching."""

from __future__ import annotations

from ._accel import backend, set_backend
from .constructions import avoid_vertex_family, named_family, star_family
from .cycles import (
    CyclicOrder,
    b_interval,
    enumerate_orders,
    r_interval,
    realize,
    reflect,
    swap,
    transpose,
    verify_double_count,
)
from .matching import (
    CapacityError,
    MatchingGraph,
    Signature,
    SignatureError,
    Subgraph,
    enumerate_family,
    family_size,
    identity_check,
    is_intersecting_family,
    star_size,
)
from .search import EkrVerdict, ekr_verdict, is_star, max_intersecting

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CyclicOrder",
    "EkrVerdict",
    "MatchingGraph",
    "Signature",
    "SignatureError",
    "Subgraph",
    "avoid_vertex_family",
    "b_interval",
    "backend",
    "ekr_verdict",
    "enumerate_family",
    "enumerate_orders",
    "family_size",
    "identity_check",
    "is_intersecting_family",
    "is_star",
    "max_intersecting",
    "named_family",
    "r_interval",
    "realize",
    "reflect",
    "set_backend",
    "star_family",
    "star_size",
    "swap",
    "transpose",
    "verify_double_count",
]
