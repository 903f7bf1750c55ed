"""Shared builders and independent oracles for the test suite."""

import functools
import itertools

from chainlogic import (
    ExplicitChainProtocol,
    SearchBounds,
    enumerate_protocols,
)


def make_protocol(window, values, local, atoms=None):
    return ExplicitChainProtocol(window, values, local, atoms)


def full_relation(left, right):
    return [(u, v) for u in left for v in right]


def two_value_cube():
    """Three channels, values 0/1 everywhere, all transitions allowed."""
    vs = ("0", "1")
    return make_protocol(
        (0, 2),
        {0: vs, 1: vs, 2: vs},
        {1: full_relation(vs, vs), 2: full_relation(vs, vs)},
        {0: {"p": ("1",)}, 1: {"p": ("1",)}, 2: {"p": ("1",)}},
    )


def gateway_countermodel():
    """Knowledge at channel 1 about channel 0 that channel 2 does not have."""
    return make_protocol(
        (0, 2),
        {0: ("u", "v"), 1: ("x", "y"), 2: ("z",)},
        {1: [("u", "x"), ("v", "y")], 2: [("x", "z"), ("y", "z")]},
        {0: {"p": ("u",)}, 1: {}, 2: {}},
    )


def brute_force_runs(p):
    """Product-filter enumeration, independent of the path-walking code."""
    lo, hi = p.window
    columns = [list(p.iter_values(k)) for k in p.channels()]
    out = []
    for combo in itertools.product(*columns):
        if all(
            p.local(k).holds(combo[k - lo - 1], combo[k - lo])
            for k in range(lo + 1, hi + 1)
        ):
            out.append(combo)
    return out


@functools.lru_cache(maxsize=None)
def exhaustive_suite(channels, max_values, atoms):
    return tuple(enumerate_protocols(SearchBounds(channels, max_values, atoms)))
