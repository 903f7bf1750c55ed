"""Bounded countermodel search over small chain protocols.

Candidate protocols live on the window [0, num_channels - 1] with value
sets drawn from a fixed label alphabet, every nonempty adjacent relation,
and every atom truth table. The canonical candidate order is value-set
sizes ascending, then relation bitmasks ascending, then truth-table
bitmasks ascending, which pins witnesses across platforms and worker
counts. Absence of a countermodel within bounds proves nothing beyond the
explored space.
"""

from __future__ import annotations

import itertools
import multiprocessing
import random
from dataclasses import dataclass
from functools import partial

from .formula import (
    Atom,
    Bottom,
    Box,
    Formula,
    Implies,
    channel_support,
    diamond,
    disj,
    parse,
    shift_channels,
)
from .proofcheck import SCHEMAS, instantiate_axiom
from .protocol import ChainProtocol, ExplicitChainProtocol, run_count, runs
from .semantics import EvalContext, evaluate

_VALUE_LABELS = "abcdefghijklmnopqrstuvwxyz"
_ATOM_NAMES = ("p", "q", "r", "s", "t", "u", "v", "w")


class SearchSpaceError(ValueError):
    """Bounds that cannot be searched as requested."""


@dataclass(frozen=True)
class ExhaustiveMode:
    pass


@dataclass(frozen=True)
class RandomMode:
    seed: int
    samples: int


@dataclass(frozen=True)
class SearchBounds:
    num_channels: int
    max_values_per_channel: int
    atoms_per_channel: int = 0
    mode: ExhaustiveMode | RandomMode = ExhaustiveMode()
    candidate_ceiling: int = 10**6

    def __post_init__(self):
        if self.num_channels < 1:
            raise SearchSpaceError("num_channels must be positive")
        if not 1 <= self.max_values_per_channel <= len(_VALUE_LABELS):
            raise SearchSpaceError(
                f"max_values_per_channel must be in 1..{len(_VALUE_LABELS)}"
            )
        if not 0 <= self.atoms_per_channel <= len(_ATOM_NAMES):
            raise SearchSpaceError(
                f"atoms_per_channel must be in 0..{len(_ATOM_NAMES)}"
            )

    @property
    def atom_names(self) -> tuple[str, ...]:
        return _ATOM_NAMES[: self.atoms_per_channel]


def candidate_count(bounds: SearchBounds) -> int:
    """Exact size of the exhaustive candidate space (zero-run protocols
    included, since they are skipped only after counting)."""
    c = bounds.num_channels
    total = 0
    for sizes in itertools.product(range(1, bounds.max_values_per_channel + 1), repeat=c):
        combos = 1
        for left, right in zip(sizes, sizes[1:]):
            combos *= (1 << (left * right)) - 1
        for s in sizes:
            combos *= 1 << (s * bounds.atoms_per_channel)
        total += combos
    return total


def _build_protocol(
    sizes: tuple[int, ...],
    relation_masks: tuple[int, ...],
    truth_masks: tuple[tuple[int, ...], ...],
    atom_names: tuple[str, ...],
) -> ExplicitChainProtocol:
    values = {k: _VALUE_LABELS[:s] for k, s in enumerate(sizes)}
    local = {}
    for k, mask in enumerate(relation_masks, start=1):
        left, right = sizes[k - 1], sizes[k]
        pairs = [
            (_VALUE_LABELS[i], _VALUE_LABELS[j])
            for i in range(left)
            for j in range(right)
            if mask >> (i * right + j) & 1
        ]
        local[k] = pairs
    atoms = {}
    for k, channel_masks in enumerate(truth_masks):
        atoms[k] = {
            name: [_VALUE_LABELS[j] for j in range(sizes[k]) if mask >> j & 1]
            for name, mask in zip(atom_names, channel_masks)
        }
    return ExplicitChainProtocol((0, len(sizes) - 1), values, local, atoms)


def _exhaustive_candidates(bounds: SearchBounds):
    c = bounds.num_channels
    names = bounds.atom_names
    for sizes in itertools.product(range(1, bounds.max_values_per_channel + 1), repeat=c):
        relation_ranges = [
            range(1, 1 << (left * right)) for left, right in zip(sizes, sizes[1:])
        ]
        truth_ranges = [
            [range(1 << sizes[k]) for _ in names] for k in range(c)
        ]
        for relation_masks in itertools.product(*relation_ranges):
            flat_truth = [r for per_channel in truth_ranges for r in per_channel]
            for flat in itertools.product(*flat_truth):
                truth_masks = tuple(
                    tuple(flat[k * len(names) + a] for a in range(len(names)))
                    for k in range(c)
                )
                yield _build_protocol(sizes, relation_masks, truth_masks, names)


def _random_candidate(rng: random.Random, bounds: SearchBounds) -> ExplicitChainProtocol:
    c = bounds.num_channels
    names = bounds.atom_names
    sizes = tuple(rng.randint(1, bounds.max_values_per_channel) for _ in range(c))
    relation_masks = tuple(
        rng.randrange(1, 1 << (left * right)) for left, right in zip(sizes, sizes[1:])
    )
    truth_masks = tuple(
        tuple(rng.randrange(1 << sizes[k]) for _ in names) for k in range(c)
    )
    return _build_protocol(sizes, relation_masks, truth_masks, names)


def sample_protocol(rng: random.Random, bounds: SearchBounds) -> ExplicitChainProtocol:
    """One random candidate that admits at least one run."""
    for _ in range(10_000):
        p = _random_candidate(rng, bounds)
        if run_count(p) > 0:
            return p
    raise SearchSpaceError("could not sample a protocol with runs")


def enumerate_protocols(bounds: SearchBounds):
    """Stream candidate protocols, skipping those without runs.

    Exhaustive mode covers the whole bounded space in canonical order and
    refuses spaces beyond the ceiling; random mode yields ``samples``
    protocols reproducibly from the seed.
    """
    if isinstance(bounds.mode, RandomMode):
        def sampled():
            rng = random.Random(bounds.mode.seed)
            for _ in range(bounds.mode.samples):
                yield sample_protocol(rng, bounds)

        return sampled()
    total = candidate_count(bounds)
    if total > bounds.candidate_ceiling:
        raise SearchSpaceError(
            f"exhaustive space has {total} candidates, over the ceiling of "
            f"{bounds.candidate_ceiling}"
        )
    return (p for p in _exhaustive_candidates(bounds) if run_count(p) > 0)


# --- falsification -----------------------------------------------------------

def embed_formula(f: Formula, bounds: SearchBounds) -> Formula:
    """Shift channels so the lowest mentioned channel becomes 0, and check
    the result fits the bounds' window and atom budget."""
    support = channel_support(f)
    g = shift_channels(f, -min(support)) if support else f
    shifted = channel_support(g)
    if shifted and max(shifted) >= bounds.num_channels:
        raise SearchSpaceError(
            f"formula spans {max(shifted) + 1} channels, bounds allow "
            f"{bounds.num_channels}"
        )
    available = set(bounds.atom_names)
    used = _atom_names_used(g)
    if not used <= available:
        raise SearchSpaceError(
            f"formula uses atoms {sorted(used - available)} beyond the bounds' "
            "atom budget"
        )
    return g


def _atom_names_used(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, Box):
        return _atom_names_used(f.body)
    if isinstance(f, Implies):
        return _atom_names_used(f.lhs) | _atom_names_used(f.rhs)
    return set()


def _first_falsifying_run(p: ChainProtocol, f: Formula):
    ctx = EvalContext(p)
    for r in runs(p):
        if not evaluate(ctx, r, f):
            return r
    return None


def _scan_chunk(f: Formula, chunk: list[ExplicitChainProtocol]):
    for p in chunk:
        witness = _first_falsifying_run(p, f)
        if witness is not None:
            return p, witness
    return None


def _chunks(iterable, size: int):
    it = iter(iterable)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def falsify(f: Formula, bounds: SearchBounds, budget: int, workers: int = 1):
    """First (protocol, run) in canonical order falsifying f, scanning at
    most ``budget`` candidate protocols; None when nothing is found.

    The formula is evaluated after shifting its lowest channel to 0 (use
    embed_formula to see the shifted form). With ``workers > 1`` candidates
    are checked in parallel, but the reported witness is still the
    canonically first one.
    """
    g = embed_formula(f, bounds)
    stream = itertools.islice(enumerate_protocols(bounds), budget)
    if workers <= 1:
        for p in stream:
            witness = _first_falsifying_run(p, g)
            if witness is not None:
                return p, witness
        return None
    scan = partial(_scan_chunk, g)
    with multiprocessing.Pool(workers) as pool:
        # Batches keep memory bounded; results stay in candidate order, so
        # the first hit is the canonical one no matter the worker count.
        for batch in _chunks(stream, 64 * workers):
            for hit in pool.map(scan, _chunks(batch, 16)):
                if hit is not None:
                    return hit
    return None


# --- schema soundness sweeps --------------------------------------------------

@dataclass(frozen=True)
class SweepReport:
    schema: str
    trials: int
    violations: int
    first_witness: tuple[Formula, ExplicitChainProtocol, tuple] | None

    def summary(self) -> str:
        verdict = "no violations" if self.violations == 0 else (
            f"{self.violations} violations"
        )
        return (
            f"{self.schema}: {self.trials} sampled instances, {verdict} "
            "(a clean sweep supports soundness only within the sampled space)"
        )


def random_formula(rng: random.Random, channels, atom_names, max_depth: int) -> Formula:
    """Seeded random formula over the given channels and atom names."""
    channels = tuple(channels)
    roll = rng.random()
    if max_depth <= 0 or roll < 0.30:
        if not atom_names or rng.random() < 0.2:
            return Bottom()
        return Atom(rng.choice(channels), rng.choice(tuple(atom_names)))
    if roll < 0.70:
        return Implies(
            random_formula(rng, channels, atom_names, max_depth - 1),
            random_formula(rng, channels, atom_names, max_depth - 1),
        )
    return Box(
        rng.choice(channels),
        random_formula(rng, channels, atom_names, max_depth - 1),
    )


def _sample_instance(
    schema: str,
    rng: random.Random,
    bounds: SearchBounds,
    enforce_side_conditions: bool,
) -> Formula:
    window = range(bounds.num_channels)
    names = bounds.atom_names
    while True:
        if schema == "self_awareness":
            k = rng.choice(window)
            pool = (k,) if enforce_side_conditions else window
            phi = random_formula(rng, pool, names, 2)
            params = {"k": k, "phi": phi}
        elif schema == "gateway":
            phi = random_formula(rng, window, names, 2)
            pairs = [
                (k, n)
                for k in window
                for n in window
                if k != n
            ]
            if enforce_side_conditions:
                pairs = [
                    (k, n)
                    for k, n in pairs
                    if instantiate_axiom("gateway", {"k": k, "n": n, "phi": phi})[1]
                ]
                if not pairs:
                    continue
            k, n = rng.choice(pairs)
            params = {"k": k, "n": n, "phi": phi}
        elif schema == "disjunction":
            k = rng.choice(window)
            if enforce_side_conditions:
                phi = random_formula(rng, range(0, k + 1), names, 2)
                psi = random_formula(rng, range(k, bounds.num_channels), names, 2)
            else:
                phi = random_formula(rng, window, names, 2)
                psi = random_formula(rng, window, names, 2)
            params = {"k": k, "phi": phi, "psi": psi}
        else:  # distributivity, reflexivity: no side condition
            params = {
                "k": rng.choice(window),
                "phi": random_formula(rng, window, names, 2),
                "psi": random_formula(rng, window, names, 2),
            }
        instance, side_ok = instantiate_axiom(schema, params)
        if side_ok or not enforce_side_conditions:
            return instance


def soundness_sweep(
    schema: str,
    bounds: SearchBounds,
    trials: int,
    enforce_side_conditions: bool = True,
) -> SweepReport:
    """Evaluate ``trials`` sampled grounded schema instances on sampled
    (protocol, run) pairs and count violations; zero is the expectation
    whenever side conditions are enforced.

    Disabling side conditions samples unconstrained parameters, which is
    how the sweeps demonstrate that the conditions carry weight.
    """
    if schema not in SCHEMAS:
        raise SearchSpaceError(f"unknown axiom schema {schema!r}")
    seed = bounds.mode.seed if isinstance(bounds.mode, RandomMode) else 0
    rng = random.Random(seed)
    violations = 0
    first_witness = None
    for _ in range(trials):
        instance = _sample_instance(schema, rng, bounds, enforce_side_conditions)
        p = sample_protocol(rng, bounds)
        all_runs = list(runs(p))
        r = all_runs[rng.randrange(len(all_runs))]
        if not evaluate(EvalContext(p), r, instance):
            violations += 1
            if first_witness is None:
                first_witness = (instance, p, r)
    return SweepReport(schema, trials, violations, first_witness)


def display_gateway_family() -> tuple[Formula, Formula, Formula]:
    """The three flagship chain laws, grounded with atoms at channels 0..2:
    far-knowledge transfer for a possibility, gaining an intermediate
    knower, and splitting a known disjunction across the middle channel."""
    f1 = Implies(
        Box(0, diamond(2, parse("p@2"))), Box(1, diamond(2, parse("p@2")))
    )
    f2 = Implies(Box(0, parse("[2]p@2")), Box(0, Box(1, parse("[2]p@2"))))
    f3 = Implies(
        Box(1, disj(parse("[0]p@0"), parse("[2]p@2"))),
        disj(Box(1, parse("p@0")), Box(1, parse("p@2"))),
    )
    return f1, f2, f3
