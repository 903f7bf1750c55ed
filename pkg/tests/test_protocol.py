import itertools
import json
import random

import pytest

from chainlogic import (
    ProtocolFormatError,
    SearchBounds,
    RandomMode,
    ValueDomainError,
    is_run,
    load_protocol,
    prefix_splice,
    protocol_from_dict,
    protocol_to_dict,
    run_count,
    runs,
    runs_fixing,
    sample_protocol,
    splice,
    telephone,
    validate,
)

from conftest import (
    brute_force_runs,
    exhaustive_suite,
    full_relation,
    gateway_countermodel,
    make_protocol,
    two_value_cube,
)


def test_validate_clean_protocol():
    assert validate(two_value_cube(), require_continuity=True) == []


def test_validate_continuity_violation():
    p = make_protocol(
        (0, 1),
        {0: ("u", "v"), 1: ("x",)},
        {1: [("u", "x")]},
    )
    assert validate(p) == []
    problems = validate(p, require_continuity=True)
    assert len(problems) == 1
    assert problems[0].kind == "continuity"
    assert problems[0].channel == 1
    assert "'v'" in problems[0].detail


def test_validate_atom_domain_violation():
    p = make_protocol(
        (0, 1),
        {0: ("a",), 1: ("a",)},
        {1: [("a", "a")]},
        {0: {"p": ("zzz",)}},
    )
    problems = validate(p)
    assert len(problems) == 1
    assert problems[0].kind == "atom-domain"


def test_validate_pair_domain_violation():
    p = make_protocol(
        (0, 1),
        {0: ("a",), 1: ("a",)},
        {1: [("a", "b")]},
    )
    kinds = {v.kind for v in validate(p)}
    assert kinds == {"pair-domain"}


def test_is_run_telephone_facts():
    t = telephone(4, "abcdefghijklmnopqrstuvwxyz", 3)
    assert is_run(t, ("byte", "bite", "cite"))
    assert is_run(t, ("toon", "boon", "book"))
    # two adjacent words three letters apart cannot be a hop
    assert sum(a != b for a, b in zip("byte", "book")) == 3
    assert not is_run(t, ("byte", "book", "book"))
    with pytest.raises(ValueDomainError):
        is_run(t, ("byte", "bite", "cit3"))
    with pytest.raises(ValueError):
        is_run(t, ("byte", "bite"))


def test_runs_full_product():
    p = two_value_cube()
    got = list(runs(p))
    assert len(got) == 8
    assert got == sorted(got)  # lexicographic enumeration
    assert got == brute_force_runs(p)


def test_runs_diagonal_filter():
    vs = ("0", "1")
    p = make_protocol(
        (0, 2),
        {0: vs, 1: vs, 2: vs},
        {1: [("0", "0"), ("1", "1")], 2: full_relation(vs, vs)},
    )
    got = list(runs(p))
    assert len(got) == 4
    assert got == brute_force_runs(p)


def test_runs_is_lazy():
    t = telephone(4, "abcdefghijklmnopqrstuvwxyz", 3)
    stream = runs(t)
    first = next(stream)
    assert first == ("aaaa", "aaaa", "aaaa")


def test_run_count_examples():
    assert run_count(two_value_cube()) == 8
    assert run_count(telephone(1, "ab", 2)) == 4
    assert run_count(telephone(3, "abc", 3)) == 1323


def test_run_count_matches_enumeration_on_samples():
    rng = random.Random(5)
    for _ in range(60):
        p = sample_protocol(rng, SearchBounds(3, 3, 0, mode=RandomMode(0, 1)))
        assert run_count(p) == len(brute_force_runs(p))


def test_runs_fixing_telephone():
    t = telephone(4, "abcdefghijklmnopqrstuvwxyz", 3)
    fixed = runs_fixing(t, 0, "byte")
    count = 0
    for r in fixed:
        assert r[0] == "byte"
        count += 1
    # 101 words within one letter of any 4-letter word, squared for two hops
    assert count == 101 * 101


def test_runs_fixing_small_and_errors():
    p = two_value_cube()
    fixed = list(runs_fixing(p, 1, "0"))
    assert len(fixed) == 4
    assert fixed == [r for r in runs(p) if r[1] == "0"]
    with pytest.raises(ValueDomainError):
        list(runs_fixing(p, 1, "9"))


def test_runs_fixing_partitions_run_set():
    rng = random.Random(6)
    for _ in range(30):
        p = sample_protocol(rng, SearchBounds(3, 2, 0, mode=RandomMode(0, 1)))
        total = run_count(p)
        for k in p.channels():
            per_value = {
                v: list(runs_fixing(p, k, v)) for v in p.iter_values(k)
            }
            assert sum(len(rs) for rs in per_value.values()) == total
            for v, rs in per_value.items():
                assert rs == [r for r in runs(p) if r[k - p.window[0]] == v]


def test_splice():
    p = gateway_countermodel()
    assert splice(p, ("u", "x", "z"), ("v", "x", "z"), 1) == ("u", "x", "z")
    r = ("u", "x", "z")
    assert splice(p, r, r, 0) == r
    with pytest.raises(ValueError):
        splice(p, ("u", "x", "z"), ("v", "y", "z"), 1)


def test_prefix_splice():
    vs = ("0", "1")
    p = make_protocol(
        (0, 2),
        {0: vs, 1: vs, 2: vs},
        {1: full_relation(vs, vs), 2: full_relation(vs, vs)},
    )
    assert prefix_splice(p, ("0", "1", "0"), ("1", "1", "1"), 1) == ("0", "1", "1")
    assert prefix_splice(p, ("0", "1", "0"), ("0", "0", "1"), 0) == ("0", "0", "1")
    with pytest.raises(ValueError):
        prefix_splice(p, ("0", "1", "0"), ("1", "0", "1"), 1)


def test_splice_closure_sampled():
    rng = random.Random(7)
    for _ in range(20):
        p = sample_protocol(rng, SearchBounds(3, 2, 0, mode=RandomMode(0, 1)))
        all_runs = list(runs(p))
        for r1, r2 in itertools.product(all_runs, repeat=2):
            for k in p.channels():
                i = k - p.window[0]
                if r1[i] == r2[i]:
                    assert is_run(p, splice(p, r1, r2, k))
                    assert is_run(p, prefix_splice(p, r1, r2, k))


def test_telephone_local_condition():
    t = telephone(4, "abcdefghijklmnopqrstuvwxyz", 3)
    cond = t.local(1)
    assert cond.holds("byte", "bite")
    assert not cond.holds("byte", "book")
    assert "bite" in cond.successors("byte")
    assert len(cond.successors("byte")) == 1 + 4 * 25
    # symmetry
    rng = random.Random(8)
    small = telephone(2, "abc", 2)
    words = ["".join(t) for t in itertools.product("abc", repeat=2)]
    for _ in range(100):
        u, v = rng.choice(words), rng.choice(words)
        assert small.local(1).holds(u, v) == small.local(1).holds(v, u)


def test_telephone_atoms():
    t = telephone(3, "abc", 3)
    assert t.atom_declared(0, "eq_abc")
    assert not t.atom_declared(0, "eq_abcd")
    assert not t.atom_declared(0, "p")
    assert t.atom_holds(1, "eq_abc", "abc")
    assert not t.atom_holds(1, "eq_abc", "abb")
    assert validate(t, require_continuity=True) == []


def test_telephone_preconditions():
    with pytest.raises(ValueError):
        telephone(0, "ab", 2)
    with pytest.raises(ValueError):
        telephone(2, "a", 2)
    with pytest.raises(ValueError):
        telephone(2, "ab", 1)


def test_protocol_json_round_trip():
    p = gateway_countermodel()
    doc = protocol_to_dict(p)
    again = protocol_from_dict(doc)
    assert protocol_to_dict(again) == doc
    assert list(runs(again)) == list(runs(p))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d["channels"][0].update(color="red"),
        lambda d: d["local"][0].update(note="x"),
        lambda d: d.pop("window"),
        lambda d: d["channels"].pop(),
        lambda d: d["local"].pop(),
        lambda d: d["local"].append({"channel": 2, "pairs": []}),
        lambda d: d["channels"].append(
            {"index": 0, "values": ["u", "v"], "atoms": {}}
        ),
        lambda d: d["channels"][0].update(values=["u", "u"]),
        lambda d: d["local"][0].update(pairs=[["u", "x", "y"]]),
    ],
)
def test_protocol_format_rejections(mutate):
    doc = protocol_to_dict(gateway_countermodel())
    mutate(doc)
    with pytest.raises(ProtocolFormatError):
        protocol_from_dict(doc)


def test_load_protocol_rejects_domain_violations(tmp_path):
    doc = protocol_to_dict(gateway_countermodel())
    doc["channels"][0]["atoms"]["p"] = ["zzz"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ProtocolFormatError):
        load_protocol(path)


def test_exhaustive_suite_counts():
    assert len(exhaustive_suite(2, 1, 0)) == 1
    # frozen regression value, first computed by direct generation
    assert len(exhaustive_suite(2, 2, 0)) == 22
