from fractions import Fraction
import json
import logging
import os

import pytest
from minkord.axioms import *
from minkord.model import (
    GeneratorConfig,
    ModelLine,
    ModelSample,
    generate_sample,
    interval_sq,
    oracle_unreachable,
)
from minkord.order import saturate
from minkord.structure import load_structure, parse_structure


def test_axiom_id_parse():
    assert AxiomId.parse(" O4 ") is AxiomId.O4
    with pytest.raises(ValueError) as e:
        AxiomId.parse("O7")
    assert e.value.args[0] == 'unknown axiom "O7"'


def test_independence_corpus():
    rows = run_independence_demo()
    assert [row.name for row in rows] == [
        "control",
        "violates_I3",
        "violates_O1",
        "violates_O2",
        "violates_O3",
        "violates_O4",
        "violates_O5",
    ]
    for row in rows:
        assert row.matches, row
    assert rows[0].expected is None and rows[0].failed == ()
    assert rows[-1].failed == (AxiomId.O5,)


def test_single_violations():
    documents = dict(corpus_documents())
    s = parse_structure(documents["violates_O4"])
    rel = literal_betweenness(s)
    result = check_axiom(s, rel, AxiomId.O4)
    assert result.verdict is Verdict.FAIL
    assert result.witnesses == (("a", "b", "c", "d"),)
    assert replay_witness(s, rel, AxiomId.O4, ("a", "b", "c", "d"))

    s = parse_structure(documents["violates_O2"])
    result = check_axiom(s, literal_betweenness(s), AxiomId.O2)
    assert result.witnesses == (("a", "b", "c"),)

    s = parse_structure(documents["violates_O5"])
    result = check_axiom(s, literal_betweenness(s), AxiomId.O5)
    assert result.witnesses == (("a", "b", "c"),)


def test_literal_and_saturated_relation(line5):
    report = check_all(line5, axioms=[AxiomId.O2, AxiomId.O4, AxiomId.O5])
    assert report.failed == (AxiomId.O2, AxiomId.O4, AxiomId.O5)
    assert report[AxiomId.O4].witnesses == (("a", "b", "c", "d"), ("b", "c", "d", "e"))
    assert ("a", "b", "d") in report[AxiomId.O5].witnesses

    report = check_all(
        line5, axioms=[AxiomId.O2, AxiomId.O4, AxiomId.O5], saturate_relation=True
    )
    assert report.failed == ()
    assert report.exit_code == 0


def test_empty_structure():
    report = check_all(Structure())
    assert report.failed == (AxiomId.I1,)
    assert report[AxiomId.I1].witnesses == ((),)
    assert report.exit_code == 1
    assert replay_witness(Structure(), literal_betweenness(Structure()), AxiomId.I1, ())


def test_i2():
    s = parse_structure("event a\nevent b\nevent c\nevent d\npath P a b\npath R c d\n")
    result = check_axiom(s, literal_betweenness(s), AxiomId.I2)
    assert result.verdict is Verdict.FAIL
    assert result.witnesses == (("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"))
    assert replay_witness(s, literal_betweenness(s), AxiomId.I2, ("a", "c"))

    joined = parse_structure(
        "event a\nevent b\nevent c\nevent d\npath P a b\npath R c d\npath S a c\npath T b d\n"
    )
    assert check_axiom(joined, literal_betweenness(joined), AxiomId.I2).verdict is Verdict.PASS


def test_unreachable_from(line5):
    Q = line5.path("Q")
    U = unreachable_from(line5, Q, "x")
    assert U.members == frozenset("abde")
    assert "c" not in U and len(U) == 4

    with pytest.raises(StructureError) as e:
        unreachable_from(line5, Q, "c")
    assert e.value.args[0] == 'event "c" lies on path "Q"'
    with pytest.raises(StructureError) as e:
        unreachable_from(line5, Q, "z")
    assert e.value.args[0] == 'unknown event "z"'


def test_unreachable_via(line5, line5_sb):
    Q, R = line5.path("Q"), line5.path("R")
    assert unreachable_via(line5, Q, "a", R, "c", line5_sb) == {"b"}
    assert unreachable_via(line5, Q, "e", R, "c", line5_sb) == {"d"}

    with pytest.raises(StructureError) as e:
        unreachable_via(line5, Q, "a", Q, "c", line5_sb)
    assert e.value.args[0] == 'unreachable_via needs two distinct paths, got "Q" twice'
    with pytest.raises(StructureError) as e:
        unreachable_via(line5, Q, "a", R, "b", line5_sb)
    assert e.value.args[0] == 'event "b" is not a meeting point of "Q" and "R"'
    with pytest.raises(StructureError) as e:
        unreachable_via(line5, Q, "x", R, "c", line5_sb)
    assert e.value.args[0] == 'event "x" is not on path "Q"'


def test_unreachable_via_empty_cases(line5, line5_sb):
    Q, R = line5.path("Q"), line5.path("R")
    # nothing lies strictly between the meeting event and b or d
    assert unreachable_via(line5, Q, "b", R, "c", line5_sb) == frozenset()
    assert unreachable_via(line5, Q, "d", R, "c", line5_sb) == frozenset()

    s = parse_structure(
        "event a\nevent b\nevent c\nevent d\nevent e\nevent x\n"
        "path Q a b c d e\npath R c x\npath S a x\n"
        "betw a b c\nbetw b c d\nbetw c d e\n"
    )
    sb = saturate(s)
    Q, R = s.path("Q"), s.path("R")
    # x reaches a through S, so no event of R leaves a unreachable
    assert unreachable_via(s, Q, "a", R, "c", sb) == frozenset()
    assert unreachable_via(s, Q, "e", R, "c", sb) == {"d"}


def test_unreachable_via_in_the_model():
    ms = ModelSample(bound=Fraction(10))
    Q = ms.add_line(ModelLine("Q", (0, 0), (1, 0)))
    ms.add_line(ModelLine("R", (0, 0), (2, 1)))
    times = {"x": 0, "y1": 1, "y2": Fraction(3, 2), "y3": 2, "y4": Fraction(5, 2), "a": 3, "z": 4}
    for name, t in times.items():
        ms.add_point((t, 0), id=name)
    w = ms.add_point((2, 1), id="w")
    ms.add_line(ModelLine.through("C", w, ms.points["z"]))
    s = ms.to_structure()
    sb = saturate(s)

    # w reaches x along R and z along C, and nothing in between
    assert unreachable_from(s, s.path("Q"), "w").members == oracle_unreachable(ms, Q, w)
    expected = {
        p.id
        for p in ms.points_on(Q)
        if 0 < Q.param(p) < Q.param(ms.points["a"]) and interval_sq(p, w) <= 0
    }
    assert expected == {"y1", "y2", "y3", "y4"}
    assert unreachable_via(s, s.path("Q"), "a", s.path("R"), "x", sb) == expected
    # z is reachable from w, so it is not reached via R
    assert unreachable_via(s, s.path("Q"), "z", s.path("R"), "x", sb) == frozenset()


def test_parse_pairs(line5, data_dir):
    with open(os.path.join(data_dir, "line5.pairs")) as handle:
        assert parse_pairs(handle, line5) == [("Q", "x")]
    assert parse_pairs("# none\n", line5) == []

    cases = [
        ("pair Q\n", 'line 1: expected "pair <path> <event>"'),
        ("pairs Q x\n", 'line 1: expected "pair <path> <event>"'),
        ("\npair Z x\n", 'line 2: unknown path "Z"'),
        ("pair Q z\n", 'line 1: unknown event "z"'),
        ("pair Q c\n", 'line 1: event "c" lies on path "Q"'),
    ]
    for text, message in cases:
        with pytest.raises(PairError) as e:
            parse_pairs(text, line5)
        assert e.value.args[0] == message

    with pytest.raises(PairError) as e:
        check_all(line5, Mode.SAMPLED, [("R", "c")])
    assert e.value.args[0] == 'event "c" lies on path "R"'


def test_pair_axioms_sampled(line5, line5_sb):
    report = check_all(line5, Mode.SAMPLED, [("Q", "x")], saturate_relation=True)
    assert report.mode is Mode.SAMPLED
    assert report.designated_pairs == (("Q", "x"),)
    assert report[AxiomId.I5].verdict is Verdict.PASS
    # the unreachable events are split by the reachable c
    assert report[AxiomId.I6].witnesses == (
        ("Q", "x", "a", "d"),
        ("Q", "x", "a", "e"),
        ("Q", "x", "b", "d"),
        ("Q", "x", "b", "e"),
    )
    # c is the only reachable event, so nothing lies beyond the unreachable ones
    assert report[AxiomId.I7].witnesses[0] == ("Q", "x", "c", "a")
    assert report.failed == (AxiomId.I6, AxiomId.I7)
    assert report.exit_code == 1

    assert replay_witness(line5, line5_sb, AxiomId.I6, ("Q", "x", "a", "d"))
    assert not replay_witness(line5, line5_sb, AxiomId.I6, ("Q", "x", "d", "e"))
    assert replay_witness(line5, line5_sb, AxiomId.I7, ("Q", "x", "c", "a"))


def test_pair_axioms_without_pairs(line5, caplog):
    with caplog.at_level(logging.WARNING, logger="minkord.axioms"):
        report = check_all(line5, Mode.SAMPLED, axioms=[AxiomId.I5, AxiomId.I6])
    assert [r.verdict for r in report] == [Verdict.INCONCLUSIVE] * 2
    assert "I5: sampled mode without designated pairs" in caplog.text


def test_pair_axioms_whole_universe(line5):
    report = check_all(line5, axioms=[AxiomId.I5], saturate_relation=True)
    # R = {c, x} and c is reachable from every event of Q
    assert ("R", "a") in report[AxiomId.I5].witnesses
    assert replay_witness(line5, saturate(line5), AxiomId.I5, ("R", "a"))


def test_o6(data_dir):
    s = load_structure(os.path.join(data_dir, "o6_pasch.struct"))
    report = check_all(s, axioms=[AxiomId.O6], saturate_relation=True)
    assert report[AxiomId.O6].verdict is Verdict.PASS

    s = load_structure(os.path.join(data_dir, "o6_broken.struct"))
    report = check_all(s, axioms=[AxiomId.O6], saturate_relation=True)
    result = report[AxiomId.O6]
    assert result.verdict is Verdict.FAIL
    witness = ("Q", "R", "S", "a", "b", "c", "d", "e", "T")
    assert result.witnesses[0] == witness
    assert replay_witness(s, saturate(s), AxiomId.O6, witness)

    # a finite window may simply not contain the meeting event
    report = check_all(s, Mode.SAMPLED, axioms=[AxiomId.O6], saturate_relation=True)
    assert report[AxiomId.O6].verdict is Verdict.INCONCLUSIVE
    assert report[AxiomId.O6].witnesses[0] == witness
    assert report.exit_code == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generated_samples_have_no_failures(seed):
    ms, s = generate_sample(GeneratorConfig(lines=3, seed=seed))
    report = check_all(s, Mode.SAMPLED, ms.designated_pairs, saturate_relation=True)
    assert report.failed == ()
    for ax in (AxiomId.O2, AxiomId.O3, AxiomId.O4, AxiomId.O5, AxiomId.I3):
        assert report[ax].verdict is Verdict.PASS
    for ax in PAIR_AXIOMS:
        assert report[ax].verdict is Verdict.PASS


def test_report_json(line5):
    report = check_all(
        line5, Mode.SAMPLED, [("Q", "x")], saturate_relation=True, axioms=[AxiomId.I6, AxiomId.I1]
    )
    records = json.loads(report.to_json())
    assert [r["axiom"] for r in records] == ["I1", "I6"]
    assert records[0] == {"axiom": "I1", "verdict": "PASS", "witnesses": [], "mode": "sampled"}
    assert records[1]["verdict"] == "FAIL"
    assert records[1]["witnesses"][0] == ["Q", "x", "a", "d"]

    with pytest.raises(KeyError):
        report[AxiomId.O1]


@pytest.mark.parametrize("seed", range(10))
def test_six_line_samples(seed):
    ms, s = generate_sample(GeneratorConfig(lines=6, seed=seed, bound=10))
    whole = check_all(
        s,
        axioms=[AxiomId.O1, AxiomId.O2, AxiomId.O3, AxiomId.O4, AxiomId.O5, AxiomId.I1, AxiomId.I3],
        saturate_relation=True,
    )
    assert whole.failed == ()
    sampled = check_all(
        s,
        Mode.SAMPLED,
        ms.designated_pairs,
        saturate_relation=True,
        axioms=[AxiomId.O6, AxiomId.I2, AxiomId.I5, AxiomId.I6, AxiomId.I7],
    )
    assert sampled.failed == ()
