from itertools import combinations, permutations

from hypothesis import given, settings, strategies as st
import pytest
from minkord.order import *
from minkord.structure import Path, Structure, parse_structure


def line_structure(seq):
    """a single path carrying only the consecutive triples of seq"""
    return Structure(
        frozenset(seq),
        frozenset([Path("Q", frozenset(seq))]),
        frozenset(zip(seq, seq[1:], seq[2:])),
    )


def full_order(seq):
    triples = set()
    for i, j, k in combinations(range(len(seq)), 3):
        triples.add((seq[i], seq[j], seq[k]))
        triples.add((seq[k], seq[j], seq[i]))
    return triples


def test_consecutive_triples_saturate_to_full_order():
    for n in range(3, 7):
        for seq in permutations("abcdef"[:n]):
            sb = saturate(line_structure(seq))
            assert sb.triples == full_order(seq)
            assert check_consistency(sb).consistent


def test_saturate_line5(line5_sb):
    assert len(line5_sb) == 20
    assert line5_sb.closed
    assert line5_sb.between("e", "c", "a")
    assert not line5_sb.between("a", "c", "x")
    assert line5_sb.middle("e", "a", "c") == "c"


def test_provenance():
    sb = saturate(line_structure("abcd"))
    assert sb.derivation("abc") is Rule.asserted
    assert sb.derivation("cba") is Rule.O2
    assert sb.derivation("abd") is Rule.O4
    assert sb.derivation("acb") is None

    s = parse_structure(
        "event a\nevent b\nevent c\nevent d\npath Q a b c d\nbetw a b c\nbetw a c d\n"
    )
    sb = saturate(s)
    assert sb.derivation(("b", "c", "d")) is Rule.abc_acd_bcd
    assert Rule.abc_acd_bcd.value == "L-abc-acd-bcd"


def test_literal_betweenness(line5):
    rel = literal_betweenness(line5)
    assert not rel.closed
    assert rel.triples == line5.betw
    assert not rel.between("c", "b", "a")
    assert all(rule is Rule.asserted for rule in rel.provenance.values())


@st.composite
def relations(draw):
    events = draw(st.sets(st.sampled_from("abcdef"), min_size=3, max_size=6))
    ordered = sorted(events)
    triple = st.tuples(*[st.sampled_from(ordered)] * 3)
    betw = draw(st.sets(triple, max_size=8))
    extra = draw(st.sets(triple, max_size=4))
    path = Path("Q", frozenset(events))
    return (
        Structure(frozenset(events), frozenset([path]), frozenset(betw)),
        Structure(frozenset(events), frozenset([path]), frozenset(betw | extra)),
    )


@settings(max_examples=50)
@given(relations())
def test_saturation_is_a_closure(pair):
    smaller, larger = pair
    sb = saturate(smaller)
    # extensive
    assert smaller.betw <= sb.triples
    # idempotent
    assert saturate(smaller.with_betweenness(sb.triples)).triples == sb.triples
    # monotone
    assert sb.triples <= saturate(larger).triples


def test_middle_errors(data_dir):
    s = parse_structure(open(f"{data_dir}/unordered.struct").read())
    sb = saturate(s)
    assert sb.middle("c", "a", "b") == "b"

    with pytest.raises(OrderingError) as e:
        sb.middle("a", "b", "x")
    assert e.value.args[0] == "no ordering of a, b, x (O5 totality failure)"
    assert e.value.events == ("a", "b", "x")

    s = parse_structure(open(f"{data_dir}/inconsistent.struct").read())
    with pytest.raises(OrderingError) as e:
        saturate(s).middle("a", "b", "c")
    assert e.value.args[0].startswith("inconsistent ordering of a, b, c: middles ")


def test_check_consistency(data_dir):
    s = parse_structure(open(f"{data_dir}/inconsistent.struct").read())
    verdict = check_consistency(saturate(s))
    assert not verdict.consistent
    thm1 = [w for w in verdict.witnesses if w.rule == "Thm1"]
    assert len(thm1) == 1
    first, second = thm1[0].triples
    assert set(first) == set(second) == set("abc")
    assert first.b != second.b

    # a repeated event is reported as such, even without saturation
    s = parse_structure("event a\nevent b\npath Q a b\nbetw a a b\n")
    verdict = check_consistency(literal_betweenness(s))
    assert verdict.witnesses == (ConsistencyWitness("O3", (("a", "a", "b"),)),)


def test_query_between(line5_sb):
    assert query_between(line5_sb, "a", "d", "e")
    assert not query_between(line5_sb, "a", "e", "d")

    with pytest.raises(StructureError) as e:
        query_between(line5_sb, "a", "b", "z")
    assert e.value.args[0] == 'unknown event "z"'
