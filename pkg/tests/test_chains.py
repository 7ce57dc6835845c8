from hypothesis import given, strategies as st
import pytest
from minkord.chains import *
from minkord.order import literal_betweenness, saturate
from minkord.structure import Path, Structure, load_structure
from minkord.utils import up_to_reversal


def test_chain_construction(line5):
    Q = line5.path("Q")
    ch = Chain.on_path(Q, "bcd")
    assert ch.seq == ("b", "c", "d")
    assert (ch.first, ch.last, len(ch)) == ("b", "d", 3)
    assert str(ch) == "(b,c,d)"

    with pytest.raises(ChainError) as e:
        Chain("Q", ("a",))
    assert e.value.args[0] == "a chain needs at least two events, got 1"
    with pytest.raises(ChainError) as e:
        Chain.on_path(Q, "ax")
    assert e.value.args[0] == 'event "x" is not on path "Q"'


def test_is_chain(line5, line5_sb):
    assert is_chain(line5_sb, Chain("Q", tuple("abcde")))
    assert is_chain(line5_sb, Chain("Q", tuple("eca")))
    assert not is_chain(line5_sb, Chain("Q", tuple("acb")))
    # two events carry no obligation
    assert is_chain(line5_sb, Chain("R", ("x", "c")))

    # the consecutive reading holds on the literal relation, the full one does not
    rel = literal_betweenness(line5)
    assert is_consecutive_chain(rel, "abcde")
    assert not is_chain(rel, Chain("Q", tuple("abcde")))
    assert not is_consecutive_chain(rel, "abca")


def test_chain_append(line5_sb):
    ch = Chain("Q", tuple("bcd"))
    assert chain_append_left(ch, "a", line5_sb).seq == tuple("abcd")
    assert chain_append_right(ch, "e", line5_sb).seq == tuple("bcde")
    assert chain_reverse(ch).seq == tuple("dcb")

    with pytest.raises(ChainError) as e:
        chain_append_left(ch, "e", line5_sb)
    assert e.value.args[0] == "missing betweenness [e b d]"
    with pytest.raises(ChainError) as e:
        chain_append_left(ch, "c", line5_sb)
    assert e.value.args[0] == 'event "c" is already in chain (b,c,d)'
    with pytest.raises(ChainError) as e:
        chain_append_right(ch, "a", line5_sb)
    assert e.value.args[0] == "missing betweenness [b d a]"


def test_sort_into_chain(line5, line5_sb):
    Q = line5.path("Q")
    assert sort_into_chain(line5_sb, Q, "eca").seq == tuple("ace")
    assert sort_into_chain(line5_sb, Q, "dbeac").seq == tuple("abcde")
    assert sort_into_chain(line5_sb, Q, "db").seq == tuple("bd")

    with pytest.raises(ChainError) as e:
        sort_into_chain(line5_sb, Q, "a")
    assert e.value.args[0] == "need at least two events to form a chain, got 1"
    with pytest.raises(ChainError) as e:
        sort_into_chain(line5_sb, Q, "ax")
    assert e.value.args[0] == 'event "x" is not on path "Q"'


def test_sort_into_chain_needs_total_order(data_dir):
    s = load_structure(f"{data_dir}/unordered.struct")
    with pytest.raises(OrderingError) as e:
        sort_into_chain(saturate(s), s.path("Q"), "abcx")
    assert e.value.args[0] == "no ordering of a, c, x (O5 totality failure)"


@given(st.permutations("abcdefg"))
def test_sort_into_chain_recovers_the_line(seq):
    s = Structure(
        frozenset(seq),
        frozenset([Path("Q", frozenset(seq))]),
        frozenset(zip(seq, seq[1:], seq[2:])),
    )
    sb = saturate(s)
    ch = sort_into_chain(sb, s.path("Q"), reversed(seq))
    assert ch.seq == up_to_reversal(seq)
    assert ch.first < ch.last
    assert count_chain_orderings(sb, seq[:5]) == 2


def test_chain_insert(line5, line5_sb):
    Q = line5.path("Q")
    ch = Chain("Q", ("d", "b"))
    assert chain_insert(line5_sb, Q, ch, "c").seq == tuple("dcb")
    assert chain_insert(line5_sb, Q, ch, "a").seq == tuple("dba")
    assert chain_insert(line5_sb, Q, ch, "e").seq == tuple("edb")

    with pytest.raises(ChainError) as e:
        chain_insert(line5_sb, Q, ch, "x")
    assert e.value.args[0] == 'event "x" is not on path "Q"'


def test_count_chain_orderings(line5_sb):
    assert count_chain_orderings(line5_sb, "abcde") == 2
    # nothing orders x with the events of Q
    assert count_chain_orderings(line5_sb, "abx") == 0

    with pytest.raises(ChainError) as e:
        count_chain_orderings(line5_sb, "ab")
    assert e.value.args[0] == "need at least three events to count orderings, got 2"
    with pytest.raises(ChainError) as e:
        count_chain_orderings(line5_sb, "abcd", bound=3)
    assert e.value.args[0] == "4 events exceed the exhaustive bound 3"


def test_chains_on_a_sampled_line():
    from itertools import combinations

    from minkord.model import GeneratorConfig, generate_sample

    ms, s = generate_sample(GeneratorConfig(lines=3, seed=0))
    sb = saturate(s)
    L0 = s.path("L0")
    # coordinate order along the line
    ordered = [p.id for p in ms.points_on("L0")][:7]
    subsets = [X for size in range(3, 7) for X in combinations(ordered, size)]
    assert len(subsets) >= 20
    for X in subsets:
        assert count_chain_orderings(sb, X) == 2
        assert sort_into_chain(sb, L0, X).seq == up_to_reversal(X)


@given(st.permutations("abcdefg"), st.integers(2, 7))
def test_chain_reverse_is_an_involution(seq, size):
    ch = Chain("Q", tuple(seq[:size]))
    assert chain_reverse(chain_reverse(ch)) == ch
    assert chain_reverse(ch).seq == tuple(reversed(ch.seq))


def test_append_right_matches_the_direct_construction():
    from itertools import permutations

    seq = tuple("abcdef")
    s = Structure(
        frozenset(seq),
        frozenset([Path("Q", frozenset(seq))]),
        frozenset(zip(seq, seq[1:], seq[2:])),
    )
    sb = saturate(s)
    for size in range(2, 6):
        for X in permutations(seq, size):
            ch = Chain("Q", X)
            if not is_chain(sb, ch):
                continue
            for b in sorted(set(seq) - set(X)):
                if not sb.between(ch.first, ch.last, b):
                    continue
                direct = Chain("Q", ch.seq + (b,))
                if not is_chain(sb, direct):
                    continue
                assert chain_append_right(ch, b, sb) == direct
