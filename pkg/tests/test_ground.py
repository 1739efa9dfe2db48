import pytest
from hypothesis import given, settings, strategies as st

from clusterforge.exceptions import FamilyError, ParamsError, ParseError
from clusterforge.ground import (
    Params, binom, complement_family, elements, format_family, from_masks,
    full_family, kset, ksets, make_family, parse_family, read_family, star,
    write_family,
)


def test_make_family_dedups_permuted_duplicates():
    F = make_family(Params(4, 2), [[1, 2], [2, 1], [3, 4]])
    assert F.as_lists() == [[1, 2], [3, 4]]


@pytest.mark.parametrize("n,k,sets,msg", [
    (5, 2, [[1, 6]], "out of range"),
    (5, 3, [[1, 2]], "cardinality"),
    (5, 3, [[1, 1, 2]], "repeated"),
])
def test_make_family_errors(n, k, sets, msg):
    with pytest.raises(FamilyError, match=msg):
        make_family(Params(n, k), sets)


@pytest.mark.parametrize("n,k,d", [(4, 2, 1), (4, 3, 4), (3, 4, 2), (65, 2, 2)])
def test_params_rejects(n, k, d):
    with pytest.raises(ParamsError):
        Params(n, k, d)


@pytest.mark.parametrize("n,k,x,size", [(4, 2, 1, 3), (5, 2, 3, 4), (6, 3, 1, 10)])
def test_star(n, k, x, size):
    F = star(Params(n, k), x)
    assert len(F) == size == binom(n - 1, k - 1)
    assert all(x in s for s in F.as_lists())


def test_star_n4_listing():
    assert star(Params(4, 2), 1).as_lists() == [[1, 2], [1, 3], [1, 4]]


@pytest.mark.parametrize("n,k,size", [(4, 2, 6), (5, 2, 10), (6, 3, 20)])
def test_full_family(n, k, size):
    assert len(full_family(Params(n, k))) == size


def test_complement():
    p = Params(4, 2)
    assert len(complement_family(full_family(p))) == 0
    assert len(complement_family(from_masks(p, []))) == 6
    C = complement_family(star(Params(5, 2), 1))
    assert len(C) == 6 and all(1 not in s for s in C.as_lists())


@pytest.mark.parametrize("a,b,v", [(5, 2, 10), (4, 1, 4), (8, 2, 28), (2, 3, 0), (0, 0, 1)])
def test_binom(a, b, v):
    assert binom(a, b) == v


def test_ksets_order_and_count():
    for n in range(1, 9):
        for k in range(0, n + 1):
            sets = ksets(n, k)
            assert sets == sorted(sets)
            assert len(sets) == binom(n, k)
            assert all(bin(s).count("1") == k for s in sets)


def test_kset_roundtrip():
    m = kset([3, 1, 5], 5, 3)
    assert elements(m) == (1, 3, 5)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_family("5\n")
    with pytest.raises(ParseError, match="line 3"):
        parse_family("5 2\n1 2\n1 9\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_family("5 2\n1 x\n")


def test_parse_comments_and_blank_lines():
    F = parse_family("# family\n5 2\n\n1 2   # first\n3 4\n")
    assert F.as_lists() == [[1, 2], [3, 4]]


def test_file_roundtrip(tmp_path):
    F = star(Params(6, 3), 2)
    path = tmp_path / "f.txt"
    write_family(F, path)
    assert read_family(path) == F


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(2, n), st.data())))
def test_serialize_identity(args):
    n, k, data = args
    sets = ksets(n, k)
    chosen = data.draw(st.lists(st.sampled_from(sets), max_size=12))
    F = from_masks(Params(n, k), chosen)
    assert parse_family(format_family(F)) == F
