import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from ordept import gf2
from ordept.codes import (
    BUILTIN_CODES,
    PRIMITIVE_POLYNOMIALS,
    CodeError,
    build_bch_code,
    build_polar_code,
    encode,
    from_parity_check,
    gf_tables,
    is_codeword,
    load_code,
    resolve_code,
    save_code,
    syndrome,
)
from ordept.harness import _codebook_bytes


def dense_syndrome(w, code):
    """Row-by-row product w H^T, packed with row i at bit i."""
    bits = [int(np.dot(code.H[i].astype(int), np.asarray(w, dtype=int)) % 2) for i in range(code.r)]
    return sum(b << i for i, b in enumerate(bits))


def gf_mul(a, b, m, poly):
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


def gf_pow(a, e, m, poly):
    out = 1
    for _ in range(e):
        out = gf_mul(out, a, m, poly)
    return out


def eval_binary_poly(coeffs, x, m, poly):
    """Evaluate sum_d coeffs[d] x^d in GF(2^m)."""
    acc, xp = 0, 1
    for c in coeffs:
        if c:
            acc ^= xp
        xp = gf_mul(xp, x, m, poly)
    return acc


def brute_minimal_degree(root, m, poly):
    for deg in range(1, m + 1):
        for tail in itertools.product((0, 1), repeat=deg):
            coeffs = list(tail) + [1]
            if eval_binary_poly(coeffs, root, m, poly) == 0:
                return deg
    raise AssertionError("no minimal polynomial found")


@pytest.mark.parametrize("m", sorted(PRIMITIVE_POLYNOMIALS))
def test_shipped_polynomials_are_primitive(m):
    exp, _ = gf_tables(m)
    size = (1 << m) - 1
    assert sorted(exp[:size]) == list(range(1, size + 1))


@pytest.mark.parametrize(
    "m, t, extend, nk",
    [(5, 2, True, (32, 21)), (8, 2, True, (256, 239)), (5, 2, False, (31, 21)), (3, 1, False, (7, 4))],
)
def test_bch_dimensions(m, t, extend, nk):
    code = build_bch_code(m, t, extend)
    assert (code.n, code.k) == nk


def test_bch_31_21_parity_degree_matches_brute_force_minimal_polynomials():
    m, poly = 5, PRIMITIVE_POLYNOMIALS[5]
    alpha = 2
    degrees = [brute_minimal_degree(gf_pow(alpha, i, m, poly), m, poly) for i in (1, 3)]
    # alpha and alpha^3 lie in different cyclotomic cosets, so the lcm is the product.
    assert sum(degrees) == 10
    code = build_bch_code(5, 2)
    assert code.r == 10


def test_bch_generator_has_designed_roots():
    m, poly = 5, PRIMITIVE_POLYNOMIALS[5]
    code = build_bch_code(5, 2)
    # A codeword polynomial vanishes at alpha^1..alpha^4.
    for row in code.G:
        for i in range(1, 5):
            assert eval_binary_poly(row, gf_pow(2, i, m, poly), m, poly) == 0


@pytest.mark.parametrize("name, dmin", [("bch-32-21", 6), ("bch-31-21", 5), ("hamming-7-4", 3)])
def test_minimum_distance_by_enumeration(name, dmin):
    book = _codebook_bytes(resolve_code(name))
    weights = np.unpackbits(book, axis=1).sum(axis=1)
    assert weights[weights > 0].min() == dmin


def test_bch_errors():
    with pytest.raises(CodeError):
        build_bch_code(11, 2)
    with pytest.raises(CodeError):
        build_bch_code(3, 4)
    with pytest.raises(CodeError):
        build_bch_code(5, 0)


def test_polar_128_116(polar128):
    assert polar128.r == 12
    assert polar128.H.shape == (12, 128)


def test_polar_smallest_is_repetition():
    code = build_polar_code(2, 1)
    np.testing.assert_array_equal(code.H, [[1, 1]])


def test_polar_8_4_dual_exhaustive():
    code = build_polar_code(8, 4)
    words = {tuple(encode(np.array(u, dtype=np.uint8), code)) for u in itertools.product((0, 1), repeat=4)}
    assert len(words) == 16
    zero_syndrome = {w for w in itertools.product((0, 1), repeat=8) if dense_syndrome(w, code) == 0}
    assert words == zero_syndrome


def test_polar_errors():
    with pytest.raises(CodeError):
        build_polar_code(12, 4)
    with pytest.raises(CodeError):
        build_polar_code(8, 8)


@pytest.mark.parametrize("name", sorted(BUILTIN_CODES))
def test_builtin_invariants(name):
    code = resolve_code(name)
    assert gf2.rank(code.H) == code.r
    assert not gf2.matmul(code.G, code.H.T).any()
    for j in range(code.n):
        unit = np.zeros(code.n, dtype=np.uint8)
        unit[j] = 1
        assert syndrome(unit, code) == code.columns[j]


def test_encode_examples(hamming, rng):
    assert not encode(np.zeros(4, dtype=np.uint8), hamming).any()
    np.testing.assert_array_equal(encode(np.array([1, 0, 0, 0], dtype=np.uint8), hamming), hamming.G[0])
    for _ in range(20):
        u = rng.integers(0, 2, size=4, dtype=np.uint8)
        assert syndrome(encode(u, hamming), hamming) == 0


def test_encode_requires_generator(hamming):
    bare = type(hamming)(name="bare", n=7, k=4, H=hamming.H)
    with pytest.raises(CodeError):
        encode(np.zeros(4, dtype=np.uint8), bare)


def test_syndrome_examples(hamming, bch32, rng):
    assert syndrome(np.zeros(7, dtype=np.uint8), hamming) == 0
    for code in (hamming, bch32):
        for _ in range(50):
            w = rng.integers(0, 2, size=code.n, dtype=np.uint8)
            assert syndrome(w, code) == dense_syndrome(w, code)
    with pytest.raises(CodeError):
        syndrome(np.zeros(6, dtype=np.uint8), hamming)


def test_syndrome_wide_code_path(rng):
    code = resolve_code("bch-256-239")
    for _ in range(5):
        w = rng.integers(0, 2, size=code.n, dtype=np.uint8)
        assert syndrome(w, code) == dense_syndrome(w, code)


def test_is_codeword_single_flip_hamming(hamming):
    for u in itertools.product((0, 1), repeat=4):
        c = encode(np.array(u, dtype=np.uint8), hamming)
        assert is_codeword(c, hamming)
        for j in range(7):
            e = c.copy()
            e[j] ^= 1
            assert not is_codeword(e, hamming)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_syndrome_is_linear(data):
    code = resolve_code(data.draw(st.sampled_from(["hamming-7-4", "bch-32-21", "polar-128-116"])))
    bits = st.lists(st.integers(0, 1), min_size=code.n, max_size=code.n)
    a = np.array(data.draw(bits), dtype=np.uint8)
    b = np.array(data.draw(bits), dtype=np.uint8)
    assert syndrome(a ^ b, code) == syndrome(a, code) ^ syndrome(b, code)


def test_save_load_round_trip(tmp_path, bch32):
    path = tmp_path / "bch.txt"
    save_code(bch32, path)
    back = load_code(path)
    assert (back.n, back.k) == (32, 21)
    np.testing.assert_array_equal(back.H, bch32.H)
    np.testing.assert_array_equal(back.G, bch32.G)


def test_hamming_fixture_parses_to_binary_columns():
    code = load_code(FIXTURES / "hamming74.txt")
    assert (code.n, code.k) == (7, 4)
    # Column j is the binary expansion of j + 1 with row 0 as the low bit.
    assert code.columns == tuple(range(1, 8))
    assert code.G is not None and not gf2.matmul(code.G, code.H.T).any()


def test_load_rejects_wrong_column_count(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("7 4\n101010\n0110011\n0001111\n")
    with pytest.raises(CodeError):
        load_code(path)


def test_load_rejects_wrong_row_count(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("7 4\n1010101\n0110011\n")
    with pytest.raises(CodeError):
        load_code(path)


def test_load_reduces_rank_deficient(tmp_path):
    path = tmp_path / "redundant.txt"
    path.write_text("7 3\n1010101\n0110011\n0001111\n1100110\n")
    with pytest.warns(UserWarning, match="reducing"):
        code = load_code(path)
    assert (code.n, code.k, code.r) == (7, 4, 3)


def test_resolve_unknown_code():
    with pytest.raises(CodeError):
        resolve_code("no-such-code")


def test_from_parity_check_derives_systematic_generator(hamming):
    code = from_parity_check(hamming.H, name="h")
    assert gf2.rank(code.G) == 4
    assert not gf2.matmul(code.G, code.H.T).any()
