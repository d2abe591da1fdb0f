import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpursuit.bitio import BitReader, BitWriter, DecodeError
from mcpursuit.codecs import (
    CODEC_HEADER_BITS,
    CODEC_IDS,
    PAIR_OVERHEAD_BITS,
    CodecError,
    CodedSignal,
    coded_from_bytes,
    coded_to_bytes,
    coeff_resolution,
    decode_any,
    decode_compressor_proxy,
    decode_literal,
    decode_piecewise_poly,
    decode_sparse,
    decode_uint,
    dl_surrogate,
    encode_compressor_proxy,
    encode_literal,
    encode_piecewise_poly,
    encode_sparse,
    encode_uint,
    iter_codebook,
    log_star,
    measure_pair_overhead,
    pair_overhead_battery,
    pp_dl_bound,
    pp_sample_numerators,
    quantize_pp_spec,
    sparse_dl_bound,
    uint_code_len,
    uint_code_len_bound,
)
from mcpursuit.quantize import QuantizedVector, quantize_vector


def sparse_vectors(max_n=40, max_m=10):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        m = draw(st.integers(1, max_m))
        k = draw(st.integers(0, min(n, 6)))
        support = draw(
            st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True)
        )
        nums = [0] * n
        for pos in support:
            nums[pos] = draw(st.integers(1, (1 << m) - 1))
        return QuantizedVector(tuple(nums), m)

    return build()


# ---------------------------------------------------------------------------
# universal integer code


def test_log_star_values():
    assert log_star(1) == 0.0
    assert log_star(2) == 1.0
    assert log_star(8) == pytest.approx(6.169925001442312, rel=0, abs=1e-14)
    assert log_star(1024) == pytest.approx(10 + 2 * math.log2(10), rel=1e-15)


def test_uint_code_known_words():
    assert encode_uint(1) == "1"
    assert encode_uint(2) == "0100"
    assert encode_uint(3) == "0101"
    assert encode_uint(8) == "00100000"


@given(n=st.integers(min_value=1, max_value=1 << 48))
def test_uint_code_roundtrip(n):
    s = encode_uint(n)
    assert len(s) == uint_code_len(n)
    r = BitReader(s)
    assert decode_uint(r) == n
    r.expect_end()


def test_uint_code_self_delimiting():
    # decoding stops at the word boundary even with trailing data
    r = BitReader(encode_uint(37) + "10110")
    assert decode_uint(r) == 37
    assert r.remaining() == 5


def test_uint_code_length_bound_exhaustive():
    for n in range(1, 10**6 + 1):
        assert uint_code_len(n) <= uint_code_len_bound(n)


@given(e=st.integers(min_value=1, max_value=500), off=st.integers(0, 2))
def test_uint_code_length_bound_large(e, off):
    n = (1 << e) + off
    assert uint_code_len(n) <= uint_code_len_bound(n)


def test_uint_rejects_nonpositive():
    with pytest.raises(ValueError):
        encode_uint(0)
    with pytest.raises(ValueError):
        uint_code_len(0)
    with pytest.raises(ValueError):
        log_star(0)


# ---------------------------------------------------------------------------
# sparse codec


def test_sparse_bound_values():
    assert sparse_dl_bound(0, 3, 2) == 12
    assert sparse_dl_bound(2, 256, 8) == 78
    assert sparse_dl_bound(2, 1024, 10) == 91


@given(q=sparse_vectors())
@settings(max_examples=300)
def test_sparse_roundtrip_and_bound(q):
    c = encode_sparse(q)
    assert c.codec_id == "sparse"
    assert decode_sparse(c, q.n, q.resolution_bits) == q
    k = len(q.support())
    assert c.dl_bits <= sparse_dl_bound(k, q.n, q.resolution_bits)


def test_sparse_decode_rejects_context_mismatch():
    q = QuantizedVector((0, 5, 0, 0), 3)
    c = encode_sparse(q)
    with pytest.raises(DecodeError):
        decode_sparse(c, 5, 3)


def test_sparse_decode_rejects_noncanonical_zero():
    # handcrafted stream coding position 1 with payload 0
    w = BitWriter()
    w.write_bits("000")
    encode_uint(4, w)  # n
    encode_uint(2, w)  # k + 1 = 2
    encode_uint(2, w)  # position 1
    w.write_fixed(0, 3)  # zero payload
    with pytest.raises(DecodeError):
        decode_sparse(CodedSignal("sparse", w.getvalue()), 4, 3)


def test_sparse_decode_rejects_unsorted_positions():
    w = BitWriter()
    w.write_bits("000")
    encode_uint(4, w)
    encode_uint(3, w)  # k = 2
    encode_uint(3, w)  # position 2
    encode_uint(2, w)  # position 1, out of order
    w.write_fixed(1, 3)
    w.write_fixed(1, 3)
    with pytest.raises(DecodeError):
        decode_sparse(CodedSignal("sparse", w.getvalue()), 4, 3)


# ---------------------------------------------------------------------------
# piecewise-polynomial codec


def pp_specs():
    @st.composite
    def build(draw):
        n = draw(st.integers(2, 24))
        m = draw(st.integers(1, 6))
        n_deg = draw(st.integers(0, 3))
        q_breaks = draw(st.integers(0, min(3, n - 1)))
        breaks = sorted(
            draw(
                st.lists(
                    st.integers(1, n - 1),
                    min_size=q_breaks,
                    max_size=q_breaks,
                    unique=True,
                )
            )
        )
        rows = []
        for _ in range(q_breaks + 1):
            raw = draw(
                st.lists(
                    st.floats(0.0, 1.0, allow_nan=False),
                    min_size=n_deg + 1,
                    max_size=n_deg + 1,
                )
            )
            total = sum(raw)
            if total >= 1.0:
                raw = [v / (total + 1e-9) * 0.98 for v in raw]
            rows.append(raw)
        return breaks, rows, n, m
    return build()


@given(spec=pp_specs())
@settings(max_examples=150, deadline=None)
def test_pp_roundtrip_matches_exact_sampler(spec):
    breaks, rows, n, m = spec
    coded = encode_piecewise_poly(breaks, rows, n, m)
    bks, nums, m_prime = quantize_pp_spec(breaks, rows, n, m)
    n_deg = len(rows[0]) - 1
    expected = pp_sample_numerators(bks, nums, n_deg, n, m)
    got = decode_piecewise_poly(coded, n, m)
    assert got == QuantizedVector(expected, m)
    assert coded.dl_bits <= pp_dl_bound(len(bks), n_deg, n, m)


@given(spec=pp_specs())
@settings(max_examples=150, deadline=None)
def test_pp_sampling_agrees_with_rational_oracle(spec):
    breaks, rows, n, m = spec
    bks, nums, m_prime = quantize_pp_spec(breaks, rows, n, m)
    n_deg = len(rows[0]) - 1
    sampled = pp_sample_numerators(bks, nums, n_deg, n, m)
    bounds = (0,) + bks + (n,)
    for piece, row in enumerate(nums):
        for i in range(bounds[piece], bounds[piece + 1]):
            t = Fraction(i, n)
            val = sum(Fraction(c, 1 << m_prime) * t**j for j, c in enumerate(row))
            assert sampled[i] == math.floor(val * (1 << m))


@given(spec=pp_specs())
@settings(max_examples=100, deadline=None)
def test_pp_coefficient_truncation_stays_under_one_step(spec):
    # decoded samples track the real-coefficient polynomial to within
    # one truncation step from the coefficients plus one from the samples
    breaks, rows, n, m = spec
    coded = encode_piecewise_poly(breaks, rows, n, m)
    got = np.array(decode_piecewise_poly(coded, n, m).to_floats())
    bounds = [0] + list(breaks) + [n]
    for piece, row in enumerate(rows):
        for i in range(bounds[piece], bounds[piece + 1]):
            t = i / n
            val = sum(c * t**j for j, c in enumerate(row))
            assert got[i] <= val + 1e-12
            assert val - got[i] < 2.0 ** (1 - m) + 1e-12


def test_pp_rejects_bad_specs():
    with pytest.raises(CodecError):
        encode_piecewise_poly([0], [[0.1], [0.2]], 8, 3)  # breakpoint at 0
    with pytest.raises(CodecError):
        encode_piecewise_poly([8], [[0.1], [0.2]], 8, 3)  # beyond n-1
    with pytest.raises(CodecError):
        encode_piecewise_poly([2.5], [[0.1], [0.2]], 8, 3)  # off the grid
    with pytest.raises(CodecError):
        encode_piecewise_poly([3, 2], [[0.1]] * 3, 8, 3)  # not ascending
    with pytest.raises(CodecError):
        encode_piecewise_poly([], [[0.7, 0.6]], 8, 3)  # sum >= 1
    with pytest.raises(CodecError):
        encode_piecewise_poly([], [[-0.1, 0.2]], 8, 3)
    with pytest.raises(CodecError):
        encode_piecewise_poly([2], [[0.1]], 8, 3)  # row count mismatch


def test_pp_decode_rejects_invalid_streams():
    coded = encode_piecewise_poly([4], [[0.25], [0.5]], 8, 3)
    with pytest.raises(DecodeError):
        decode_piecewise_poly(coded, 16, 3)  # context mismatch
    # coefficient row violating the sum constraint
    w = BitWriter()
    w.write_bits("001")
    encode_uint(8, w)  # n
    encode_uint(1, w)  # degree 0
    encode_uint(1, w)  # no breakpoints
    w.write_fixed(7, 3)  # sum == 2^m - 1 is fine
    ok = decode_piecewise_poly(CodedSignal("piecewise_poly", w.getvalue()), 8, 3)
    assert ok.numerators == (7,) * 8
    w2 = BitWriter()
    w2.write_bits("001")
    encode_uint(8, w2)
    encode_uint(2, w2)  # degree 1, m' = 4
    encode_uint(1, w2)
    w2.write_fixed(8, 4)
    w2.write_fixed(8, 4)  # sum 16 == 2^4, out of class
    with pytest.raises(DecodeError):
        decode_piecewise_poly(CodedSignal("piecewise_poly", w2.getvalue()), 8, 3)


def test_coeff_resolution():
    assert coeff_resolution(0, 8) == 8
    assert coeff_resolution(1, 8) == 9
    assert coeff_resolution(2, 8) == 10
    assert coeff_resolution(3, 8) == 10
    assert coeff_resolution(4, 8) == 11


# ---------------------------------------------------------------------------
# literal and proxy codecs


@given(
    nums=st.lists(st.integers(0, 255), min_size=1, max_size=60),
)
def test_literal_roundtrip(nums):
    q = QuantizedVector(tuple(nums), 8)
    c = encode_literal(q)
    assert c.dl_bits == CODEC_HEADER_BITS + q.n * 8
    assert decode_literal(c, q.n, 8) == q


@given(
    nums=st.lists(st.integers(0, 31), min_size=1, max_size=80),
)
@settings(max_examples=100)
def test_proxy_roundtrip(nums):
    q = QuantizedVector(tuple(nums), 5)
    c = encode_compressor_proxy(q)
    assert decode_compressor_proxy(c, q.n, 5) == q


def test_decode_any_dispatch():
    q = QuantizedVector((0, 9, 0, 0, 0, 0, 0, 2), 4)
    for enc in (encode_sparse, encode_literal, encode_compressor_proxy):
        c = enc(q)
        assert decode_any(c, 8, 4) == q
    with pytest.raises(DecodeError):
        decode_any(CodedSignal("sparse", "111" + "0" * 20), 8, 4)
    with pytest.raises(DecodeError):
        decode_any(CodedSignal("sparse", "01"), 8, 4)


def test_byte_framing_of_codewords():
    q = QuantizedVector((0, 9, 0, 0, 0, 0, 0, 2), 4)
    c = encode_sparse(q)
    back = coded_from_bytes(coded_to_bytes(c))
    assert back == c


# ---------------------------------------------------------------------------
# description-length surrogate


def test_surrogate_picks_literal_on_dense_random():
    rng = np.random.default_rng(7)
    q = quantize_vector(rng.random(64), 16)
    res = dl_surrogate(q)
    assert (res.dl_bits, res.codec_id) == (1027, "literal")


def test_surrogate_picks_sparse_on_sparse():
    q = QuantizedVector((0,) * 254 + (3, 200), 8)
    res = dl_surrogate(q)
    assert res.codec_id == "sparse"
    assert res.dl_bits <= sparse_dl_bound(2, 256, 8)


def test_surrogate_finds_constant_runs():
    q = QuantizedVector((5,) * 100 + (9,) * 156, 8)
    res = dl_surrogate(q)
    assert res.codec_id == "piecewise_poly"
    assert res.dl_bits == 50
    assert decode_any(res.coded, 256, 8) == q


def test_surrogate_uses_hint_only_when_it_reproduces():
    # a steep ramp has many distinct sample values, so the constant-run
    # fallback is expensive and the affine hint should win outright
    spec = ([], [[0.1, 0.8]])
    coded = encode_piecewise_poly(spec[0], spec[1], 64, 6)
    q = decode_piecewise_poly(coded, 64, 6)
    blind = dl_surrogate(q)
    hinted = dl_surrogate(q, pp_hint=spec)
    assert hinted.codec_id == "piecewise_poly"
    assert hinted.dl_bits == coded.dl_bits
    assert hinted.dl_bits < blind.dl_bits
    # a hint that decodes to something else is ignored
    other = dl_surrogate(q, pp_hint=([], [[0.9, 0.05]]))
    assert other.dl_bits == blind.dl_bits


@given(q=sparse_vectors(max_n=24, max_m=6))
@settings(max_examples=150, deadline=None)
def test_surrogate_never_beaten_by_literal(q):
    res = dl_surrogate(q)
    assert res.dl_bits <= CODEC_HEADER_BITS + q.n * q.resolution_bits
    assert decode_any(res.coded, q.n, q.resolution_bits) == q


# ---------------------------------------------------------------------------
# codebook enumeration: prefix-freeness and codeword counting


def test_codebooks_prefix_free_and_kraft():
    n, m, budget = 4, 2, 22
    words = []
    for codec_id in ("sparse", "piecewise_poly", "literal"):
        for payload, vec in iter_codebook(codec_id, n, m, budget):
            assert len(payload) <= budget
            assert decode_any(CodedSignal(codec_id, payload), n, m) == vec
            words.append(payload)
    assert len(set(words)) == len(words)
    by_len = sorted(words, key=len)
    for i, w in enumerate(by_len):
        for w2 in by_len[i + 1 :]:
            assert not w2.startswith(w) or w2 == w
    # Kraft mass of any prefix-free subset stays below 1,
    # so at most 2^budget codewords can fit under the budget
    kraft = sum(2.0 ** -len(w) for w in words)
    assert kraft < 1.0
    assert len(words) <= 2**budget


def test_proxy_codebook_not_enumerable():
    with pytest.raises(ValueError):
        iter_codebook("compressor_proxy", 4, 2, 20)
    # and its codewords cannot fit small budgets anyway: zlib framing alone
    # exceeds 20 bits on every input
    q = QuantizedVector((0, 0, 0, 0), 2)
    assert encode_compressor_proxy(q).dl_bits > 20


# ---------------------------------------------------------------------------
# pair-difference overhead


def test_pair_overhead_within_pinned_constant():
    assert measure_pair_overhead(pair_overhead_battery()) <= PAIR_OVERHEAD_BITS


def test_pair_overhead_alternate_seed():
    assert measure_pair_overhead(pair_overhead_battery(99)) <= PAIR_OVERHEAD_BITS
