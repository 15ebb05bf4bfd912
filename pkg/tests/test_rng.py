import numpy as np
import pytest

from tsrm_lab import kernels, rng

MASK = (1 << 64) - 1


def _reference_splitmix(seed, n):
    """Canonical splitmix64 generator, written out independently."""
    out, state = [], seed
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z ^= z >> 30
        z = (z * 0xBF58476D1CE4E5B9) & MASK
        z ^= z >> 27
        z = (z * 0x94D049BB133111EB) & MASK
        z ^= z >> 31
        out.append(z)
    return out


def test_mix64_is_the_splitmix_finalizer():
    # the i-th splitmix64 output for seed s is mix64(s + (i+1)*GOLDEN)
    for seed in (0, 1, 1234567, MASK):
        for i, want in enumerate(_reference_splitmix(seed, 16)):
            got = rng.mix64((seed + (i + 1) * rng.GOLDEN) & MASK)
            assert got == want


def test_mix64_frozen_vectors():
    assert rng.mix64(rng.GOLDEN) == 0xE220A8397B1DCDAF
    assert rng.mix64((2 * rng.GOLDEN) & MASK) == 0x6E789E6AA1B965F4
    assert rng.mix64((1234567 + rng.GOLDEN) & MASK) == 0x599ED017FB08FC85


def test_stream_base_frozen():
    assert rng.stream_base(42, rng.TAG_WALK, 0) == 0x067859393FBB9E6D
    assert rng.stream_base(42, rng.TAG_WEB, 7) == 0xA8F172BAB41D122E
    assert rng.raw64(rng.stream_base(42, rng.TAG_WALK, 0), 5) \
        == 0x4E21959957717CD1


def test_streams_are_distinct():
    seen = set()
    for tag in (rng.TAG_WALK, rng.TAG_WEB, rng.TAG_GEOM):
        for sub in range(100):
            seen.add(rng.stream_base(99, tag, sub))
    assert len(seen) == 300


@pytest.mark.parametrize("value", [0, 1, 42, 2**31, 2**63 - 1, MASK])
def test_python_and_kernel_mix_agree(value):
    assert rng.mix64(value) == int(kernels.mix64(np.uint64(value)))


def test_python_and_kernel_stream_base_agree():
    for seed in (0, 42, 123456789):
        for tag in (rng.TAG_WALK, rng.TAG_WEB, rng.TAG_GEOM):
            for sub in (0, 1, 999):
                want = rng.stream_base(seed, tag, sub)
                got = int(kernels.stream_base(np.uint64(seed),
                                              np.uint64(tag),
                                              np.uint64(sub)))
                assert got == want


def test_python_and_kernel_unit_double_agree():
    for z in (0, 1, 2**11, 2**53, MASK, 0xDEADBEEFCAFEF00D):
        assert rng.unit_double(z) == float(kernels.unit_double(np.uint64(z)))


def test_unit_double_is_positive_and_at_most_one():
    # never zero (logs stay finite); the single extreme word rounds to 1.0
    assert rng.unit_double(0) == 0.5 * 2.0 ** -53
    assert rng.unit_double(MASK) == 1.0
    assert 0.0 < rng.unit_double(1 << 40) < 1.0
    assert 0.0 < rng.unit_double((1 << 63) + 12345) < 1.0


def test_coin_bit_matches_top_bit():
    base = rng.stream_base(7, rng.TAG_WALK, 0)
    for i in range(200):
        assert rng.coin_bit(base, i) == (rng.raw64(base, i) >> 63)


def test_web_coin_python_kernel_agree():
    base = rng.stream_base(5, rng.TAG_WEB, 0)
    for idx in range(-12, 12):
        for h in range(-2, 8):
            want = rng.web_coin_up(base, idx, h)
            got = bool(kernels.web_coin_up(np.uint64(base),
                                           np.int64(idx), np.int64(h)))
            assert got == want


def test_web_coin_is_a_function_of_the_anchor():
    base = rng.stream_base(5, rng.TAG_WEB, 0)
    assert rng.web_coin_up(base, 3, 1) == rng.web_coin_up(base, 3, 1)
    # distinct anchors land on distinct keys
    keys = {rng.anchor_key(i, h) for i in range(-50, 50)
            for h in range(-1, 20)}
    assert len(keys) == 100 * 21
