import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import meshrdh.cipher as cipher
from meshrdh.exceptions import KeyFormatError
from meshrdh.quantizer import QuantizedMesh, offset_words

KM = bytes.fromhex("00112233445566778899aabbccddeeff00112233445566778899aabbccddeeff")
KA = bytes.fromhex("ffeeddccbbaa99887766554433221100ffeeddccbbaa99887766554433221100")
NONCE = bytes.fromhex("000102030405060708090a0b")

COORDS = np.array([[12345, -2, 0], [-100000, 99999, 1], [7, -7, 50000]])
FACES = np.array([[1, 2, 3]])


def _q():
    return QuantizedMesh(p=5, l=32, coords=COORDS.copy(), faces=FACES.copy())


def test_keystream_deterministic():
    a = cipher.keystream(KM, NONCE, 128)
    b = cipher.keystream(KM, NONCE, 128)
    assert np.array_equal(a, b)


def test_keystream_prefix_consistent():
    long = cipher.keystream(KM, NONCE, 999)
    short = cipher.keystream(KM, NONCE, 100)
    assert np.array_equal(long[:100], short)


def test_keystream_empty():
    assert cipher.keystream(KM, NONCE, 0).size == 0
    assert cipher.keystream_bytes(KM, NONCE, 0) == b""


def test_keystream_golden():
    assert cipher.keystream_bytes(KM, NONCE, 16).hex() == "69a596dad2cd014fbef2b7ffc114cbc7"
    assert cipher.keystream(KM, NONCE, 12).tolist() == [1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0]


def test_nonce_changes_half_the_bits():
    n2 = bytes.fromhex("0f0e0d0c0b0a09080706050400")[:12]
    a = cipher.keystream(KM, NONCE, 10_000)
    b = cipher.keystream(KM, n2, 10_000)
    diff = int(np.sum(a != b))
    # binomial(10^4, 1/2): mean 5000, sigma 50; allow 3 sigma
    assert abs(diff - 5000) <= 150


def test_encrypt_golden():
    enc = cipher.encrypt_mesh(_q(), KM, NONCE)
    assert enc.tolist() == [
        [1519818064, 821965356, 2142761662],
        [3090509217, 1946789182, 3545655997],
        [3218819877, 3524100986, 3788233666],
    ]


def test_encrypt_decrypt_involution():
    q = _q()
    enc = cipher.encrypt_mesh(q, KM, NONCE)
    back = cipher.decrypt_mesh(enc, q.p, q.l, q.faces, KM, NONCE)
    assert back == q


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16, 32, 64]))
def test_involution_property(seed, l):
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 1 << min(l, 63), (6, 3)).astype(np.uint64)
    enc = cipher.encrypt_words(words, l, KM, NONCE)
    assert np.array_equal(cipher.encrypt_words(enc, l, KM, NONCE), words)


def test_zero_keystream_is_identity():
    # test hook: the word-level XOR with an all-zero stream
    words = offset_words(COORDS, 32)
    zeros = np.zeros(words.size, dtype=np.uint64)
    assert np.array_equal(cipher.xor_words(words, 32, zeros), words)


def test_single_bit_keystream_locality():
    words = offset_words(COORDS, 32)
    one_bit = np.zeros(words.size, dtype=np.uint64)
    one_bit[4] = np.uint64(1 << 17)
    flipped = cipher.xor_words(words, 32, one_bit)
    diff = words ^ flipped
    assert int(diff.sum()) == 1 << 17
    assert diff.ravel()[4] == 1 << 17


def test_two_keys_differ():
    q = _q()
    assert not np.array_equal(
        cipher.encrypt_mesh(q, KM, NONCE), cipher.encrypt_mesh(q, KA, NONCE)
    )


def test_faces_and_params_untouched():
    q = _q()
    enc = cipher.encrypt_mesh(q, KM, NONCE)
    back = cipher.decrypt_mesh(enc, q.p, q.l, q.faces, KM, NONCE)
    assert np.array_equal(back.faces, q.faces)
    assert (back.p, back.l) == (q.p, q.l)


def test_payload_involution_and_golden():
    data = b"hello world"
    enc = cipher.encrypt_payload(data, KA, NONCE)
    assert enc.hex() == "7e500fde38e2a2c5487a92"
    assert cipher.encrypt_payload(enc, KA, NONCE) == data
    assert cipher.encrypt_payload(b"", KA, NONCE) == b""


def test_parse_key():
    assert cipher.parse_key("00" * 32) == bytes(32)
    with pytest.raises(KeyFormatError):
        cipher.parse_key("zz" * 32)
    with pytest.raises(KeyFormatError):
        cipher.parse_key("00" * 31)
    assert cipher.parse_key("0a" * 12, 12) == b"\x0a" * 12


def test_bad_key_sizes():
    with pytest.raises(KeyFormatError):
        cipher.keystream_bytes(b"short", NONCE, 4)
    with pytest.raises(KeyFormatError):
        cipher.keystream_bytes(KM, b"short", 4)
