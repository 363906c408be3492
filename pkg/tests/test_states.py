import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halograph.errors import DuplicateKet, InvalidParam, ParseError
from halograph.states import (TargetSpec, ame43, ghz, ghz_with_ancillas, ket_from_string,
                              ket_to_string, parse_target, reduced_density_matrix)


def amplitudes(t: TargetSpec) -> dict:
    return {ket_to_string(k): a for k, a in t.kets}


def test_ghz32():
    t = ghz(3, 2)
    assert amplitudes(t) == pytest.approx({"000": 1 / math.sqrt(2), "111": 1 / math.sqrt(2)})


def test_ghz43():
    t = ghz(4, 3)
    assert amplitudes(t) == pytest.approx({f"{i}" * 4: 1 / math.sqrt(3) for i in range(3)})
    assert t.dimensions == (3, 3, 3, 3)


def test_ghz22_is_bell():
    assert amplitudes(ghz(2, 2)) == pytest.approx({"00": 2 ** -0.5, "11": 2 ** -0.5})


@pytest.mark.parametrize("n, d", [(1, 3), (3, 1), (0, 0)])
def test_ghz_rejects_small_parameters(n, d):
    with pytest.raises(InvalidParam):
        ghz(n, d)


def test_ghz_with_four_ancillas():
    t = ghz_with_ancillas(4, 4, 4)
    assert amplitudes(t) == pytest.approx({f"{i}" * 4 + "0000": 0.5 for i in range(4)})
    assert t.dimensions == (4, 4, 4, 4, 1, 1, 1, 1)


def test_ghz_with_zero_ancillas_is_identity():
    assert ghz_with_ancillas(4, 3, 0) == ghz(4, 3)


def test_ghz_with_one_ancilla():
    assert set(amplitudes(ghz_with_ancillas(3, 2, 1))) == {"0000", "1110"}


@given(n=st.integers(2, 6), d=st.integers(2, 7))
def test_ghz_properties(n, d):
    t = ghz(n, d)
    assert len(t) == d
    assert sum(abs(a) ** 2 for _, a in t.kets) == pytest.approx(1.0)
    assert len({k for k, _ in t.kets}) == d


def test_ame43_terms():
    t = ame43()
    assert len(t) == 9
    assert all(a == pytest.approx(1 / 3) for _, a in t.kets)


@pytest.mark.parametrize("size", [1, 2])
def test_ame43_marginals_maximally_mixed(size):
    t = ame43()
    for keep in itertools.combinations(range(4), size):
        rho = reduced_density_matrix(t, keep)
        eig = np.linalg.eigvalsh(rho)
        assert np.ptp(eig) <= 1e-12
        assert eig.sum() == pytest.approx(1.0)


def test_parse_bell_and_signed():
    bell = parse_target(["00", "11"], [1, 1])
    assert amplitudes(bell) == pytest.approx({"00": 2 ** -0.5, "11": 2 ** -0.5})
    signed = parse_target(["00", "11"], [1, -1])
    assert amplitudes(signed)["11"] == pytest.approx(-(2 ** -0.5))


def test_parse_digit_beyond_dimension():
    with pytest.raises(ParseError):
        parse_target(["012"], [1], [2, 2, 2])


def test_parse_duplicate_ket():
    with pytest.raises(DuplicateKet):
        parse_target(["01", "01"], [1, 1])


def test_parse_length_mismatch():
    with pytest.raises(ParseError):
        parse_target(["01", "1"], [1, 1])
    with pytest.raises(ParseError):
        parse_target(["01"], [1, 1])


def test_wide_mode_ket_strings():
    assert ket_from_string("0(12)3") == (0, 12, 3)
    assert ket_to_string((0, 12, 3)) == "0(12)3"


def test_target_json_round_trip():
    t = parse_target(["00", "11"], [1, 1j])
    back = TargetSpec.from_dict(t.to_dict())
    assert back.dimensions == t.dimensions
    assert amplitudes(back) == pytest.approx(amplitudes(t), abs=1e-15)
