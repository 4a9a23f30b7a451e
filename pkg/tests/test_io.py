import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermat.annihilator import AnnihilatorSpec
from hermat.io import (
    FormatError,
    matrix_from_json,
    matrix_to_json,
    read_matrix,
    read_spec,
    spec_from_json,
    write_matrix,
    write_spec,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(finite, min_size=2 * n * n, max_size=2 * n * n)))
def test_matrix_round_trip_is_bit_exact(vals):
    n = int(round((len(vals) // 2) ** 0.5))
    A = (np.array(vals[::2]) + 1j * np.array(vals[1::2])).reshape(n, n)
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(A))))
    assert back.tobytes() == A.tobytes()


def test_file_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A[0, 0] = -0.0
    write_matrix(tmp_path / "a.json", A, {"note": "x"})
    assert read_matrix(tmp_path / "a.json").tobytes() == A.tobytes()
    spec = AnnihilatorSpec([(0.1 + 1 / 3j, 2), (-7.25, 0)])
    write_spec(tmp_path / "s.json", spec)
    assert read_spec(tmp_path / "s.json") == spec


@pytest.mark.parametrize("data", [
    [], {"n": 2}, {"n": 0, "rows": []}, {"n": True, "rows": [[[1, 0]]]},
    {"n": 2, "rows": [[[1, 0], [1, 0]]]}, {"n": 1, "rows": [[[1]]]},
    {"n": 1, "rows": [[["1", 0]]]}, {"n": 1, "rows": [[[1e400, 0]]]},
])
def test_malformed_matrix(data):
    with pytest.raises(FormatError):
        matrix_from_json(data)


@pytest.mark.parametrize("data", [
    {}, {"roots": [{"a": [1, 0]}]}, {"roots": [{"a": [1, 0], "alpha": -1}]},
    {"roots": [{"a": [1, 0], "alpha": 1.5}]}, {"roots": []},
    {"roots": [{"a": [1, 0], "alpha": 0}, {"a": [1, 0], "alpha": 1}]},
])
def test_malformed_spec(data):
    with pytest.raises(FormatError):
        spec_from_json(data)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        read_matrix(path)
