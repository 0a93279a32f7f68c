import json

import numpy as np
import pytest

from diffskel.exceptions import FormatError
from diffskel.io import read_volume, volume_paths, write_volume
from diffskel.volume import BinaryVolume, ProbabilityVolume


def test_roundtrip_binary_7x5x3(tmp_path):
    v = (np.random.default_rng(0).random((7, 5, 3)) < 0.5).astype(np.uint8)
    write_volume(v, tmp_path / "a.json")
    back = read_volume(tmp_path / "a.json")
    assert isinstance(back, BinaryVolume)
    assert np.array_equal(np.asarray(back), v)


def test_roundtrip_many_random(tmp_path):
    rng = np.random.default_rng(1)
    for i in range(1000):
        shape = tuple(rng.integers(1, 6, 3))
        if i % 2:
            v = (rng.random(shape) < 0.5).astype(np.uint8)
        else:
            v = rng.random(shape).astype(np.float32)
        path = tmp_path / f"v{i % 10}"
        write_volume(v, path)
        assert np.array_equal(np.asarray(read_volume(path)), v)


def test_raw_layout_is_x_fastest(tmp_path):
    v = np.zeros((3, 2, 1), dtype=np.uint8)
    v[1, 0, 0] = 1
    write_volume(v, tmp_path / "a")
    _, raw = volume_paths(tmp_path / "a")
    assert list(raw.read_bytes()) == [0, 1, 0, 0, 0, 0]
    header = json.loads((tmp_path / "a.json").read_text())
    assert header == {"shape": [3, 2, 1], "dtype": "u8", "order": "x-fastest"}


def test_short_raw_file_is_format_error(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps({"shape": [2, 2, 2], "dtype": "u8", "order": "x-fastest"}))
    (tmp_path / "a.raw").write_bytes(bytes(7))
    with pytest.raises(FormatError, match="a.raw"):
        read_volume(tmp_path / "a.json")


def test_out_of_range_probability_is_format_error(tmp_path):
    (tmp_path / "p.json").write_text(json.dumps({"shape": [1, 1, 1], "dtype": "f32", "order": "x-fastest"}))
    (tmp_path / "p.raw").write_bytes(np.array([1.5], dtype="<f4").tobytes())
    with pytest.raises(FormatError):
        read_volume(tmp_path / "p")


def test_non_binary_u8_is_format_error(tmp_path):
    (tmp_path / "b.json").write_text(json.dumps({"shape": [2, 1, 1], "dtype": "u8", "order": "x-fastest"}))
    (tmp_path / "b.raw").write_bytes(bytes([0, 2]))
    with pytest.raises(FormatError):
        read_volume(tmp_path / "b")


@pytest.mark.parametrize(
    "header",
    ["not json", json.dumps({"shape": [2, 2], "dtype": "u8"}), json.dumps({"shape": [1, 1, 1], "dtype": "f64"}),
     json.dumps({"shape": [1, 1, 1], "dtype": "u8", "order": "z-fastest"})],
)
def test_bad_headers(tmp_path, header):
    (tmp_path / "h.json").write_text(header)
    (tmp_path / "h.raw").write_bytes(bytes(1))
    with pytest.raises(FormatError):
        read_volume(tmp_path / "h")


def test_missing_files(tmp_path):
    with pytest.raises(FormatError, match="not found"):
        read_volume(tmp_path / "nothing")


def test_probability_volume_written_as_f32(tmp_path):
    write_volume(ProbabilityVolume(np.full((2, 2, 2), 0.25)), tmp_path / "p")
    assert json.loads((tmp_path / "p.json").read_text())["dtype"] == "f32"
    assert isinstance(read_volume(tmp_path / "p"), ProbabilityVolume)
