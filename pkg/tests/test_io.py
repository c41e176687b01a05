import numpy as np
import pytest

from proxpoint.io import read_pgm, write_pgm, write_vector_csv
from proxpoint.operators import load_vector_csv


def test_vector_roundtrip_exact(tmp_path, rng):
    x = rng.standard_normal(17) * 10.0 ** rng.integers(-300, 300, size=17)
    write_vector_csv(tmp_path / "x.csv", x)
    np.testing.assert_array_equal(load_vector_csv(tmp_path / "x.csv"), x)


def test_pgm_roundtrip(tmp_path):
    img = np.array([[0.0, -1.0, 2.0], [4.0, 0.5, -4.0]])
    write_pgm(tmp_path / "a.pgm", img)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n3 2\n255\n") and len(raw) == len(b"P5\n3 2\n255\n") + 6
    out = read_pgm(tmp_path / "a.pgm")
    np.testing.assert_array_equal(out, [[0, 64, 128], [255, 32, 255]])


def test_pgm_zero_image(tmp_path):
    write_pgm(tmp_path / "z.pgm", np.zeros((2, 2)))
    np.testing.assert_array_equal(read_pgm(tmp_path / "z.pgm"), 0)


def test_pgm_rejects_vectors(tmp_path):
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "v.pgm", np.zeros(4))
