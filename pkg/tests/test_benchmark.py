import csv

import numpy as np
import pytest

from diffskel.benchmark import CSV_HEADER, load_corpus, run_benchmark, score, synthetic_corpus, write_corpus, write_csv
from diffskel.exceptions import DomainError
from diffskel.shapes import make_shape


def test_rows_and_invariants(tmp_path):
    write_corpus(tmp_path / "c", blobs=2, seed=1)
    rows = run_benchmark(tmp_path / "c")
    assert len(rows) == 6 * 3
    for r in rows:
        assert min(r.beta0_err, r.beta1_err, r.beta2_err) >= 0
        assert r.points <= r.input_points
        if r.algorithm == "boolean":
            assert (r.beta0_err, r.beta1_err, r.beta2_err) == (0, 0, 0)
    broken = [r for r in rows if r.algorithm == "morphological_baseline" and r.beta0_err > 0]
    assert {r.shape_id for r in broken} & {"hollow_shell", "random_blob_000", "random_blob_001"}
    write_csv(rows, tmp_path / "b.csv")
    with open(tmp_path / "b.csv") as fh:
        table = list(csv.reader(fh))
    assert tuple(table[0]) == CSV_HEADER and len(table) == 19


def test_empty_corpus(tmp_path):
    with pytest.raises(DomainError):
        load_corpus(tmp_path)
    with pytest.raises(DomainError):
        run_benchmark([])


def test_unknown_algorithm():
    with pytest.raises(DomainError):
        score("x", "medial", make_shape("line"))


def test_corpus_is_seeded():
    a, b = synthetic_corpus(3, seed=4), synthetic_corpus(3, seed=4)
    assert [i for i, _ in a] == [i for i, _ in b]
    assert all(np.array_equal(x, y) for (_, x), (_, y) in zip(a, b))
