import numpy as np
import pytest

from diffskel.exceptions import DomainError
from diffskel.shapes import EXPECTED_BETTI, KINDS, make_shape
from diffskel.topology import betti_numbers


@pytest.mark.parametrize("kind", sorted(EXPECTED_BETTI))
def test_documented_betti_numbers(kind):
    assert betti_numbers(make_shape(kind)).betti == EXPECTED_BETTI[kind]


def test_line_of_length_5():
    v = make_shape("line", {"length": 5})
    assert v.sum() == 5 and betti_numbers(v).betti == (1, 0, 0)


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic_and_padded(kind):
    a, b = make_shape(kind, seed=3), make_shape(kind, seed=3)
    assert np.array_equal(a, b)
    assert a[0].sum() == a[-1].sum() == a[:, 0].sum() == a[:, :, -1].sum() == 0


def test_blob_seed_changes_shape():
    assert not np.array_equal(make_shape("random_blob", seed=1), make_shape("random_blob", seed=2))


@pytest.mark.parametrize(
    "kind,params",
    [("line", {"length": 0}), ("solid_box", {"size": (3, 0, 3)}), ("thick_torus", {"minor_radius": 0}),
     ("thick_torus", {"major_radius": 2, "minor_radius": 3}), ("hollow_shell", {"thickness": 0}),
     ("random_blob", {"size": 0}), ("random_blob", {"fill": 1.0}), ("line", {"width": 2}), ("cone", {})],
)
def test_degenerate_parameters(kind, params):
    with pytest.raises(DomainError):
        make_shape(kind, params)
