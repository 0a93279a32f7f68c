import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from diffskel.estimators import MorphologicalSkeletonizer, Skeletonizer, StochasticSkeletonizer
from diffskel.exceptions import DomainError
from diffskel.peeler import PeelConfig, skeletonize
from diffskel.shapes import make_shape
from diffskel.validation import check_batch, check_binary_volume, check_iterations, check_probability_volume


def test_get_set_params_and_clone():
    s = Skeletonizer(detector="euler", iterations=3)
    assert s.get_params() == {"detector": "euler", "iterations": 3, "preserve_endpoints": True}
    c = clone(s).set_params(iterations="auto")
    assert c.iterations == "auto" and s.iterations == 3


def test_transform_matches_function():
    torus = make_shape("thick_torus")
    assert np.array_equal(Skeletonizer().fit_transform(torus), skeletonize(torus))
    out = Skeletonizer(iterations=1).fit(torus).transform(np.stack([torus, torus]))
    assert out.shape == (2, *torus.shape)
    assert np.array_equal(out[0], skeletonize(torus, PeelConfig(iterations=1)))


def test_ragged_batches_return_lists():
    out = MorphologicalSkeletonizer().fit_transform([make_shape("line"), make_shape("solid_box")])
    assert isinstance(out, list) and len(out) == 2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        Skeletonizer().transform(make_shape("line"))


def test_invalid_parameters_surface_on_fit():
    for est in (Skeletonizer(detector="lut"), Skeletonizer(iterations=-2), StochasticSkeletonizer(beta=-1),
                MorphologicalSkeletonizer(iterations="x")):
        with pytest.raises(DomainError):
            est.fit(make_shape("line"))


def test_stochastic_is_seeded():
    p = np.where(make_shape("thick_torus") == 1, 0.8, 0.2)
    a = StochasticSkeletonizer(beta=1.0, random_state=3).fit_transform(p)
    b = StochasticSkeletonizer(beta=1.0, random_state=3).fit_transform(p)
    assert np.array_equal(a, b)
    vote = StochasticSkeletonizer(beta=0.33, n_samples=5).fit_transform(p)
    assert vote.shape == p.shape


def test_pipeline_composition():
    pipe = make_pipeline(Skeletonizer(), MorphologicalSkeletonizer(iterations=1))
    assert pipe.fit_transform(make_shape("solid_box")).shape == make_shape("solid_box").shape


def test_validation_helpers():
    assert check_binary_volume(np.ones((2, 2))).shape == (2, 2, 1)
    with pytest.raises(DomainError, match="vol"):
        check_binary_volume(np.full((2, 2, 2), 3), "vol")
    with pytest.raises(DomainError):
        check_binary_volume(np.array(["a"] * 8).reshape(2, 2, 2))
    with pytest.raises(DomainError):
        check_probability_volume(np.full((2, 2, 2), np.nan))
    assert check_iterations("12") == 12 and check_iterations("auto") == "auto"
    with pytest.raises(DomainError):
        check_iterations(2.5)
    vols, single = check_batch(np.zeros((3, 2, 2, 2)), check_binary_volume)
    assert len(vols) == 3 and not single
