"""scikit-learn style wrappers around the skeletonization routines.

The transformers are stateless: ``fit`` validates its input and records
the input shape, ``transform`` does the work. ``X`` is a single volume, a
4D stack of equally shaped volumes, or a list of volumes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .diff import NoiseParams, repeated_sample_skeleton, sample_relaxed
from .peeler import PeelConfig, morphological_skeleton_baseline, skeletonize
from .validation import check_batch, check_binary_volume, check_iterations, check_probability_volume


def _stack(outputs, single):
    if single:
        return outputs[0]
    shapes = {o.shape for o in outputs}
    return np.stack(outputs) if len(shapes) == 1 else outputs


class _VolumeTransformer(TransformerMixin, BaseEstimator):
    _checker = staticmethod(check_binary_volume)

    def fit(self, X, y=None):
        self._validate_params()
        volumes, _ = check_batch(X, self._checker)
        self.n_volumes_in_ = len(volumes)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_volumes_in_")
        self._validate_params()
        volumes, single = check_batch(X, self._checker)
        return _stack([self._transform_one(v) for v in volumes], single)

    def _validate_params(self):
        pass


class Skeletonizer(_VolumeTransformer):
    """Topology-preserving thinning of binary volumes.

    Parameters
    ----------
    detector : {"boolean", "euler"}
        Simple-point detector. ``"boolean"`` is exact; ``"euler"`` only checks
        the genus and may break topology.
    iterations : int or "auto"
        Number of outer iterations, or repeat until nothing changes.
    preserve_endpoints : bool
        Keep voxels with at most one foreground neighbor.
    """

    def __init__(self, detector="boolean", iterations="auto", preserve_endpoints=True):
        self.detector = detector
        self.iterations = iterations
        self.preserve_endpoints = preserve_endpoints

    def _config(self) -> PeelConfig:
        return PeelConfig(self.detector, check_iterations(self.iterations), bool(self.preserve_endpoints))

    def _validate_params(self):
        self._config()

    def _transform_one(self, v):
        return skeletonize(v, self._config())


class StochasticSkeletonizer(_VolumeTransformer):
    """Skeletonize probability volumes through the relaxed Bernoulli sample.

    With ``n_samples == 1`` the output is the skeleton of one hard sample;
    otherwise it is the majority vote over ``n_samples`` independent ones.
    """

    _checker = staticmethod(check_probability_volume)

    def __init__(self, detector="boolean", iterations=1, preserve_endpoints=True,
                 beta=0.33, tau=1.0, n_samples=1, random_state=0):
        self.detector = detector
        self.iterations = iterations
        self.preserve_endpoints = preserve_endpoints
        self.beta = beta
        self.tau = tau
        self.n_samples = n_samples
        self.random_state = random_state

    def _validate_params(self):
        PeelConfig(self.detector, check_iterations(self.iterations), bool(self.preserve_endpoints))
        NoiseParams(self.beta, self.tau, self.random_state)

    def _transform_one(self, p):
        cfg = PeelConfig(self.detector, check_iterations(self.iterations), bool(self.preserve_endpoints))
        params = NoiseParams(self.beta, self.tau, self.random_state)
        if self.n_samples == 1:
            return skeletonize(sample_relaxed(p, params).hard, cfg)
        return repeated_sample_skeleton(p, cfg, params, self.n_samples)


class MorphologicalSkeletonizer(_VolumeTransformer):
    """Erosion/opening soft skeleton; a baseline with no topology guarantee."""

    def __init__(self, iterations=10):
        self.iterations = iterations

    def _validate_params(self):
        check_iterations(self.iterations)

    def _transform_one(self, v):
        return morphological_skeleton_baseline(v, self.iterations)
