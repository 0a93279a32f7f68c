"""Stochastic discretization and the differentiable skeletonization path.

A probability volume is turned into a binary one by a relaxed Bernoulli
sample followed by straight-through rounding::

    a = clamp(p, eps, 1 - eps)
    X = sigmoid((log a - log(1 - a) + beta * L) / tau)
    hard = round(X)            # x >= 0.5 -> 1

with ``L = log U - log(1 - U)`` drawn once per voxel and per forward pass.
Everything is recorded on a :class:`~diffskel.tape.GradientTape`, so the
peeling that follows can be differentiated back to ``p``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, DomainError
from .ops import log, relu, sigmoid, ste_round
from .peeler import PeelConfig, peel_step, skeletonize
from .tape import GradientTape, Var
from .volume import SUBFIELDS, as_volume

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseParams:
    beta: float = 0.33
    tau: float = 1.0
    seed: int = 0
    clamp_eps: float = 1e-6

    def __post_init__(self):
        if not self.beta >= 0:
            raise DomainError(f"beta must be non-negative, got {self.beta}")
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        if not 0 < self.clamp_eps < 0.5:
            raise DomainError(f"clamp_eps must lie in (0, 0.5), got {self.clamp_eps}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a non-negative 64-bit integer")


@dataclass(frozen=True)
class StochasticSample:
    relaxed: np.ndarray
    hard: np.ndarray
    noise: np.ndarray


def _probabilities(p) -> np.ndarray:
    arr = as_volume(p).astype(np.float64)
    if arr.size and not (np.isfinite(arr).all() and arr.min() >= 0 and arr.max() <= 1):
        raise DomainError("probabilities must lie in [0, 1]")
    return arr


def logistic_noise(shape, seed) -> np.ndarray:
    """``log U - log(1 - U)`` with ``U`` uniform on the open unit interval."""
    rng = np.random.default_rng(seed)
    u = rng.random(shape)
    u = np.clip(u, np.finfo(np.float64).tiny, 1.0 - np.finfo(np.float64).epsneg)
    return np.log(u) - np.log1p(-u)


def relaxed_graph(p, noise, params: NoiseParams):
    """The relaxed sample as a function of ``p`` (array or tape ``Var``) and fixed noise."""
    eps = params.clamp_eps
    # clamp to [eps, 1 - eps] with two gates so the tape sees only its own ops
    a = relu(p - eps) - relu(p - (1.0 - eps)) + eps
    logits = log(a) - log(1 - a)
    if params.beta:
        logits = logits + params.beta * noise
    if params.tau != 1.0:
        logits = logits * (1.0 / params.tau)
    return sigmoid(logits)


def sample_relaxed(p, params: NoiseParams = NoiseParams()) -> StochasticSample:
    """Draw one relaxed Bernoulli sample of ``p`` and its rounded version."""
    probs = _probabilities(p)
    noise = logistic_noise(probs.shape, params.seed)
    relaxed = relaxed_graph(probs, noise, params)
    return StochasticSample(relaxed, ste_round(relaxed).astype(np.uint8), noise)


def _fixed_budget(cfg: PeelConfig) -> int:
    if cfg.until_stable:
        raise ContractError("the differentiable path needs a fixed iteration count, not 'auto'")
    return int(cfg.iterations)


def peel_graph(x, cfg: PeelConfig):
    """``cfg.iterations`` outer peeling iterations written as tape-compatible ops."""
    for _ in range(_fixed_budget(cfg)):
        for sf in SUBFIELDS:
            x = peel_step(x, sf, cfg)
    return x


def skeletonize_diff(p, cfg: PeelConfig, params: NoiseParams = NoiseParams(), tape: GradientTape | None = None):
    """Sample, round and peel ``p`` on a gradient tape.

    Returns ``(skeleton, tape)``; ``skeleton`` is a :class:`~diffskel.tape.Var`
    whose value is binary and equals :func:`~diffskel.peeler.skeletonize`
    applied to the hard sample with the same budget.
    """
    _fixed_budget(cfg)
    probs = _probabilities(p)
    tape = GradientTape() if tape is None else tape
    x = tape.input(probs)
    noise = logistic_noise(probs.shape, params.seed)
    hard = ste_round(relaxed_graph(x, noise, params))
    return peel_graph(hard, cfg), tape


def soft_dice_loss(y: np.ndarray, target: np.ndarray, smooth: float = 1.0):
    """``1 - dice`` and its gradient with respect to ``y``."""
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    inter = float((y * t).sum())
    denom = float(y.sum() + t.sum()) + smooth
    dice = (2.0 * inter + smooth) / denom
    grad = -(2.0 * t * denom - (2.0 * inter + smooth)) / denom**2
    return 1.0 - dice, grad


@dataclass
class LearnResult:
    losses: list
    volume: np.ndarray
    output: np.ndarray


def learn_skeleton_demo(
    target,
    params: NoiseParams = NoiseParams(),
    steps: int = 100,
    lr: float = 1.0,
    iterations: int = 1,
    detector: str = "boolean",
    init=None,
) -> LearnResult:
    """Fit an input volume whose skeleton matches ``target``.

    The input starts from uniform random probabilities (seeded by
    ``params.seed``) unless ``init`` is given, and is updated by gradient
    descent on the soft-Dice loss, clipped to [0, 1]. Every step draws new
    noise. ``losses`` has ``steps + 1`` entries; the last one scores the
    final volume.
    """
    if steps < 0:
        raise DomainError("steps must be non-negative")
    t = as_volume(target).astype(np.float64)
    rng = np.random.default_rng(params.seed)
    p = rng.random(t.shape) if init is None else _probabilities(init).copy()
    cfg = PeelConfig(detector=detector, iterations=iterations)
    # independent per-step noise streams derived from the one seed
    step_seeds = np.random.SeedSequence(params.seed).generate_state(steps + 1, dtype=np.uint64)
    losses = []
    out = None
    for step in range(steps + 1):
        step_params = NoiseParams(params.beta, params.tau, int(step_seeds[step]), params.clamp_eps)
        skel, tape = skeletonize_diff(p, cfg, step_params)
        out = skel.value
        loss, grad = soft_dice_loss(out, t)
        losses.append(loss)
        if step == steps:
            break
        (g,) = tape.backward({skel: grad})
        p = np.clip(p - lr * g, 0.0, 1.0)
        logger.debug("step %d loss %.6f", step, loss)
    return LearnResult(losses, p, np.asarray(out, dtype=np.uint8))


def repeated_sample_skeleton(p, cfg: PeelConfig, params: NoiseParams, n: int = 64) -> np.ndarray:
    """Threshold at 0.5 the mean of ``n`` binary skeletons of independent hard samples."""
    if n < 1:
        raise DomainError("n must be at least 1")
    probs = _probabilities(p)
    seeds = np.random.SeedSequence(params.seed).generate_state(n, dtype=np.uint64)
    total = np.zeros(probs.shape, dtype=np.int64)
    for s in seeds:
        sample = sample_relaxed(probs, NoiseParams(params.beta, params.tau, int(s), params.clamp_eps))
        total += skeletonize(sample.hard, cfg)
    return (2 * total >= n).astype(np.uint8)
