"""Topological accuracy of the skeletonizers on a synthetic corpus."""

from __future__ import annotations

import csv
import time
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .exceptions import DomainError
from .io import read_volume, write_volume
from .peeler import PeelConfig, morphological_skeleton_baseline, skeletonize
from .shapes import make_shape
from .topology import betti_numbers

ALGORITHMS = ("boolean", "euler", "morphological_baseline")


@dataclass(frozen=True)
class BenchmarkRow:
    shape_id: str
    algorithm: str
    input_points: int
    points: int
    beta0_err: int
    beta1_err: int
    beta2_err: int
    elapsed_ms: float


CSV_HEADER = tuple(f.name for f in fields(BenchmarkRow))


def _run(algorithm: str, v: np.ndarray) -> np.ndarray:
    if algorithm == "morphological_baseline":
        return morphological_skeleton_baseline(v)
    return skeletonize(v, PeelConfig(detector=algorithm))


def score(shape_id: str, algorithm: str, v) -> BenchmarkRow:
    """Skeletonize ``v`` with ``algorithm`` and compare Betti numbers with the input."""
    if algorithm not in ALGORITHMS:
        raise DomainError(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
    v = np.asarray(v, dtype=np.uint8)
    t0 = time.perf_counter()
    skel = _run(algorithm, v)
    elapsed = (time.perf_counter() - t0) * 1000.0
    before, after = betti_numbers(v).betti, betti_numbers(skel).betti
    errs = [abs(a - b) for a, b in zip(before, after)]
    return BenchmarkRow(shape_id, algorithm, int(v.sum()), int(skel.sum()), *errs, round(elapsed, 3))


def load_corpus(corpus_dir) -> list[tuple[str, np.ndarray]]:
    """All ``*.json`` volumes of ``corpus_dir``, sorted by name."""
    paths = sorted(Path(corpus_dir).glob("*.json"))
    if not paths:
        raise DomainError(f"no volumes found in corpus {corpus_dir}")
    return [(p.stem, np.asarray(read_volume(p))) for p in paths]


def run_benchmark(corpus, algorithms=ALGORITHMS) -> list[BenchmarkRow]:
    """Score every (shape, algorithm) pair; ``corpus`` is a directory or ``(id, volume)`` pairs."""
    items = load_corpus(corpus) if isinstance(corpus, (str, Path)) else list(corpus)
    if not items:
        raise DomainError("empty corpus")
    return [score(shape_id, algo, v) for shape_id, v in items for algo in algorithms]


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(astuple(row))


def synthetic_corpus(blobs: int = 4, seed: int = 0, blob_size: int = 24) -> list[tuple[str, np.ndarray]]:
    """The four fixed shapes plus ``blobs`` random blobs with seeds derived from ``seed``."""
    items = [(kind, make_shape(kind)) for kind in ("line", "solid_box", "thick_torus", "hollow_shell")]
    blob_seeds = np.random.SeedSequence(seed).generate_state(blobs, dtype=np.uint32)
    for i, s in enumerate(blob_seeds):
        items.append((f"random_blob_{i:03d}", make_shape("random_blob", {"size": blob_size}, seed=int(s))))
    return items


def write_corpus(corpus_dir, blobs: int = 4, seed: int = 0, blob_size: int = 24) -> list[Path]:
    out = Path(corpus_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for shape_id, v in synthetic_corpus(blobs, seed, blob_size):
        path = out / f"{shape_id}.json"
        write_volume(v, path)
        paths.append(path)
    return paths
