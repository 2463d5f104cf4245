"""Four candidate probability measures over a set of continuers.

Each measure assigns every continuer an unnormalized weight that depends on
that continuer's own evidence only, and normalizes. Weights are carried as
base-2 logarithms so that Solomonoff weights of thousands of bits never
underflow; normalization subtracts the largest log-weight first, which is
exact because the measures are invariant under a common shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

EVIDENCE_KINDS = ("none", "count", "amplitude", "entropy_bits")


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class ContinuerSet:
    labels: tuple[str, ...]
    kind: str = "none"
    evidence: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))
        object.__setattr__(self, "evidence", tuple(self.evidence))
        if not self.labels:
            raise MeasureError("a continuer set needs at least one continuer")
        if self.kind not in EVIDENCE_KINDS:
            raise MeasureError(f"unknown evidence kind {self.kind!r}")
        if self.kind != "none" and len(self.evidence) != len(self.labels):
            raise MeasureError(f"{len(self.labels)} labels but {len(self.evidence)} evidence values")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def bare(cls, labels: Sequence[str]) -> ContinuerSet:
        return cls(tuple(labels))

    @classmethod
    def from_counts(cls, labels: Sequence[str], counts: Sequence[int]) -> ContinuerSet:
        return cls(tuple(labels), "count", tuple(counts))

    @classmethod
    def from_amplitudes(cls, labels: Sequence[str], amplitudes: Sequence[complex]) -> ContinuerSet:
        return cls(tuple(labels), "amplitude", tuple(complex(a) for a in amplitudes))

    @classmethod
    def from_entropies(cls, labels: Sequence[str], bits: Sequence[float]) -> ContinuerSet:
        return cls(tuple(labels), "entropy_bits", tuple(float(h) for h in bits))


@dataclass(frozen=True)
class MeasureResult:
    measure_name: str
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]
    log_weights: tuple[float, ...]
    exact: tuple[Fraction, ...] | None = None

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probabilities))

    def __getitem__(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]


def normalize_log_weights(log_weights: Sequence[float]) -> np.ndarray:
    lw = np.asarray(log_weights, dtype=np.float64)
    top = np.max(lw)
    if not np.isfinite(top):
        raise MeasureError("no continuer has positive weight")
    w = np.exp2(lw - top)
    return w / w.sum()


def _result(name: str, cs: ContinuerSet, log_weights, exact=None) -> MeasureResult:
    if exact is not None:
        probs = tuple(float(f) for f in exact)
    else:
        probs = tuple(float(p) for p in normalize_log_weights(log_weights))
    return MeasureResult(name, cs.labels, probs, tuple(float(v) for v in log_weights), exact)


def flat_measure(cs: ContinuerSet) -> MeasureResult:
    """One over n for every continuer, whatever the evidence."""
    exact = tuple(Fraction(1, cs.n) for _ in range(cs.n))
    return _result("flat", cs, [0.0] * cs.n, exact)


def copy_count_measure(cs: ContinuerSet) -> MeasureResult:
    if cs.kind != "count":
        raise MeasureError(f"copy counting needs counts, got {cs.kind!r} evidence")
    for label, c in zip(cs.labels, cs.evidence):
        if int(c) != c or c <= 0:
            raise MeasureError(f"copy count for {label!r} must be a positive integer, got {c}")
    total = sum(int(c) for c in cs.evidence)
    exact = tuple(Fraction(int(c), total) for c in cs.evidence)
    return _result("copy_count", cs, [np.log2(int(c)) for c in cs.evidence], exact)


def born_measure(cs: ContinuerSet) -> MeasureResult:
    if cs.kind != "amplitude":
        raise MeasureError(f"the Born measure needs amplitudes, got {cs.kind!r} evidence")
    sq = np.abs(np.asarray(cs.evidence, dtype=np.complex128)) ** 2
    if not np.any(sq > 0):
        raise MeasureError("all amplitudes are zero: no continuer has support")
    with np.errstate(divide="ignore"):
        lw = np.log2(sq)
    probs = tuple(float(p) for p in sq / sq.sum())
    return MeasureResult("born", cs.labels, probs, tuple(float(v) for v in lw))


def algorithmic_measure(cs: ContinuerSet) -> MeasureResult:
    """Weight 2**-H per continuer; absolute H or deltas give the same result."""
    if cs.kind != "entropy_bits":
        raise MeasureError(f"the algorithmic measure needs entropies, got {cs.kind!r} evidence")
    h = np.asarray(cs.evidence, dtype=np.float64)
    if np.any(np.isnan(h)):
        raise MeasureError("entropy is NaN")
    lw = -h
    # equal entropies must give exactly 1/n
    if np.all(h == h[0]):
        return _result("algorithmic", cs, lw, tuple(Fraction(1, cs.n) for _ in range(cs.n)))
    return _result("algorithmic", cs, lw)


MEASURES = {
    "flat": flat_measure,
    "copy_count": copy_count_measure,
    "born": born_measure,
    "algorithmic": algorithmic_measure,
}

_BY_KIND = {
    "none": ("flat",),
    "count": ("flat", "copy_count"),
    "amplitude": ("flat", "born"),
    "entropy_bits": ("flat", "algorithmic"),
}


def applicable_measures(cs: ContinuerSet) -> tuple[str, ...]:
    return _BY_KIND[cs.kind]


def measure(cs: ContinuerSet, name: str) -> MeasureResult:
    try:
        fn = MEASURES[name]
    except KeyError:
        raise MeasureError(f"unknown measure {name!r}; choose from {sorted(MEASURES)}") from None
    return fn(cs)


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise MeasureError(f"cannot compare distributions of length {p.size} and {q.size}")
    return float(min(1.0, 0.5 * np.abs(p - q).sum()))
