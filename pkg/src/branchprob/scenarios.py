"""Declarative experiments comparing the continuer measures.

Three kinds of scenario are supported:

``replicator``
    Rooms with an experience label each. Rooms whose labels are identical
    hold one observer between them, so they merge into a single continuer
    whose copy count is the number of rooms.
``quantum``
    Outcome amplitudes, given directly, as coherent sums of path amplitudes,
    or by decomposing a state over orthonormal continuer states (a residual
    becomes an extra ``dead`` continuer).
``codec``
    A base signal and a family of perturbed continuer signals. Each continuer's
    entropy is the length of its minimal DFT-codec stream, and its amplitude
    is the normalized overlap with the base signal.

Configs are JSON. Randomness comes from numpy's PCG64 generator, always seeded.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy import stats

from . import __version__, dft_codec, statevec
from .measures import ContinuerSet, MeasureResult, applicable_measures, measure, total_variation

GENERATOR = "numpy.random.PCG64"
DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 0
KINDS = ("replicator", "quantum", "codec")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    config: dict[str, Any]
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS

    def config_hash(self) -> str:
        canonical = json.dumps(self.config, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class BuiltScenario:
    scenario: Scenario
    continuers: ContinuerSet
    # quantum: the decomposition; codec: per-continuer entropies and overlaps
    decomposition: statevec.BranchDecomposition | None = None
    amplitudes: tuple[complex, ...] | None = None
    entropies: tuple[int, ...] | None = None
    base_entropy: int | None = None
    codec_params: tuple[dft_codec.CodecParams, ...] | None = None
    streams: tuple[dft_codec.CodeStream, ...] | None = None
    base_stream: dft_codec.CodeStream | None = None

    @property
    def delta_h(self) -> tuple[int, ...] | None:
        if self.entropies is None:
            return None
        return tuple(h - self.base_entropy for h in self.entropies)


def scenario_from_dict(config: dict[str, Any], name: str | None = None) -> Scenario:
    kind = config.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"scenario kind must be one of {KINDS}, got {kind!r}")
    return Scenario(
        name=str(config.get("name", name or kind)),
        kind=kind,
        config=config,
        seed=int(config.get("seed", DEFAULT_SEED)),
        trials=int(config.get("trials", DEFAULT_TRIALS)),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return scenario_from_dict(config, name=path.stem)


def _complex(value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ScenarioError(f"expected a number or an [re, im] pair, got {value!r}")


def _vector(values: Any) -> statevec.StateVector:
    return statevec.StateVector([_complex(v) for v in values])


# --- replicator ---------------------------------------------------------------


def merge_rooms(rooms: list[Any]) -> tuple[list[str], list[int]]:
    """Merge rooms with identical labels, keeping first-appearance order."""
    if not rooms:
        raise ScenarioError("a replicator scenario needs at least one room")
    counts: dict[str, int] = {}
    for room in rooms:
        if isinstance(room, str):
            label, count = room, 1
        else:
            label, count = str(room["label"]), int(room.get("count", 1))
        if count < 1:
            raise ScenarioError(f"room {label!r} has count {count}")
        counts[label] = counts.get(label, 0) + count
    return list(counts), list(counts.values())


def build_replicator(config: dict[str, Any] | Scenario) -> BuiltScenario:
    scenario = config if isinstance(config, Scenario) else scenario_from_dict({"kind": "replicator", **config})
    labels, counts = merge_rooms(list(scenario.config.get("rooms", [])))
    return BuiltScenario(scenario, ContinuerSet.from_counts(labels, counts))


# --- quantum ------------------------------------------------------------------


def build_quantum(config: dict[str, Any] | Scenario) -> BuiltScenario:
    scenario = config if isinstance(config, Scenario) else scenario_from_dict({"kind": "quantum", **config})
    cfg = scenario.config
    if "psi" in cfg:
        psi = _vector(cfg["psi"])
        continuers = [_vector(c) for c in cfg.get("continuers", [])]
        labels = list(cfg.get("labels", [f"m{i + 1}" for i in range(len(continuers))]))
        if len(labels) != len(continuers):
            raise ScenarioError(f"{len(labels)} labels for {len(continuers)} continuers")
        dec = statevec.decompose(psi, continuers)
        amps = list(dec.coefficients)
        if dec.dead_branch is not None:
            labels.append(cfg.get("dead_label", "dead"))
            amps.append(dec.dead_coefficient)
        return BuiltScenario(scenario, ContinuerSet.from_amplitudes(labels, amps), decomposition=dec)

    outcomes = cfg.get("outcomes")
    if not outcomes:
        raise ScenarioError("a quantum scenario needs 'psi' with 'continuers', or 'outcomes'")
    labels, amps = [], []
    for i, out in enumerate(outcomes):
        labels.append(str(out.get("label", f"m{i + 1}")))
        if "paths" in out:
            # coherent sum: amplitudes add before anything is squared
            amps.append(sum((_complex(p) for p in out["paths"]), 0j))
        elif "amplitude" in out:
            amps.append(_complex(out["amplitude"]))
        else:
            raise ScenarioError(f"outcome {labels[-1]!r} needs 'amplitude' or 'paths'")
    return BuiltScenario(scenario, ContinuerSet.from_amplitudes(labels, amps))


# --- codec --------------------------------------------------------------------


def make_signal(spec: dict[str, Any], dimension: int | None = None) -> np.ndarray:
    """Build a signal from ``components`` [[k, re, im], ...] and/or seeded ``noise``."""
    N = int(spec.get("dimension", dimension or 0))
    if N < 1:
        raise ScenarioError("signal spec needs a positive 'dimension'")
    x = np.arange(N)
    out = np.zeros(N, dtype=np.complex128)
    for comp in spec.get("components", []):
        k, re, im = comp
        out += complex(re, im) * np.exp(2j * np.pi * int(k) * x / N)
    if "noise" in spec:
        noise = spec["noise"]
        rng = np.random.default_rng(int(noise["seed"]))
        out += float(noise.get("scale", 1.0)) * (rng.standard_normal(N) + 1j * rng.standard_normal(N))
    return out


def continuer_signal(base: np.ndarray, spec: dict[str, Any]) -> np.ndarray:
    """``replace`` builds a fresh signal; otherwise ``add`` components or noise onto the base."""
    if spec.get("replace"):
        return make_signal(spec, base.size)
    if "components" in spec or "noise" in spec:
        return base + make_signal({**spec, "dimension": base.size})
    return base.copy()


def overlap_amplitude(m_i: np.ndarray, m: np.ndarray) -> complex:
    """<m_i|m> / (|m_i| |m|)."""
    denom = np.linalg.norm(m_i) * np.linalg.norm(m)
    if denom == 0:
        return 0j
    return complex(np.vdot(m_i, m) / denom)


def build_codec_scenario(config: dict[str, Any] | Scenario) -> BuiltScenario:
    scenario = config if isinstance(config, Scenario) else scenario_from_dict({"kind": "codec", **config})
    cfg = scenario.config
    eps = float(cfg.get("epsilon", dft_codec.DEFAULT_EPSILON))
    base = make_signal(cfg["signal"])
    specs = cfg.get("continuers", [])
    if not specs:
        raise ScenarioError("a codec scenario needs at least one continuer")

    signals = [continuer_signal(base, s) for s in specs]
    for i in range(len(signals)):
        for j in range(i):
            if np.array_equal(signals[i], signals[j]):
                raise ScenarioError(f"continuers {j} and {i} produce the same signal")

    base_stream = dft_codec.minimal_encoding(base, eps)
    streams = [dft_codec.minimal_encoding(s, eps) for s in signals]
    labels = [str(s.get("label", f"m{i + 1}")) for i, s in enumerate(specs)]
    entropies = tuple(st.bit_length for st in streams)
    return BuiltScenario(
        scenario,
        ContinuerSet.from_entropies(labels, entropies),
        amplitudes=tuple(overlap_amplitude(s, base) for s in signals),
        entropies=entropies,
        base_entropy=base_stream.bit_length,
        codec_params=tuple(dft_codec.stream_params(st) for st in streams),
        streams=tuple(streams),
        base_stream=base_stream,
    )


_BUILDERS = {"replicator": build_replicator, "quantum": build_quantum, "codec": build_codec_scenario}


def build(scenario: Scenario) -> BuiltScenario:
    return _BUILDERS[scenario.kind](scenario)


# --- sampling and comparison --------------------------------------------------


@dataclass(frozen=True)
class MonteCarloResult:
    counts: tuple[int, ...]
    frequencies: tuple[float, ...]
    trials: int
    seed: int
    generator: str = GENERATOR


def monte_carlo(result: MeasureResult, trials: int, seed: int) -> MonteCarloResult:
    """Draw ``trials`` i.i.d. outcomes from ``result``'s probabilities."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    p = np.asarray(result.probabilities, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.choice(p.size, size=trials, p=p / p.sum())
    counts = np.bincount(draws, minlength=p.size)
    return MonteCarloResult(
        tuple(int(c) for c in counts), tuple(float(c) / trials for c in counts), trials, seed
    )


@dataclass
class ComparisonReport:
    scenario: Scenario
    labels: tuple[str, ...]
    measures: dict[str, MeasureResult]
    distances: dict[str, float]
    monte_carlo: dict[str, MonteCarloResult]
    correlation: float | None = None
    born_gap: float | None = None
    delta_h: tuple[int, ...] | None = None
    amplitudes: tuple[complex, ...] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self, deterministic: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "scenario": self.scenario.name,
            "kind": self.scenario.kind,
            "labels": list(self.labels),
            "measures": {
                name: {
                    "probabilities": list(r.probabilities),
                    "log_weights": [_finite(v) for v in r.log_weights],
                }
                for name, r in self.measures.items()
            },
            "distances": self.distances,
            "monte_carlo": {
                name: {"counts": list(mc.counts), "frequencies": list(mc.frequencies), "trials": mc.trials}
                for name, mc in self.monte_carlo.items()
            },
        }
        if self.delta_h is not None:
            out["delta_h"] = list(self.delta_h)
        if self.amplitudes is not None:
            out["amplitudes"] = [[a.real, a.imag] for a in self.amplitudes]
            out["abs_amplitudes"] = [abs(a) for a in self.amplitudes]
        if self.correlation is not None or self.scenario.kind == "codec":
            out["spearman_abs_amplitude_vs_neg_delta_h"] = _finite(self.correlation)
            out["born_vs_algorithmic_tv"] = self.born_gap
        out.update(self.extra)
        prov = {
            "config_sha256": self.scenario.config_hash(),
            "seed": self.scenario.seed,
            "generator": GENERATOR,
            "version": __version__,
        }
        if not deterministic:
            prov["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        out["provenance"] = prov
        return out


def _finite(v: float | None) -> float | None:
    return None if v is None or not np.isfinite(v) else float(v)


def spearman(x, y) -> float:
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if x.size < 2 or np.all(x == x[0]) or np.all(y == y[0]):
        return float("nan")
    return float(stats.spearmanr(x, y).statistic)


def compare(scenario: Scenario | BuiltScenario) -> ComparisonReport:
    built = scenario if isinstance(scenario, BuiltScenario) else build(scenario)
    sc = built.scenario
    results = {name: measure(built.continuers, name) for name in applicable_measures(built.continuers)}

    correlation = born_gap = None
    extra: dict[str, Any] = {}
    if built.amplitudes is not None:
        amp_set = ContinuerSet.from_amplitudes(built.continuers.labels, built.amplitudes)
        results["born"] = measure(amp_set, "born")
        correlation = spearman(np.abs(built.amplitudes), -np.asarray(built.delta_h, dtype=float))
        born_gap = total_variation(results["born"].probabilities, results["algorithmic"].probabilities)
        extra["base_entropy"] = built.base_entropy
        extra["entropies"] = list(built.entropies)
        extra["codec_params"] = [[p.R, p.b] for p in built.codec_params]
    if built.decomposition is not None:
        extra["dead_coefficient"] = abs(built.decomposition.dead_coefficient)

    names = list(results)
    distances = {
        f"{a}|{b}": total_variation(results[a].probabilities, results[b].probabilities)
        for i, a in enumerate(names)
        for b in names[i + 1 :]
    }
    mc = {name: monte_carlo(r, sc.trials, sc.seed) for name, r in results.items()}
    return ComparisonReport(
        sc,
        built.continuers.labels,
        results,
        distances,
        mc,
        correlation=correlation,
        born_gap=born_gap,
        delta_h=built.delta_h,
        amplitudes=built.amplitudes,
        extra=extra,
    )


def with_seed(scenario: Scenario, seed: int) -> Scenario:
    return Scenario(scenario.name, scenario.kind, scenario.config, seed, scenario.trials)


def bundled_dir() -> Path:
    return Path(__file__).parent / "data" / "scenarios"


def bundled_scenarios() -> list[Scenario]:
    return [load_scenario(p) for p in sorted(bundled_dir().glob("*.json"))]
