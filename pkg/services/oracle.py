"""Brute-force grid oracles, seeded generators and corpus manifests."""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from models.distribution import (
    INF,
    Distribution,
    ExpDistribution,
    StepDistribution,
    convolve,
    evaluate_array,
    kappa,
)
from models.errors import AxiomViolationError, GeneratorError, SchemaError, ToolkitError
from models.reports import CorpusEntryResult
from models.spaces import ClassicalMetricSpace, ProbMetricSpace
from models.tnorm import OrdinalSumTNorm
from services import approach, probmetric, transforms
from services.config_manager import ConfigManager, GeneratorConfig, OracleConfig

logger = logging.getLogger(__name__)

# PCG64 via numpy.random.default_rng; a seed reproduces the same corpus everywhere
GENERATOR_ALGORITHM = "numpy-default_rng-PCG64"
CONTRACT_SLACK = 1e-9

CORPUS_TNORMS: Dict[str, Any] = {
    "min": "min",
    "product": "product",
    "lukasiewicz": "lukasiewicz",
    "luk_0.2_0.8": {"intervals": [{"a": 0.2, "b": 0.8, "archetype": "lukasiewicz"}]},
    "prod_0.3_1": {"intervals": [{"a": 0.3, "b": 1.0, "archetype": "product"}]},
    "luk_0.3_1": {"intervals": [{"a": 0.3, "b": 1.0, "archetype": "lukasiewicz"}]},
}


@dataclass(frozen=True)
class GridSpec:
    """Grid points i * t_max / resolution for i = 0..resolution."""

    t_max: float
    resolution: int

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be finite and positive, got {self.t_max}")
        if int(self.resolution) != self.resolution or self.resolution < 1:
            raise ValueError(f"resolution must be a positive integer, got {self.resolution}")

    @property
    def pitch(self) -> float:
        return self.t_max / self.resolution

    def points(self) -> np.ndarray:
        return np.arange(self.resolution + 1) * self.t_max / self.resolution

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse "t_max,resolution"."""
        try:
            t_max, resolution = text.split(",")
            return cls(float(t_max), int(resolution))
        except ValueError as e:
            raise SchemaError(f"expected 't_max,resolution': {e}", "grid")


def _largest_jump(phis: Iterable[Distribution]) -> float:
    largest = 0.0
    for phi in phis:
        if isinstance(phi, StepDistribution) and phi.plateaus:
            largest = max(largest, phi.jumps[-1])
        elif isinstance(phi, ExpDistribution) and math.isfinite(phi.rate):
            largest = max(largest, phi.rate)
    return largest


def default_grid(phis: Iterable[Distribution], config: Optional[OracleConfig] = None) -> GridSpec:
    """t_max = factor * largest jump (1 when there is none)."""
    config = config or OracleConfig()
    largest = _largest_jump(phis)
    return GridSpec(config.t_max_factor * largest if largest > 0 else 1.0, config.resolution)


def grid_convolve_oracle(T: OrdinalSumTNorm, phi: Distribution, psi: Distribution, g: GridSpec) -> np.ndarray:
    """oracle[k] = max over i + j = k of T(phi(t_i), psi(t_j))."""
    ts = g.points()
    a = evaluate_array(phi, ts)
    b = evaluate_array(psi, ts)
    idx = np.arange(ts.size)
    # row i, column k holds the split (t_i, t_{k-i}); splits past t_k are masked to 0
    offsets = idx[None, :] - idx[:, None]
    valid = offsets >= 0
    values = T.eval_array(a[:, None], b[np.clip(offsets, 0, None)])
    return np.where(valid, values, 0.0).max(axis=0)


def convolution_contract_violations(
    T: OrdinalSumTNorm,
    phi: StepDistribution,
    psi: StepDistribution,
    g: GridSpec,
    conv: Optional[StepDistribution] = None,
) -> List[Dict[str, float]]:
    """
    Grid points where the exact convolution breaks the oracle contract.

    The exact result must dominate the oracle, and agree with it wherever no
    pairwise jump sum lies in [t - pitch, t]. Points within CONTRACT_SLACK of a
    jump sum are skipped since grid arithmetic cannot place them.
    """
    if conv is None:
        conv = convolve(T, phi, psi)
    ts = g.points()
    oracle = grid_convolve_oracle(T, phi, psi, g)
    exact = evaluate_array(conv, ts)
    sums = np.sort(np.add.outer(np.asarray(phi.jumps), np.asarray(psi.jumps)).ravel())
    violations = []
    for k, t in enumerate(ts.tolist()):
        lo = np.searchsorted(sums, t - g.pitch - CONTRACT_SLACK, side="left")
        hi = np.searchsorted(sums, t + CONTRACT_SLACK, side="right")
        near = np.any(np.abs(sums[lo:hi] - t) <= CONTRACT_SLACK) if hi > lo else False
        if near:
            continue
        if exact[k] < oracle[k]:
            violations.append({"t": t, "exact": float(exact[k]), "oracle": float(oracle[k]), "kind": "domination"})
        elif hi == lo and exact[k] != oracle[k]:
            violations.append({"t": t, "exact": float(exact[k]), "oracle": float(oracle[k]), "kind": "agreement"})
    return violations


def grid_delta_oracle(M: ProbMetricSpace, x: str, subset: Sequence[str], g: GridSpec) -> float:
    """Least grid r at which max over a of alpha(x, a) is 1 just after r, else inf."""
    members = list(subset)
    if not members:
        raise ValueError("grid_delta_oracle needs a nonempty subset")
    ts = g.points()
    after = np.nextafter(ts, np.inf)
    row = M.row(x)
    top = np.max(np.vstack([evaluate_array(row[a], after) for a in members]), axis=0)
    hits = np.flatnonzero(top == 1.0)
    return float(ts[hits[0]]) if hits.size else INF


def _generator(config: Optional[ConfigManager]) -> GeneratorConfig:
    return config.generator if config is not None else GeneratorConfig()


def random_step(rng: np.random.Generator, settings: GeneratorConfig) -> StepDistribution:
    """A few-plateau step distribution with jumps and values from the configured grids."""
    jump_grid = sorted(set(float(j) for j in settings.jump_grid if j >= 0))
    sub_one = sorted(set(float(v) for v in settings.value_grid if v < 1.0))
    count = int(rng.integers(1, min(settings.max_plateaus, len(jump_grid)) + 1))
    jumps = sorted(rng.choice(jump_grid, size=count, replace=False).tolist())
    ends_at_one = rng.random() < settings.one_probability or not sub_one
    n_values = count - 1 if ends_at_one else count
    n_values = min(n_values, len(sub_one))
    values = sorted(rng.choice(sub_one, size=n_values, replace=False).tolist()) if n_values else []
    if ends_at_one:
        values.append(1.0)
    jumps = jumps[len(jumps) - len(values):]
    return StepDistribution(tuple(zip(jumps, values)))


def random_space(
    T: OrdinalSumTNorm,
    n_points: int,
    seed: int,
    config: Optional[ConfigManager] = None,
) -> ProbMetricSpace:
    """
    A seeded random step space valid for T.

    Samples a symmetric few-jump matrix, closes it under the triangle axiom and
    resamples when the closure merges two points.

    Raises:
        GeneratorError: after max_attempts consecutive failures
    """
    if n_points < 2:
        raise ValueError(f"random_space needs at least 2 points, got {n_points}")
    settings = _generator(config)
    max_plateaus = config.limits.max_plateaus if config is not None else 1_000_000
    rng = np.random.default_rng(seed)
    carrier = tuple(f"p{i}" for i in range(n_points))
    last_error = None
    for attempt in range(1, settings.max_attempts + 1):
        raw = [[kappa() if i == j else None for j in range(n_points)] for i in range(n_points)]
        for i in range(n_points):
            for j in range(i + 1, n_points):
                raw[i][j] = raw[j][i] = random_step(rng, settings)
        try:
            space = probmetric.triangle_closure(carrier, raw, T, max_plateaus)
        except AxiomViolationError as e:
            last_error = str(e)
            logger.warning(f"Seed {seed}, attempt {attempt}: {e}; resampling")
            continue
        logger.debug(f"Seed {seed}: space over {T.name} after {attempt} attempt(s)")
        return space
    diagnostics = {"seed": seed, "tnorm": T.name, "n_points": n_points,
                   "attempts": settings.max_attempts, "last_error": last_error}
    logger.error(f"Generator gave up: {diagnostics}")
    raise GeneratorError(f"no valid space after {settings.max_attempts} attempts", diagnostics)


def random_metric(n_points: int, seed: int, config: Optional[ConfigManager] = None) -> ClassicalMetricSpace:
    """Shortest-path closure of random positive edge weights drawn from the jump grid."""
    if n_points < 1:
        raise ValueError(f"random_metric needs at least 1 point, got {n_points}")
    settings = _generator(config)
    weights = [float(j) for j in settings.jump_grid if j > 0]
    rng = np.random.default_rng(seed)
    d = np.zeros((n_points, n_points))
    for i in range(n_points):
        for j in range(i + 1, n_points):
            d[i, j] = d[j, i] = rng.choice(weights)
    for k in range(n_points):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    carrier = tuple(f"p{i}" for i in range(n_points))
    return ClassicalMetricSpace(carrier, tuple(tuple(float(v) for v in row) for row in d))


def random_nonexpansive_pair(
    T: OrdinalSumTNorm,
    n_x: int,
    n_y: int,
    seed: int,
    config: Optional[ConfigManager] = None,
) -> Tuple[ProbMetricSpace, ProbMetricSpace, Dict[str, str]]:
    """
    Random (M, N, f) with f: M -> N non-expansive.

    N is a random space and f a random map; M pulls N back along f, each entry
    convolved with a fresh random step so no pair collapses, then closed under
    the triangle axiom. Closure keeps alpha <= beta(f, f) because N already
    satisfies the triangle axiom.
    """
    settings = _generator(config)
    max_plateaus = config.limits.max_plateaus if config is not None else 1_000_000
    N = random_space(T, n_y, seed, config)
    rng = np.random.default_rng([seed, n_x])
    images = rng.integers(0, n_y, size=n_x).tolist()
    carrier = tuple(f"x{i}" for i in range(n_x))
    f = {carrier[i]: N.carrier[images[i]] for i in range(n_x)}
    raw = [[kappa() if i == j else None for j in range(n_x)] for i in range(n_x)]
    for i in range(n_x):
        for j in range(i + 1, n_x):
            beta = N.alpha[images[i]][images[j]]
            raw[i][j] = raw[j][i] = convolve(T, beta, random_step(rng, settings), max_plateaus)
    M = probmetric.triangle_closure(carrier, raw, T, max_plateaus)
    return M, N, f


def expansive_counterexample(T: Optional[OrdinalSumTNorm] = None) -> Tuple[ProbMetricSpace, ProbMetricSpace, Dict[str, str]]:
    """Two-point metric spaces and a map doubling the distance: neither non-expansive nor a contraction."""
    T = T or OrdinalSumTNorm.minimum()
    near = ClassicalMetricSpace(("a", "b"), ((0.0, 1.0), (1.0, 0.0)))
    far = ClassicalMetricSpace(("u", "v"), ((0.0, 2.0), (2.0, 0.0)))
    M = probmetric.from_classical_metric(near, T)
    N = probmetric.from_classical_metric(far, T)
    return M, N, {"a": "u", "b": "v"}


def load_manifest(path: str) -> List[Dict[str, Any]]:
    """
    Read a corpus manifest.

    Format: {"algorithm": ..., "entries": [{"seed": 1, "tnorm": <descriptor>, "n_points": 4}]}
    """
    source = str(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno}: {e.msg}", "", source)
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise SchemaError("expected an object with an 'entries' list", "entries", source)
    algorithm = data.get("algorithm", GENERATOR_ALGORITHM)
    if algorithm != GENERATOR_ALGORITHM:
        logger.warning(f"Manifest generated with {algorithm}; replaying with {GENERATOR_ALGORITHM}")
    entries = []
    for i, item in enumerate(data["entries"]):
        field = f"entries[{i}]"
        if not isinstance(item, dict):
            raise SchemaError("must be an object", field, source)
        for key in ("seed", "tnorm", "n_points"):
            if key not in item:
                raise SchemaError(f"missing key '{key}'", field, source)
        seed, n_points = item["seed"], item["n_points"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise SchemaError("must be a non-negative integer", f"{field}.seed", source)
        if not isinstance(n_points, int) or isinstance(n_points, bool) or n_points < 2:
            raise SchemaError("must be an integer >= 2", f"{field}.n_points", source)
        OrdinalSumTNorm.from_descriptor(item["tnorm"], source)
        entries.append({"seed": seed, "tnorm": item["tnorm"], "n_points": n_points})
    logger.info(f"Loaded {len(entries)} corpus entries from {path}")
    return entries


def write_manifest(path: str, entries: Sequence[Dict[str, Any]]) -> None:
    with open(path, 'w') as f:
        json.dump({"algorithm": GENERATOR_ALGORITHM, "entries": list(entries)}, f, indent=2)


def replay_entry(entry: Dict[str, Any], config: Optional[ConfigManager] = None) -> CorpusEntryResult:
    """Generate one corpus space and run the end-to-end checks on it."""
    T = OrdinalSumTNorm.from_descriptor(entry["tnorm"])
    result = CorpusEntryResult(seed=entry["seed"], tnorm=T.name, n_points=entry["n_points"])
    try:
        M = random_space(T, entry["n_points"], entry["seed"], config)
        result.checks["axioms"] = probmetric.check_axioms(M, config).passed
        A = approach.derive_delta(M, config)
        result.checks["approach_axioms"] = approach.check_axioms(A, config).passed
        result.checks["delta_via_lambda"] = all(
            approach.delta_via_lambda(M, x, A.labels_of(mask)) == A.delta[i][mask]
            for i, x in enumerate(M.carrier)
            for mask in range(1, A.full_mask + 1)
        )
        result.checks["remetrize_min"] = transforms.remetrize(M, "min", config).passed
        result.checks["remetrize_product"] = transforms.remetrize(M, "product", config).passed
    except ToolkitError as e:
        result.error = str(e)
        logger.warning(f"Corpus entry seed={entry['seed']} over {T.name} raised: {e}")
    logger.info(f"Replayed seed={result.seed} over {result.tnorm} ({result.n_points} points): passed={result.passed}")
    return result


def replay_manifest(entries: Sequence[Dict[str, Any]], config: Optional[ConfigManager] = None) -> List[CorpusEntryResult]:
    return [replay_entry(entry, config) for entry in entries]
