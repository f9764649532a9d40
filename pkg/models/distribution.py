"""Exact algebra of distance distributions.

A distance distribution is a monotone map [0, inf] -> [0, 1] with value 0 at 0,
value 1 at infinity, left-continuous on (0, inf). Two representations are
supported:

* StepDistribution: finitely many plateaus. Plateau (jump_i, value_i) means the
  distribution equals value_i on (jump_i, jump_{i+1}]; it is 0 up to and
  including the first jump, and 1 at infinity.
* ExpDistribution: the family 1 - exp(-x / rate); rate 0 is kappa.
"""
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.errors import InvalidDistributionError, PlateauLimitError, SchemaError
from models.tnorm import BELOW_ONE, OrdinalSumTNorm

INF = math.inf
MAX_PLATEAUS = 1_000_000


def encode_ext(value: float) -> Any:
    """Serialize a value of [0, inf]; infinity becomes the string "inf"."""
    return "inf" if value == INF else float(value)


def decode_ext(value: Any) -> float:
    """Inverse of encode_ext."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INF
        raise ValueError(f"expected a number or 'inf', got '{value}'")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number or 'inf', got {value!r}")
    result = float(value)
    if math.isnan(result) or result < 0:
        raise ValueError(f"expected a value in [0, inf], got {value!r}")
    return result


@dataclass(frozen=True)
class StepDistribution:
    """Left-continuous monotone step distribution with finitely many plateaus."""

    plateaus: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        plateaus = tuple((float(j), float(v)) for j, v in self.plateaus)
        object.__setattr__(self, "plateaus", plateaus)
        previous_jump, previous_value = -1.0, 0.0
        for jump, value in plateaus:
            if not math.isfinite(jump) or jump < 0:
                raise InvalidDistributionError(f"Jump {jump} must be finite and non-negative")
            if jump <= previous_jump:
                raise InvalidDistributionError("Jumps must be strictly increasing")
            if not (previous_value < value <= 1.0):
                raise InvalidDistributionError(
                    f"Plateau values must be strictly increasing in (0, 1], got {value} after {previous_value}"
                )
            previous_jump, previous_value = jump, value

    @cached_property
    def jumps(self) -> List[float]:
        return [j for j, _ in self.plateaus]

    @cached_property
    def values(self) -> List[float]:
        return [v for _, v in self.plateaus]

    @property
    def last_value(self) -> float:
        return self.plateaus[-1][1] if self.plateaus else 0.0

    def evaluate(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t == INF:
            return 1.0
        idx = bisect_left(self.jumps, t)
        return self.values[idx - 1] if idx > 0 else 0.0

    def value_after(self, s: float) -> float:
        """The value on (s, s + eps) for small eps."""
        idx = bisect_right(self.jumps, s)
        return self.values[idx - 1] if idx > 0 else 0.0

    def to_dict(self) -> dict:
        return {"plateaus": [[j, v] for j, v in self.plateaus]}


@dataclass(frozen=True)
class ExpDistribution:
    """phi_t(x) = 1 - exp(-x / t) for finite x; rate 0 is kappa."""

    rate: float

    def __post_init__(self):
        rate = float(self.rate)
        if math.isnan(rate) or rate < 0:
            raise InvalidDistributionError(f"Rate must lie in [0, inf], got {self.rate}")
        object.__setattr__(self, "rate", rate)

    def evaluate(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t == INF:
            return 1.0
        if self.rate == 0.0:
            return 1.0
        if self.rate == INF:
            return 0.0
        # 1 is reached only at infinity, also in binary64
        return min(-math.expm1(-t / self.rate), BELOW_ONE)

    def to_dict(self) -> dict:
        return {"exp_rate": encode_ext(self.rate)}


Distribution = Union[StepDistribution, ExpDistribution]


def _canonical(pairs: Iterable[Tuple[float, float]]) -> StepDistribution:
    """Build a StepDistribution from (jump, value) pairs sorted by jump with
    non-decreasing values: drop zero values, merge equal values, keep the
    larger value on repeated jumps."""
    out: List[Tuple[float, float]] = []
    for jump, value in pairs:
        if value <= 0.0:
            continue
        if out and out[-1][0] == jump:
            if value > out[-1][1]:
                out[-1] = (jump, value)
            continue
        if out and value <= out[-1][1]:
            continue
        out.append((jump, value))
    return StepDistribution(tuple(out))


def kappa() -> StepDistribution:
    """The convolution unit: 0 at 0, 1 on (0, inf]."""
    return StepDistribution(((0.0, 1.0),))


def bottom() -> StepDistribution:
    """The least distribution: 0 on [0, inf), 1 at infinity."""
    return StepDistribution(())


def is_kappa(phi: Distribution) -> bool:
    if isinstance(phi, ExpDistribution):
        return phi.rate == 0.0
    return phi.plateaus == ((0.0, 1.0),)


def evaluate(phi: Distribution, t: float) -> float:
    return phi.evaluate(t)


def evaluate_array(phi: Distribution, ts) -> np.ndarray:
    """Vectorised evaluate() over an array of arguments."""
    ts = np.asarray(ts, dtype=float)
    if isinstance(phi, StepDistribution):
        table = np.concatenate(([0.0], np.asarray(phi.values, dtype=float)))
        idx = np.searchsorted(np.asarray(phi.jumps, dtype=float), ts, side="left")
        out = table[idx]
    elif phi.rate == 0.0:
        out = np.ones_like(ts)
    elif phi.rate == INF:
        out = np.zeros_like(ts)
    else:
        with np.errstate(invalid="ignore"):
            out = np.minimum(-np.expm1(-ts / phi.rate), BELOW_ONE)
    out = np.where(ts == INF, 1.0, out)
    return np.where(ts <= 0.0, 0.0, out)


def left_regularize(points: Sequence[Tuple[float, float]]) -> StepDistribution:
    """Left-regularize the step extension of a finite monotone map.

    Args:
        points: (threshold, value) pairs with non-decreasing thresholds and
            monotone values; the map takes value_i from threshold_i on.

    Returns:
        The distribution t -> sup_{s<t} of the step extension, 1 at infinity.
    """
    previous_threshold, previous_value = -INF, 0.0
    kept = []
    for threshold, value in points:
        threshold, value = float(threshold), float(value)
        if math.isnan(threshold) or threshold < 0:
            raise InvalidDistributionError(f"Threshold {threshold} must be non-negative")
        if not (0.0 <= value <= 1.0):
            raise InvalidDistributionError(f"Value {value} outside [0, 1]")
        if threshold < previous_threshold:
            raise InvalidDistributionError("Thresholds must be non-decreasing")
        if value < previous_value:
            raise InvalidDistributionError(f"Values must be monotone, got {value} after {previous_value}")
        previous_threshold, previous_value = threshold, value
        if threshold != INF:
            kept.append((threshold, value))
    return _canonical(kept)


def pointwise_sup(family: Sequence[Distribution]) -> Distribution:
    """Exact pointwise supremum of a nonempty family of one variant."""
    if not family:
        raise InvalidDistributionError("pointwise_sup needs a nonempty family")
    if all(isinstance(phi, ExpDistribution) for phi in family):
        return min(family, key=lambda phi: phi.rate)
    if not all(isinstance(phi, StepDistribution) for phi in family):
        raise InvalidDistributionError("pointwise_sup does not mix step and exponential distributions")
    if len(family) == 1:
        return family[0]
    jumps = sorted({j for phi in family for j in phi.jumps})
    return _canonical((j, max(phi.value_after(j) for phi in family)) for j in jumps)


def map_values(
    phi: StepDistribution,
    f: Callable[[float], float],
    lift_floor: bool = False,
) -> StepDistribution:
    """Apply a monotone value map with f(1) = 1 to the plateau values.

    Args:
        phi: a step distribution
        f: monotone non-decreasing map on [0, 1] with f(1) == 1 exactly
        lift_floor: also map the implicit value 0 on (0, first jump], so the
            result takes f(0) right after 0

    Raises:
        InvalidDistributionError: for exponential input, f(1) != 1, or a
            decreasing or out-of-range image.
    """
    if not isinstance(phi, StepDistribution):
        raise InvalidDistributionError("map_values supports step distributions only")
    if f(1.0) != 1.0:
        raise InvalidDistributionError("value maps must fix 1 exactly")
    pairs = []
    if lift_floor:
        pairs.append((0.0, f(0.0)))
    pairs.extend((j, f(v)) for j, v in phi.plateaus)
    previous = 0.0
    for _, value in pairs:
        if not (0.0 <= value <= 1.0):
            raise InvalidDistributionError(f"Value map produced {value} outside [0, 1]")
        if value < previous:
            raise InvalidDistributionError("Value map must be monotone non-decreasing")
        previous = value
    return _canonical(pairs)


def convolve(
    T: OrdinalSumTNorm,
    phi: StepDistribution,
    psi: StepDistribution,
    max_plateaus: int = MAX_PLATEAUS,
) -> StepDistribution:
    """Exact sup-convolution (phi (x)_T psi)(t) = sup_{r+s=t} T(phi(r), psi(s)).

    The plateau starting right after a pairwise jump sum s takes the maximum of
    T(value_i, value_j) over all pairs whose jump sum is <= s.
    """
    if not isinstance(phi, StepDistribution) or not isinstance(psi, StepDistribution):
        raise InvalidDistributionError("convolution supports step distributions only")
    size = len(phi.plateaus) * len(psi.plateaus)
    if size > max_plateaus:
        raise PlateauLimitError(f"Convolution would produce {size} plateaus (cap {max_plateaus})")
    candidates = sorted(
        ((j + k, T.eval(v, w)) for j, v in phi.plateaus for k, w in psi.plateaus),
        key=lambda pair: pair[0],
    )
    best = 0.0
    running = []
    for total, value in candidates:
        best = max(best, value)
        running.append((total, best))
    return _canonical(running)


def first_reach_one(phi: Distribution) -> float:
    """inf{r : phi(r) = 1}."""
    if isinstance(phi, ExpDistribution):
        return 0.0 if phi.rate == 0.0 else INF
    if phi.plateaus and phi.plateaus[-1][1] == 1.0:
        return phi.plateaus[-1][0]
    return INF


def threshold_inf(phi: Distribution, theta: float) -> float:
    """inf{r : phi(r) > theta} for theta < 1."""
    if theta >= 1.0:
        raise InvalidDistributionError("threshold_inf needs theta < 1; use first_reach_one")
    if isinstance(phi, ExpDistribution):
        if phi.rate == 0.0 or theta < 0.0:
            return 0.0
        if phi.rate == INF:
            return INF
        return -phi.rate * math.log1p(-theta)
    for jump, value in phi.plateaus:
        if value > theta:
            return jump
    return INF


def first_violation(phi: Distribution, psi: Distribution, tol: float = 0.0) -> Optional[float]:
    """Some t with phi(t) > psi(t) + tol, or None when phi <= psi pointwise.

    Raises:
        InvalidDistributionError: for a step/exponential pair neither of which
            is kappa or the bottom distribution.
    """
    if isinstance(phi, StepDistribution) and isinstance(psi, StepDistribution):
        jumps = sorted(set(phi.jumps) | set(psi.jumps))
        for i, jump in enumerate(jumps):
            if phi.value_after(jump) > psi.value_after(jump) + tol:
                upper = jumps[i + 1] if i + 1 < len(jumps) else jump + 1.0
                return (jump + upper) / 2.0
        return None
    if isinstance(phi, ExpDistribution) and isinstance(psi, ExpDistribution):
        # phi_r <= phi_s iff r >= s
        if phi.rate >= psi.rate:
            return None
        return phi.rate if phi.rate > 0 else 1.0
    if is_kappa(psi) or (isinstance(phi, StepDistribution) and not phi.plateaus):
        return None
    if is_kappa(phi):
        # psi is a non-kappa exponential: below 1 at every finite t
        t = psi.rate if psi.rate != INF else 1.0
        return t if 1.0 > psi.evaluate(t) + tol else None
    raise InvalidDistributionError("pointwise order between step and exponential distributions is not decided")


def leq(phi: Distribution, psi: Distribution, tol: float = 0.0) -> bool:
    """phi <= psi pointwise (values compared with slack tol)."""
    return first_violation(phi, psi, tol) is None


def distribution_from_dict(data: Any, field: str = "distribution", source: Optional[str] = None) -> Distribution:
    """Parse "kappa", {"plateaus": [[jump, value], ...]} or {"exp_rate": r}."""
    if isinstance(data, str):
        if data.strip().lower() == "kappa":
            return kappa()
        raise SchemaError(f"unknown distribution shorthand '{data}'", field, source)
    if not isinstance(data, dict):
        raise SchemaError("expected 'kappa' or an object", field, source)
    if "exp_rate" in data:
        try:
            return ExpDistribution(decode_ext(data["exp_rate"]))
        except (ValueError, InvalidDistributionError) as e:
            raise SchemaError(str(e), f"{field}.exp_rate", source)
    if "plateaus" in data:
        raw = data["plateaus"]
        if not isinstance(raw, list):
            raise SchemaError("must be a list of [jump, value] pairs", f"{field}.plateaus", source)
        pairs = []
        for i, item in enumerate(raw):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise SchemaError("must be a [jump, value] pair", f"{field}.plateaus[{i}]", source)
            try:
                pairs.append((float(item[0]), float(item[1])))
            except (TypeError, ValueError) as e:
                raise SchemaError(str(e), f"{field}.plateaus[{i}]", source)
        try:
            return StepDistribution(tuple(pairs))
        except InvalidDistributionError as e:
            raise SchemaError(str(e), f"{field}.plateaus", source)
    raise SchemaError("expected 'plateaus' or 'exp_rate'", field, source)
