"""Data classes for finite metric, probabilistic metric and approach spaces."""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from models.distribution import (
    Distribution,
    StepDistribution,
    decode_ext,
    distribution_from_dict,
    encode_ext,
    is_kappa,
    kappa,
)
from models.errors import SchemaError
from models.tnorm import OrdinalSumTNorm

RESERVED_LABEL_CHARS = "|,{}"


def check_carrier(carrier: Iterable[Any], source: Optional[str] = None) -> Tuple[str, ...]:
    """Validate a carrier: nonempty, unique string labels without reserved characters."""
    labels = tuple(carrier)
    if not labels:
        raise SchemaError("carrier must contain at least one point", "carrier", source)
    for i, label in enumerate(labels):
        if not isinstance(label, str) or not label.strip():
            raise SchemaError("labels must be nonempty strings", f"carrier[{i}]", source)
        if any(ch in label for ch in RESERVED_LABEL_CHARS):
            raise SchemaError(f"label '{label}' uses one of {RESERVED_LABEL_CHARS!r}", f"carrier[{i}]", source)
    if len(set(labels)) != len(labels):
        raise SchemaError("labels must be unique", "carrier", source)
    return labels


def pair_key(x: str, y: str) -> str:
    return f"{x}|{y}"


def split_pair_key(key: str, carrier: Sequence[str], field_name: str, source: Optional[str] = None) -> Tuple[str, str]:
    parts = key.split("|")
    if len(parts) != 2:
        raise SchemaError(f"key '{key}' is not of the form 'x|y'", field_name, source)
    x, y = (part.strip() for part in parts)
    for label in (x, y):
        if label not in carrier:
            raise SchemaError(f"unknown point '{label}'", f"{field_name}.{key}", source)
    return x, y


def subset_key(x: str, labels: Iterable[str]) -> str:
    """Key of a delta table cell, e.g. "x|{a,b}"."""
    return f"{x}|{{{','.join(labels)}}}"


@dataclass(frozen=True)
class ClassicalMetricSpace:
    """A finite (generalized) metric: distances in [0, inf]."""

    carrier: Tuple[str, ...]
    d: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        carrier = check_carrier(self.carrier)
        d = tuple(tuple(float(v) for v in row) for row in self.d)
        if len(d) != len(carrier) or any(len(row) != len(carrier) for row in d):
            raise SchemaError(f"distance matrix must be {len(carrier)}x{len(carrier)}", "d")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "d", d)

    @property
    def size(self) -> int:
        return len(self.carrier)

    def index(self, label: str) -> int:
        return self.carrier.index(label)

    def distance(self, x: str, y: str) -> float:
        return self.d[self.index(x)][self.index(y)]

    def validate(self, allow_pseudo: bool = False) -> List[str]:
        """
        Check the metric axioms.

        Args:
            allow_pseudo: accept d(x,y) = 0 for distinct points

        Returns:
            Human-readable list of violations, empty when valid
        """
        errors = []
        n = self.size
        labels = self.carrier
        for i in range(n):
            for j in range(n):
                v = self.d[i][j]
                if math.isnan(v) or v < 0:
                    errors.append(f"d({labels[i]},{labels[j]}) = {v} is not in [0, inf]")
                elif i == j and v != 0.0:
                    errors.append(f"d({labels[i]},{labels[i]}) = {v}, expected 0")
                elif i != j and v == 0.0 and not allow_pseudo:
                    errors.append(f"d({labels[i]},{labels[j]}) = 0 for distinct points")
                if v != self.d[j][i]:
                    if i < j:
                        errors.append(f"d({labels[i]},{labels[j]}) != d({labels[j]},{labels[i]})")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.d[i][k] > self.d[i][j] + self.d[j][k]:
                        errors.append(
                            f"triangle fails: d({labels[i]},{labels[k]}) > "
                            f"d({labels[i]},{labels[j]}) + d({labels[j]},{labels[k]})"
                        )
        return errors

    def is_valid(self, allow_pseudo: bool = False) -> bool:
        return not self.validate(allow_pseudo)

    def to_dict(self) -> dict:
        distances = {}
        for i, x in enumerate(self.carrier):
            for j in range(i + 1, self.size):
                distances[pair_key(x, self.carrier[j])] = encode_ext(self.d[i][j])
        return {"carrier": list(self.carrier), "distances": distances}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[str] = None) -> "ClassicalMetricSpace":
        """Parse {"carrier": [...], "distances": {"x|y": d}}; diagonal is 0, symmetry completed."""
        if not isinstance(data, dict):
            raise SchemaError("expected an object", "", source)
        carrier = check_carrier(data.get("carrier") or [], source)
        raw = data.get("distances")
        if not isinstance(raw, dict):
            raise SchemaError("must map 'x|y' keys to distances", "distances", source)
        n = len(carrier)
        d: List[List[Optional[float]]] = [[0.0 if i == j else None for j in range(n)] for i in range(n)]
        seen: Dict[frozenset, float] = {}
        for key, value in raw.items():
            x, y = split_pair_key(key, carrier, "distances", source)
            try:
                v = decode_ext(value)
            except ValueError as e:
                raise SchemaError(str(e), f"distances.{key}", source)
            pair = frozenset((x, y))
            if pair in seen and seen[pair] != v:
                raise SchemaError("contradicts the symmetric entry", f"distances.{key}", source)
            seen[pair] = v
            i, j = carrier.index(x), carrier.index(y)
            d[i][j] = d[j][i] = v
        for i in range(n):
            for j in range(n):
                if d[i][j] is None:
                    raise SchemaError(f"missing distance for '{pair_key(carrier[i], carrier[j])}'", "distances", source)
        return cls(carrier, tuple(tuple(row) for row in d))


@dataclass(frozen=True)
class ProbMetricSpace:
    """A finite carrier, a t-norm and a matrix of distance distributions.

    Construction checks shape only; the axioms are verified by
    services.probmetric.check_axioms.
    """

    carrier: Tuple[str, ...]
    tnorm: OrdinalSumTNorm
    alpha: Tuple[Tuple[Distribution, ...], ...]

    def __post_init__(self):
        carrier = check_carrier(self.carrier)
        alpha = tuple(tuple(row) for row in self.alpha)
        if len(alpha) != len(carrier) or any(len(row) != len(carrier) for row in alpha):
            raise SchemaError(f"alpha must be {len(carrier)}x{len(carrier)}", "entries")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "alpha", alpha)

    @property
    def size(self) -> int:
        return len(self.carrier)

    @property
    def is_step(self) -> bool:
        """True when every entry is a step distribution."""
        return all(isinstance(phi, StepDistribution) for row in self.alpha for phi in row)

    def index(self, label: str) -> int:
        try:
            return self.carrier.index(label)
        except ValueError:
            raise KeyError(f"unknown point '{label}'")

    def entry(self, x: str, y: str) -> Distribution:
        return self.alpha[self.index(x)][self.index(y)]

    def row(self, x: str) -> Dict[str, Distribution]:
        i = self.index(x)
        return dict(zip(self.carrier, self.alpha[i]))

    def retag(self, tnorm: OrdinalSumTNorm) -> "ProbMetricSpace":
        """Same matrix, another t-norm."""
        return ProbMetricSpace(self.carrier, tnorm, self.alpha)

    def to_dict(self) -> dict:
        entries = {}
        for i, x in enumerate(self.carrier):
            if not is_kappa(self.alpha[i][i]):
                entries[pair_key(x, x)] = self.alpha[i][i].to_dict()
            for j in range(i + 1, self.size):
                entries[pair_key(x, self.carrier[j])] = self.alpha[i][j].to_dict()
        return {"carrier": list(self.carrier), "tnorm": self.tnorm.to_dict(), "entries": entries}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[str] = None) -> "ProbMetricSpace":
        """
        Parse a space document.

        Args:
            data: {"carrier": [...], "tnorm": <name or intervals>, "entries": {"x|y": <distribution>}}
            source: file name used in diagnostics

        Returns:
            The space; the diagonal defaults to kappa and symmetric entries are completed
        """
        if not isinstance(data, dict):
            raise SchemaError("expected an object", "", source)
        carrier = check_carrier(data.get("carrier") or [], source)
        if "tnorm" not in data:
            raise SchemaError("missing t-norm descriptor", "tnorm", source)
        tnorm = OrdinalSumTNorm.from_descriptor(data["tnorm"], source)
        raw = data.get("entries")
        if not isinstance(raw, dict):
            raise SchemaError("must map 'x|y' keys to distributions", "entries", source)
        n = len(carrier)
        alpha: List[List[Optional[Distribution]]] = [[None] * n for _ in range(n)]
        for key, value in raw.items():
            x, y = split_pair_key(key, carrier, "entries", source)
            phi = distribution_from_dict(value, f"entries.{key}", source)
            i, j = carrier.index(x), carrier.index(y)
            if alpha[j][i] is not None and alpha[j][i] != phi:
                raise SchemaError("contradicts the symmetric entry", f"entries.{key}", source)
            alpha[i][j] = phi
            alpha[j][i] = phi
        for i in range(n):
            if alpha[i][i] is None:
                alpha[i][i] = kappa()
            for j in range(n):
                if alpha[i][j] is None:
                    raise SchemaError(f"missing entry for '{pair_key(carrier[i], carrier[j])}'", "entries", source)
        return cls(carrier, tnorm, tuple(tuple(row) for row in alpha))


@dataclass(frozen=True)
class FiniteApproachSpace:
    """A finite carrier with the full table delta(x, S) over all subsets.

    Subsets are bitmasks over the carrier order: bit i set means carrier[i] is a member.
    """

    carrier: Tuple[str, ...]
    delta: Tuple[Tuple[float, ...], ...]        # delta[i][mask]

    def __post_init__(self):
        carrier = check_carrier(self.carrier)
        delta = tuple(tuple(float(v) for v in row) for row in self.delta)
        width = 1 << len(carrier)
        if len(delta) != len(carrier) or any(len(row) != width for row in delta):
            raise SchemaError(f"delta must have {len(carrier)} rows of {width} subsets", "delta")
        for row in delta:
            for v in row:
                if math.isnan(v) or v < 0:
                    raise SchemaError(f"delta value {v} is not in [0, inf]", "delta")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "delta", delta)

    @property
    def size(self) -> int:
        return len(self.carrier)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        try:
            return self.carrier.index(label)
        except ValueError:
            raise KeyError(f"unknown point '{label}'")

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return mask

    def labels_of(self, mask: int) -> Tuple[str, ...]:
        return tuple(label for i, label in enumerate(self.carrier) if mask >> i & 1)

    def distance(self, x: str, subset: Iterable[str]) -> float:
        """delta(x, S) for a set of labels."""
        return self.delta[self.index(x)][self.mask_of(subset)]

    def to_dict(self) -> dict:
        table = {}
        for i, x in enumerate(self.carrier):
            for mask in range(self.full_mask + 1):
                table[subset_key(x, self.labels_of(mask))] = encode_ext(self.delta[i][mask])
        return {"carrier": list(self.carrier), "delta": table}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[str] = None) -> "FiniteApproachSpace":
        """Parse {"carrier": [...], "delta": {"x|{a,b}": value}} covering every point and subset."""
        if not isinstance(data, dict):
            raise SchemaError("expected an object", "", source)
        carrier = check_carrier(data.get("carrier") or [], source)
        raw = data.get("delta")
        if not isinstance(raw, dict):
            raise SchemaError("must map 'x|{a,b}' keys to values", "delta", source)
        n = len(carrier)
        rows: List[List[Optional[float]]] = [[None] * (1 << n) for _ in range(n)]
        for key, value in raw.items():
            point, _, members = key.partition("|")
            point, members = point.strip(), members.strip()
            if point not in carrier:
                raise SchemaError(f"unknown point '{point}'", f"delta.{key}", source)
            if not (members.startswith("{") and members.endswith("}")):
                raise SchemaError("subset must be written as {a,b,...}", f"delta.{key}", source)
            mask = 0
            for label in filter(None, (m.strip() for m in members[1:-1].split(","))):
                if label not in carrier:
                    raise SchemaError(f"unknown point '{label}'", f"delta.{key}", source)
                mask |= 1 << carrier.index(label)
            try:
                rows[carrier.index(point)][mask] = decode_ext(value)
            except ValueError as e:
                raise SchemaError(str(e), f"delta.{key}", source)
        for i, row in enumerate(rows):
            for mask, v in enumerate(row):
                if v is None:
                    members = [carrier[k] for k in range(n) if mask >> k & 1]
                    raise SchemaError(f"missing value for '{subset_key(carrier[i], members)}'", "delta", source)
        return cls(carrier, tuple(tuple(row) for row in rows))


@dataclass(frozen=True)
class LambdaTable:
    """lambda_{x,n}(y): the least radius at which alpha(x,y) exceeds 1 - 1/n."""

    x: str
    n: int
    values: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def threshold(self) -> float:
        return 1.0 - 1.0 / self.n

    def to_dict(self) -> dict:
        return {"x": self.x, "n": self.n, "values": {y: encode_ext(v) for y, v in self.values.items()}}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LambdaTable":
        return cls(
            x=data["x"],
            n=int(data["n"]),
            values={y: decode_ext(v) for y, v in data.get("values", {}).items()},
        )
