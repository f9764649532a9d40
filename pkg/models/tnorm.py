"""Continuous t-norms on [0,1] represented as finite ordinal sums."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from models.errors import InvalidTNormError, SchemaError

BELOW_ONE = math.nextafter(1.0, 0.0)


class Archetype(Enum):
    """The three basic continuous t-norms."""
    MINIMUM = "minimum"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"

    @classmethod
    def parse(cls, name: str) -> "Archetype":
        """Parse an archetype tag, accepting the usual short names."""
        key = str(name).strip().lower()
        aliases = {
            "min": cls.MINIMUM,
            "minimum": cls.MINIMUM,
            "product": cls.PRODUCT,
            "prod": cls.PRODUCT,
            "lukasiewicz": cls.LUKASIEWICZ,
            "łukasiewicz": cls.LUKASIEWICZ,
            "luk": cls.LUKASIEWICZ,
        }
        if key not in aliases:
            raise ValueError(f"Unknown archetype: {name}")
        return aliases[key]


@dataclass(frozen=True)
class OrdinalInterval:
    """One summand (a, b) of an ordinal sum, carrying a rescaled archetype."""

    a: float
    b: float
    archetype: Archetype

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.archetype is Archetype.MINIMUM:
            raise InvalidTNormError("Minimum cannot tag an ordinal-sum interval")
        if not (0.0 <= self.a < self.b <= 1.0):
            raise InvalidTNormError(f"Interval ({self.a}, {self.b}) must satisfy 0 <= a < b <= 1")

    @property
    def width(self) -> float:
        return self.b - self.a

    def contains_open(self, q: float) -> bool:
        return self.a < q < self.b

    def contains_closed(self, q: float) -> bool:
        return self.a <= q <= self.b

    def eval(self, p: float, q: float) -> float:
        """Evaluate the archetype transported onto [a, b]; p and q lie in [a, b]."""
        a, b = self.a, self.b
        # endpoints are idempotent: the result is the minimum, bit for bit
        if p == b:
            return q
        if q == b:
            return p
        if p == a or q == a:
            return a
        if self.archetype is Archetype.PRODUCT:
            w = b - a
            r = a + w * (((p - a) / w) * ((q - a) / w))
        else:
            r = max(a, p + q - b)
        return min(max(r, a), p, q)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "archetype": self.archetype.value}


@dataclass(frozen=True)
class IntervalIsomorphism:
    """Affine order-isomorphism between ([a,1], *) and the archetype on [0,1]."""

    interval: OrdinalInterval

    def forward(self, x: float) -> float:
        """Map [a, 1] onto [0, 1]; values below a collapse to 0."""
        a = self.interval.a
        if x == 1.0:
            return 1.0
        if x <= a:
            return 0.0
        r = (x - a) / (1.0 - a)
        return BELOW_ONE if r >= 1.0 else r

    def backward(self, y: float) -> float:
        """Map [0, 1] back onto [a, 1]."""
        a = self.interval.a
        if y == 1.0:
            return 1.0
        if y <= 0.0:
            return a
        r = a + (1.0 - a) * y
        if r >= 1.0:
            return BELOW_ONE
        return max(r, a)

    def __iter__(self):
        # unpacks as (forward, backward)
        return iter((self.forward, self.backward))


@dataclass(frozen=True)
class OrdinalSumTNorm:
    """A continuous t-norm given by finitely many disjoint archetype intervals.

    The empty ordinal sum is the minimum t-norm.
    """

    intervals: Tuple[OrdinalInterval, ...] = ()

    def __post_init__(self):
        intervals = tuple(self.intervals)
        object.__setattr__(self, "intervals", intervals)
        for left, right in zip(intervals, intervals[1:]):
            if left.b > right.a:
                raise InvalidTNormError(
                    f"Intervals ({left.a}, {left.b}) and ({right.a}, {right.b}) overlap or are unsorted"
                )

    # Named constructors
    @classmethod
    def minimum(cls) -> "OrdinalSumTNorm":
        return cls(())

    @classmethod
    def product(cls) -> "OrdinalSumTNorm":
        return cls((OrdinalInterval(0.0, 1.0, Archetype.PRODUCT),))

    @classmethod
    def lukasiewicz(cls) -> "OrdinalSumTNorm":
        return cls((OrdinalInterval(0.0, 1.0, Archetype.LUKASIEWICZ),))

    @classmethod
    def archetype_norm(cls, archetype: Archetype) -> "OrdinalSumTNorm":
        """The pure archetype t-norm on [0,1]."""
        if archetype is Archetype.MINIMUM:
            return cls.minimum()
        return cls((OrdinalInterval(0.0, 1.0, archetype),))

    @classmethod
    def from_intervals(cls, triples: Iterable[Tuple[float, float, Any]]) -> "OrdinalSumTNorm":
        """Build from (a, b, archetype) triples; archetype may be a tag string."""
        intervals = []
        for a, b, arch in triples:
            if not isinstance(arch, Archetype):
                arch = Archetype.parse(arch)
            intervals.append(OrdinalInterval(a, b, arch))
        return cls(tuple(intervals))

    @property
    def is_minimum(self) -> bool:
        return not self.intervals

    @property
    def name(self) -> str:
        """Short display name."""
        if self == OrdinalSumTNorm.minimum():
            return "min"
        if self == OrdinalSumTNorm.product():
            return "product"
        if self == OrdinalSumTNorm.lukasiewicz():
            return "lukasiewicz"
        parts = ", ".join(f"({iv.a:g},{iv.b:g},{iv.archetype.value})" for iv in self.intervals)
        return f"[{parts}]"

    def _hull(self, p: float, q: float) -> Optional[OrdinalInterval]:
        for interval in self.intervals:
            if interval.contains_closed(p) and interval.contains_closed(q):
                return interval
        return None

    def eval(self, p: float, q: float) -> float:
        """Evaluate p * q."""
        if p == 1.0:
            return q
        if q == 1.0:
            return p
        interval = self._hull(p, q)
        if interval is None:
            return min(p, q)
        return interval.eval(p, q)

    def eval_array(self, p, q) -> np.ndarray:
        """Vectorised evaluation, elementwise equal to eval()."""
        p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
        out = np.minimum(p, q)
        done = np.zeros(out.shape, dtype=bool)
        for iv in self.intervals:
            a, b = iv.a, iv.b
            mask = (p >= a) & (p <= b) & (q >= a) & (q <= b) & ~done
            if not mask.any():
                continue
            pm, qm = p[mask], q[mask]
            if iv.archetype is Archetype.PRODUCT:
                w = b - a
                r = a + w * (((pm - a) / w) * ((qm - a) / w))
            else:
                r = np.maximum(a, pm + qm - b)
            r = np.minimum(np.minimum(np.maximum(r, a), pm), qm)
            r = np.where((pm == a) | (qm == a), a, r)
            r = np.where(qm == b, pm, r)
            r = np.where(pm == b, qm, r)
            out[mask] = r
            done |= mask
        out = np.where(q == 1.0, p, out)
        out = np.where(p == 1.0, q, out)
        return out

    def is_idempotent(self, q: float) -> bool:
        """True iff q lies outside every open interval."""
        return not any(interval.contains_open(q) for interval in self.intervals)

    def idempotent_floor(self, q: float) -> float:
        """The largest idempotent element <= q."""
        for interval in self.intervals:
            if interval.contains_open(q):
                return interval.a
        return q

    def k_star(self) -> float:
        """Supremum of the idempotents in [0, 1)."""
        tail = self.tail_interval()
        return tail.a if tail is not None else 1.0

    def tail_interval(self) -> Optional[OrdinalInterval]:
        """The last interval when it reaches 1."""
        if self.intervals and self.intervals[-1].b == 1.0:
            return self.intervals[-1]
        return None

    def idempotent_points(self) -> Tuple[float, ...]:
        """Interval endpoints together with 0 and 1."""
        points = {0.0, 1.0}
        for interval in self.intervals:
            points.update((interval.a, interval.b))
        return tuple(sorted(points))

    def to_dict(self) -> dict:
        return {"intervals": [interval.to_dict() for interval in self.intervals]}

    @classmethod
    def from_descriptor(cls, descriptor: Any, source: Optional[str] = None) -> "OrdinalSumTNorm":
        """Parse a name ("min", "product", "lukasiewicz") or an interval document."""
        if isinstance(descriptor, str):
            try:
                archetype = Archetype.parse(descriptor)
            except ValueError:
                raise SchemaError(f"unknown t-norm name '{descriptor}'", "tnorm", source)
            return cls.archetype_norm(archetype)
        if not isinstance(descriptor, dict) or "intervals" not in descriptor:
            raise SchemaError("expected a t-norm name or an object with 'intervals'", "tnorm", source)
        raw = descriptor["intervals"]
        if not isinstance(raw, list):
            raise SchemaError("must be a list", "tnorm.intervals", source)
        intervals = []
        for i, item in enumerate(raw):
            field = f"tnorm.intervals[{i}]"
            if not isinstance(item, dict):
                raise SchemaError("must be an object with a, b, archetype", field, source)
            try:
                a = float(item["a"])
                b = float(item["b"])
                archetype = Archetype.parse(item["archetype"])
            except KeyError as e:
                raise SchemaError(f"missing key {e}", field, source)
            except (TypeError, ValueError) as e:
                raise SchemaError(str(e), field, source)
            try:
                intervals.append(OrdinalInterval(a, b, archetype))
            except InvalidTNormError as e:
                raise SchemaError(str(e), field, source)
        try:
            return cls(tuple(intervals))
        except InvalidTNormError as e:
            raise SchemaError(str(e), "tnorm.intervals", source)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OrdinalSumTNorm":
        return cls.from_descriptor(data)


def eval_tnorm(T: OrdinalSumTNorm, p: float, q: float) -> float:
    return T.eval(p, q)


def is_idempotent(T: OrdinalSumTNorm, q: float) -> bool:
    return T.is_idempotent(q)


def idempotent_floor(T: OrdinalSumTNorm, q: float) -> float:
    return T.idempotent_floor(q)


def k_star(T: OrdinalSumTNorm) -> float:
    return T.k_star()


def transported_iso(interval: OrdinalInterval) -> IntervalIsomorphism:
    """Canonical affine isomorphism for a tail interval (a, 1).

    Raises:
        InvalidTNormError: if the interval does not end at 1.
    """
    if interval.b != 1.0:
        raise InvalidTNormError(f"Interval ({interval.a}, {interval.b}) does not end at 1")
    return IntervalIsomorphism(interval)
