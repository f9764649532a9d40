"""Report data classes returned by the checkers and transforms.

Reports are plain data: verdicts plus JSON-ready witnesses. They serialize with
to_dict() and rebuild with from_dict(), and a report re-read from JSON compares
equal to the original.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from models.distribution import decode_ext, encode_ext
from models.spaces import ProbMetricSpace
from models.tnorm import OrdinalSumTNorm


def to_jsonable(obj: Any) -> Any:
    """Normalize a witness value: tuples and sets become lists, inf becomes "inf"."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isinf(value) and value > 0:
            return "inf"
        return value
    return obj


@dataclass
class AxiomCheck:
    """Verdict for one axiom or property."""

    name: str                                    # e.g. "P5", "A4", "associativity"
    passed: bool
    witness: Optional[Dict[str, Any]] = None     # failing point/pair/triple/subset
    detail: str = ""
    sampled: bool = False                        # verdict from a sampled grid, not exact

    def __post_init__(self):
        self.passed = bool(self.passed)
        if self.witness is not None:
            self.witness = to_jsonable(self.witness)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness,
            "detail": self.detail,
            "sampled": self.sampled,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AxiomCheck":
        return cls(
            name=data["name"],
            passed=data["passed"],
            witness=data.get("witness"),
            detail=data.get("detail", ""),
            sampled=data.get("sampled", False),
        )


@dataclass
class AxiomReport:
    """A list of checks about one subject."""

    subject: str
    checks: List[AxiomCheck] = field(default_factory=list)
    unchecked: List[Dict[str, Any]] = field(default_factory=list)   # pairs no primitive could decide

    def __post_init__(self):
        self.unchecked = [to_jsonable(item) for item in self.unchecked]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[AxiomCheck]:
        return [check for check in self.checks if not check.passed]

    def add(self, check: AxiomCheck) -> AxiomCheck:
        self.checks.append(check)
        return check

    def get(self, name: str) -> AxiomCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(f"No check named '{name}' in report for {self.subject}")

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "unchecked": self.unchecked,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AxiomReport":
        return cls(
            subject=data.get("subject", ""),
            checks=[AxiomCheck.from_dict(item) for item in data.get("checks", [])],
            unchecked=list(data.get("unchecked", [])),
        )


@dataclass
class TransformReport:
    """Result of one re-metrization transform or pipeline."""

    name: str
    input_tnorm: OrdinalSumTNorm
    output_tnorm: OrdinalSumTNorm
    output: ProbMetricSpace
    axioms: AxiomReport
    delta_preserved: bool
    delta_witness: Optional[Dict[str, Any]] = None      # first (x, A) where the tables differ
    stages: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.delta_witness is not None:
            self.delta_witness = to_jsonable(self.delta_witness)

    @property
    def passed(self) -> bool:
        return self.axioms.passed and self.delta_preserved

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "input_tnorm": self.input_tnorm.to_dict(),
            "output_tnorm": self.output_tnorm.to_dict(),
            "stages": list(self.stages),
            "notes": list(self.notes),
            "axioms": self.axioms.to_dict(),
            "delta_preserved": self.delta_preserved,
            "delta_witness": self.delta_witness,
            "output": self.output.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransformReport":
        return cls(
            name=data["name"],
            input_tnorm=OrdinalSumTNorm.from_descriptor(data["input_tnorm"]),
            output_tnorm=OrdinalSumTNorm.from_descriptor(data["output_tnorm"]),
            output=ProbMetricSpace.from_dict(data["output"]),
            axioms=AxiomReport.from_dict(data["axioms"]),
            delta_preserved=data["delta_preserved"],
            delta_witness=data.get("delta_witness"),
            stages=list(data.get("stages", [])),
            notes=list(data.get("notes", [])),
        )


@dataclass
class ClassificationReport:
    """Which re-metrization certificates a space admits."""

    tnorm: OrdinalSumTNorm
    k_star: float
    minimum_certificate: bool
    product_certificate: bool
    minimum_report: Optional[TransformReport] = None
    product_report: Optional[TransformReport] = None
    product_error: Optional[str] = None                  # why the Product pipeline could not run
    certified_families: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def case(self) -> int:
        """1: both certificates; 2: Product only; 3: neither."""
        if self.minimum_certificate:
            return 1
        if self.product_certificate:
            return 2
        return 3

    @property
    def passed(self) -> bool:
        return self.minimum_certificate or self.product_certificate

    def to_dict(self) -> dict:
        return {
            "tnorm": self.tnorm.to_dict(),
            "k_star": self.k_star,
            "case": self.case,
            "minimum_certificate": self.minimum_certificate,
            "product_certificate": self.product_certificate,
            "certified_families": list(self.certified_families),
            "notes": list(self.notes),
            "product_error": self.product_error,
            "minimum_report": self.minimum_report.to_dict() if self.minimum_report else None,
            "product_report": self.product_report.to_dict() if self.product_report else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassificationReport":
        minimum = data.get("minimum_report")
        product = data.get("product_report")
        return cls(
            tnorm=OrdinalSumTNorm.from_descriptor(data["tnorm"]),
            k_star=float(data["k_star"]),
            minimum_certificate=data["minimum_certificate"],
            product_certificate=data["product_certificate"],
            minimum_report=TransformReport.from_dict(minimum) if minimum else None,
            product_report=TransformReport.from_dict(product) if product else None,
            product_error=data.get("product_error"),
            certified_families=list(data.get("certified_families", [])),
            notes=list(data.get("notes", [])),
        )


@dataclass
class GaugeReport:
    """The generalized metric d_n and its verdicts."""

    n: int
    carrier: Tuple[str, ...]
    matrix: Tuple[Tuple[float, ...], ...]
    checks: AxiomReport

    @property
    def passed(self) -> bool:
        return self.checks.passed

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "carrier": list(self.carrier),
            "matrix": [[encode_ext(v) for v in row] for row in self.matrix],
            "passed": self.passed,
            "checks": self.checks.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaugeReport":
        return cls(
            n=int(data["n"]),
            carrier=tuple(data["carrier"]),
            matrix=tuple(tuple(decode_ext(v) for v in row) for row in data["matrix"]),
            checks=AxiomReport.from_dict(data["checks"]),
        )


@dataclass(frozen=True)
class WedgeSupWitness:
    """A sequence with supremum 1 whose idempotent floors stay at k* < 1."""

    k_star: float
    sequence: Tuple[float, ...]
    floors: Tuple[float, ...]
    floor_sup: float

    @property
    def limit(self) -> float:
        """The supremum of the full sequence 1 - (1 - k*) 2^-i over all i >= 1."""
        return 1.0

    def to_dict(self) -> dict:
        return {
            "k_star": self.k_star,
            "sequence": list(self.sequence),
            "floors": list(self.floors),
            "floor_sup": self.floor_sup,
            "limit": self.limit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WedgeSupWitness":
        return cls(
            k_star=float(data["k_star"]),
            sequence=tuple(float(v) for v in data["sequence"]),
            floors=tuple(float(v) for v in data["floors"]),
            floor_sup=float(data["floor_sup"]),
        )


@dataclass
class CorpusEntryResult:
    """Outcome of replaying one corpus manifest entry."""

    seed: int
    tnorm: str
    n_points: int
    checks: Dict[str, bool] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "tnorm": self.tnorm,
            "n_points": self.n_points,
            "passed": self.passed,
            "checks": dict(self.checks),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusEntryResult":
        return cls(
            seed=int(data["seed"]),
            tnorm=data["tnorm"],
            n_points=int(data["n_points"]),
            checks=dict(data.get("checks", {})),
            error=data.get("error"),
        )
