"""Re-metrization transforms between t-norms, the remetrize driver and classification."""
import logging
import math
from typing import Callable, List, Optional, Union

from models.distribution import left_regularize, map_values
from models.errors import AxiomViolationError, TransformError
from models.reports import ClassificationReport, TransformReport, WedgeSupWitness
from models.spaces import ProbMetricSpace
from models.tnorm import BELOW_ONE, Archetype, OrdinalSumTNorm, transported_iso
from services.approach import derive_delta
from services.config_manager import ConfigManager
from services.probmetric import check_axioms, require_valid

logger = logging.getLogger(__name__)

WEDGE_SEQUENCE_LENGTH = 20

FINITE_CARRIER_NOTE = (
    "finite carrier: a finite supremum equals 1 only through a value exactly 1, and 1 is idempotent, "
    "so the minimum certificate exists for every t-norm; a space that is Product- but not "
    "minimum-metrizable cannot be exhibited on a finite carrier"
)


def _require_steps(M: ProbMetricSpace, name: str) -> None:
    if not M.is_step:
        logger.error(f"{name} called on a space with exponential entries")
        raise TransformError(f"{name} needs step entries")


def _map_space(M: ProbMetricSpace, f: Callable[[float], float], tnorm: OrdinalSumTNorm, lift_floor: bool) -> ProbMetricSpace:
    """Apply a value map to every off-diagonal entry; the diagonal stays kappa."""
    rows = []
    for i in range(M.size):
        row = []
        for j in range(M.size):
            phi = M.alpha[i][j]
            row.append(phi if i == j else map_values(phi, f, lift_floor=lift_floor))
        rows.append(tuple(row))
    return ProbMetricSpace(M.carrier, tnorm, tuple(rows))


def compare_delta(source: ProbMetricSpace, target: ProbMetricSpace, config: Optional[ConfigManager] = None):
    """
    Compare the approach tables of two spaces over one carrier, exactly.

    Returns:
        (equal, witness) where witness names the first (x, A) that differs
    """
    left, right = derive_delta(source, config), derive_delta(target, config)
    for i, x in enumerate(left.carrier):
        for mask in range(left.full_mask + 1):
            if left.delta[i][mask] != right.delta[i][mask]:
                witness = {"x": x, "A": list(left.labels_of(mask)),
                           "input": left.delta[i][mask], "output": right.delta[i][mask]}
                return False, witness
    return True, None


def _finish(
    name: str,
    source: ProbMetricSpace,
    output: ProbMetricSpace,
    config: Optional[ConfigManager],
    stages: List[str],
    notes: Optional[List[str]] = None,
) -> TransformReport:
    axioms = check_axioms(output, config)
    preserved, witness = compare_delta(source, output, config)
    report = TransformReport(
        name=name,
        input_tnorm=source.tnorm,
        output_tnorm=output.tnorm,
        output=output,
        axioms=axioms,
        delta_preserved=preserved,
        delta_witness=witness,
        stages=stages,
        notes=list(notes or []),
    )
    logger.info(f"{name}: {source.tnorm.name} -> {output.tnorm.name}, axioms={axioms.passed}, delta preserved={preserved}")
    return report


def min_retag(M: ProbMetricSpace, T: OrdinalSumTNorm, config: Optional[ConfigManager] = None) -> TransformReport:
    """Re-tag a space valid for the minimum t-norm with any t-norm T."""
    require_valid(M.retag(OrdinalSumTNorm.minimum()), config)
    return _finish("min_retag", M, M.retag(T), config, ["min_retag"])


def exp_minus_one(v: float) -> float:
    """v -> e^(v - 1), fixing 1 and keeping every v < 1 below 1."""
    if v == 1.0:
        return 1.0
    return min(math.exp(v - 1.0), BELOW_ONE)


def luk_to_prod(M: ProbMetricSpace, config: Optional[ConfigManager] = None) -> TransformReport:
    """Move a Lukasiewicz space to the product t-norm via beta = e^(alpha - 1) for t > 0."""
    _require_steps(M, "luk_to_prod")
    require_valid(M.retag(OrdinalSumTNorm.lukasiewicz()), config)
    output = _map_space(M, exp_minus_one, OrdinalSumTNorm.product(), lift_floor=True)
    return _finish("luk_to_prod", M.retag(OrdinalSumTNorm.lukasiewicz()), output, config, ["luk_to_prod"])


def prod_to_luk(M: ProbMetricSpace, config: Optional[ConfigManager] = None) -> TransformReport:
    """A product space is a Lukasiewicz space as it stands."""
    require_valid(M.retag(OrdinalSumTNorm.product()), config)
    source = M.retag(OrdinalSumTNorm.product())
    return _finish("prod_to_luk", source, M.retag(OrdinalSumTNorm.lukasiewicz()), config, ["prod_to_luk"])


def _tail(T: OrdinalSumTNorm, q: Optional[float]):
    k = T.k_star()
    if q is None:
        q = k
    if not T.is_idempotent(q):
        raise TransformError(f"q = {q:g} is not idempotent for {T.name}")
    if q >= 1.0 or q != k:
        raise TransformError(
            f"q = {q:g} must equal k* = {k:g} < 1; tails made of several intervals above q are not supported"
        )
    tail = T.tail_interval()
    if tail is None or tail.a != q:
        raise TransformError(f"{T.name} has no single archetype interval ({q:g}, 1)")
    return tail


def tail_rescale_up(M: ProbMetricSpace, q: Optional[float] = None, config: Optional[ConfigManager] = None) -> TransformReport:
    """
    Transport a space over T1 with tail interval (q, 1) onto the pure archetype.

    Values at or below q drop to 0; values above q move by the affine map onto (0, 1].

    Raises:
        TransformError: q is not k*, not idempotent, or no tail interval starts at q
    """
    _require_steps(M, "tail_rescale_up")
    tail = _tail(M.tnorm, q)
    require_valid(M, config)
    forward, _ = transported_iso(tail)
    output = _map_space(M, forward, OrdinalSumTNorm.archetype_norm(tail.archetype), lift_floor=False)
    return _finish("tail_rescale_up", M, output, config, ["tail_rescale_up"])


def tail_rescale_down(
    M: ProbMetricSpace,
    T1: OrdinalSumTNorm,
    q: Optional[float] = None,
    config: Optional[ConfigManager] = None,
) -> TransformReport:
    """
    Transport a space over the archetype of T1's tail back into [q, 1], tagged T1.

    Raises:
        TransformError: if M's t-norm is not the archetype of T1's tail interval
    """
    _require_steps(M, "tail_rescale_down")
    tail = _tail(T1, q)
    archetype_norm = OrdinalSumTNorm.archetype_norm(tail.archetype)
    if M.tnorm != archetype_norm:
        logger.error(f"Archetype mismatch: space over {M.tnorm.name}, tail of {T1.name} is {tail.archetype.value}")
        raise TransformError(f"space is tagged {M.tnorm.name}, expected {archetype_norm.name}")
    require_valid(M, config)
    _, backward = transported_iso(tail)
    output = _map_space(M, backward, T1, lift_floor=True)
    return _finish("tail_rescale_down", M, output, config, ["tail_rescale_down"])


def idempotent_projection(M: ProbMetricSpace, config: Optional[ConfigManager] = None) -> TransformReport:
    """
    Replace every value by its idempotent floor; the result is a space over the minimum.

    The left-regularization that follows the value map is the identity on step
    distributions; that is asserted rather than assumed.
    """
    T = M.tnorm
    require_valid(M, config)
    if T.is_minimum:
        # every value is idempotent: the identity, for either representation
        output = M
    else:
        _require_steps(M, "idempotent_projection")
        output = _map_space(M, T.idempotent_floor, OrdinalSumTNorm.minimum(), lift_floor=False)
        for row in output.alpha:
            for phi in row:
                if left_regularize(phi.plateaus) != phi:
                    raise TransformError("left-regularization changed a projected entry")
    notes = []
    if T.k_star() < 1.0:
        notes.append(f"k* = {T.k_star():g} < 1: " + FINITE_CARRIER_NOTE)
    report = _finish("idempotent_projection", M, output, config, ["idempotent_projection"], notes)
    if T.k_star() == 1.0 and not report.delta_preserved:
        logger.warning(f"Projection over {T.name} with k* = 1 changed the approach table")
    return report


def _parse_target(target: Union[str, Archetype]) -> Archetype:
    archetype = target if isinstance(target, Archetype) else Archetype.parse(target)
    if archetype is Archetype.LUKASIEWICZ:
        raise TransformError("remetrize targets are 'min' and 'product'")
    return archetype


def remetrize(
    M: ProbMetricSpace,
    target: Union[str, Archetype],
    config: Optional[ConfigManager] = None,
) -> TransformReport:
    """
    Move a space over T to the minimum or the product t-norm.

    Pipelines:
        minimum:            idempotent_projection
        product, k* < 1:    tail_rescale_up (unless T is already the tail archetype),
                            then luk_to_prod for a Lukasiewicz tail
        product, k* = 1:    idempotent_projection, then min_retag to product

    Returns:
        TransformReport of the whole pipeline, checked against the input
    """
    archetype = _parse_target(target)
    T = M.tnorm
    require_valid(M, config)
    stages: List[str] = []
    notes: List[str] = []
    current = M

    def run(report: TransformReport) -> ProbMetricSpace:
        stages.extend(report.stages)
        notes.extend(note for note in report.notes if note not in notes)
        if not report.passed:
            logger.warning(f"Stage {report.name} did not certify its output")
        return report.output

    if archetype is Archetype.MINIMUM:
        current = run(idempotent_projection(current, config))
    elif T.k_star() < 1.0:
        tail = T.tail_interval()
        if T != OrdinalSumTNorm.archetype_norm(tail.archetype):
            current = run(tail_rescale_up(current, config=config))
        if tail.archetype is Archetype.LUKASIEWICZ:
            current = run(luk_to_prod(current, config))
    else:
        current = run(idempotent_projection(current, config))
        current = run(min_retag(current, OrdinalSumTNorm.product(), config))
    if not stages:
        notes.append(f"{T.name} is already the target t-norm")
    return _finish(f"remetrize:{archetype.value}", M, current, config, stages, notes)


def wedgesup_witness(T: OrdinalSumTNorm) -> Optional[WedgeSupWitness]:
    """
    A sequence approaching 1 whose idempotent floors stay at k*, or None when k* = 1.

    The sequence is a_i = 1 - (1 - k*) 2^-i for i = 1..20.
    """
    k = T.k_star()
    if k == 1.0:
        return None
    sequence = tuple(1.0 - (1.0 - k) * 2.0 ** -i for i in range(1, WEDGE_SEQUENCE_LENGTH + 1))
    floors = tuple(T.idempotent_floor(a) for a in sequence)
    return WedgeSupWitness(k_star=k, sequence=sequence, floors=floors, floor_sup=max(floors))


def classify(M: ProbMetricSpace, config: Optional[ConfigManager] = None) -> ClassificationReport:
    """
    Try both re-metrizations and report which certificates hold.

    Raises:
        AxiomViolationError: if M is not valid for its own t-norm
    """
    T = M.tnorm
    require_valid(M, config)
    minimum_report = remetrize(M, Archetype.MINIMUM, config)
    product_report = None
    product_error = None
    try:
        product_report = remetrize(M, Archetype.PRODUCT, config)
    except (TransformError, AxiomViolationError) as e:
        product_error = str(e)
        logger.warning(f"Product pipeline failed: {e}")

    minimum_ok = minimum_report.passed
    product_ok = product_report is not None and product_report.passed
    families = []
    if minimum_ok:
        families.append("every continuous t-norm")
    elif product_ok:
        families.append("every continuous t-norm with k* < 1")

    notes = []
    k = T.k_star()
    if k == 1.0:
        notes.append(f"k* = 1 for {T.name}: metrizable for it exactly when minimum-metrizable")
    else:
        notes.append(f"k* = {k:g} < 1 for {T.name}: metrizable for it exactly when Product-metrizable")
    notes.append(FINITE_CARRIER_NOTE)
    report = ClassificationReport(
        tnorm=T,
        k_star=k,
        minimum_certificate=minimum_ok,
        product_certificate=product_ok,
        minimum_report=minimum_report,
        product_report=product_report,
        product_error=product_error,
        certified_families=families,
        notes=notes,
    )
    logger.info(f"Classified space over {T.name}: case {report.case}")
    return report
