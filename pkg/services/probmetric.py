"""Finite probabilistic metric spaces: construction, axioms, closure and maps."""
import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from models.distribution import (
    INF,
    MAX_PLATEAUS,
    Distribution,
    ExpDistribution,
    StepDistribution,
    bottom,
    convolve,
    evaluate_array,
    first_reach_one,
    first_violation,
    is_kappa,
    kappa,
    pointwise_sup,
)
from models.errors import AxiomViolationError, InvalidDistributionError, SchemaError
from models.reports import AxiomCheck, AxiomReport
from models.spaces import ClassicalMetricSpace, ProbMetricSpace
from models.tnorm import OrdinalSumTNorm
from services.config_manager import ConfigManager, LimitsConfig, ToleranceConfig

logger = logging.getLogger(__name__)


def _settings(config: Optional[ConfigManager]) -> Tuple[LimitsConfig, ToleranceConfig, int]:
    if config is None:
        return LimitsConfig(), ToleranceConfig(), 1000
    return config.limits, config.tolerances, config.oracle.exp_grid_points


def _scale(phi: Distribution) -> float:
    """A length scale of phi: its last jump or its rate (0 when it has none)."""
    if isinstance(phi, ExpDistribution):
        return phi.rate if math.isfinite(phi.rate) else 0.0
    return phi.jumps[-1] if phi.plateaus else 0.0


def _convolve_exact(T: OrdinalSumTNorm, phi: Distribution, psi: Distribution, max_plateaus: int) -> Optional[Distribution]:
    """Exact convolution where the representation allows it, else None."""
    if is_kappa(phi):
        return psi
    if is_kappa(psi):
        return phi
    if isinstance(phi, StepDistribution) and isinstance(psi, StepDistribution):
        return convolve(T, phi, psi, max_plateaus)
    return None


def _sampled_triangle_violation(
    T: OrdinalSumTNorm,
    left: Distribution,
    right: Distribution,
    target: Distribution,
    points: int,
    tol: float,
) -> Optional[Tuple[float, float]]:
    """First grid split (r, s) with T(left(r), right(s)) > target(r + s) + tol."""
    span = 4.0 * max(_scale(left), _scale(right), _scale(target)) or 1.0
    per_axis = max(2, int(math.isqrt(points)))
    g = np.linspace(0.0, span, per_axis)
    R, S = np.meshgrid(g, g, indexing="ij")
    lhs = T.eval_array(evaluate_array(left, R), evaluate_array(right, S))
    rhs = evaluate_array(target, R + S)
    bad = lhs > rhs + tol
    if not bad.any():
        return None
    i, j = (int(v) for v in np.argwhere(bad)[0])
    return float(g[i]), float(g[j])


def _jumps(phi: Distribution) -> List[float]:
    return list(phi.jumps) if isinstance(phi, StepDistribution) else []


def _rate_triangle(M: ProbMetricSpace) -> Optional[Tuple[int, int, int]]:
    """For an exponential-family space: first (x, y, z) with d(x,z) > d(x,y) + d(y,z)."""
    n = M.size
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if M.alpha[x][z].rate > M.alpha[x][y].rate + M.alpha[y][z].rate:
                    return x, y, z
    return None


def check_axioms(
    M: ProbMetricSpace,
    config: Optional[ConfigManager] = None,
    waive_p4: bool = False,
) -> AxiomReport:
    """
    Verify P1-P5 for M with respect to its own t-norm.

    Step triples are checked exactly by convolution and the pointwise order;
    triples involving exponential entries are checked on a sampled grid, and
    for an all-exponential space under the minimum t-norm the rate triangle
    inequality decides P5 analytically.

    Args:
        M: the space
        config: limits and tolerances
        waive_p4: accept off-diagonal kappa entries (pseudo-metric experiments)

    Returns:
        AxiomReport with checks P1..P5
    """
    limits, tolerances, exp_points = _settings(config)
    report = AxiomReport(subject=f"probabilistic metric space over {M.tnorm.name}")
    n, labels, alpha = M.size, M.carrier, M.alpha

    bad = next(
        ((x, y) for x in range(n) for y in range(n)
         if not isinstance(alpha[x][y], (StepDistribution, ExpDistribution))),
        None,
    )
    if bad:
        report.add(AxiomCheck("P1", False, {"x": labels[bad[0]], "y": labels[bad[1]]}))
    else:
        report.add(AxiomCheck("P1", True, detail="every entry is a distance distribution"))

    bad = next((x for x in range(n) if not is_kappa(alpha[x][x])), None)
    if bad is not None:
        report.add(AxiomCheck("P2", False, {"x": labels[bad], "entry": alpha[bad][bad].to_dict()}))
    else:
        report.add(AxiomCheck("P2", True))

    bad = next(((x, y) for x in range(n) for y in range(x + 1, n) if alpha[x][y] != alpha[y][x]), None)
    if bad:
        report.add(AxiomCheck("P3", False, {"x": labels[bad[0]], "y": labels[bad[1]]}))
    else:
        report.add(AxiomCheck("P3", True))

    kappa_pairs = [(labels[x], labels[y]) for x in range(n) for y in range(x + 1, n) if is_kappa(alpha[x][y])]
    if kappa_pairs and waive_p4:
        report.add(AxiomCheck("P4", True, {"x": kappa_pairs[0][0], "y": kappa_pairs[0][1]},
                              f"waived: {len(kappa_pairs)} merged pairs"))
    elif kappa_pairs:
        report.add(AxiomCheck("P4", False, {"x": kappa_pairs[0][0], "y": kappa_pairs[0][1]}))
    else:
        report.add(AxiomCheck("P4", True))

    report.add(_check_triangle(M, limits.max_plateaus, tolerances, exp_points, report.unchecked))
    logger.debug(f"Checked P1-P5 on {n} points: passed={report.passed}")
    return report


def _check_triangle(
    M: ProbMetricSpace,
    max_plateaus: int,
    tolerances: ToleranceConfig,
    exp_points: int,
    unchecked: List[Dict[str, str]],
) -> AxiomCheck:
    """P5 over every triple; triples with no exact order go to a sampled grid and are listed in unchecked."""
    n, labels, alpha, T = M.size, M.carrier, M.alpha, M.tnorm
    all_exp = all(isinstance(phi, ExpDistribution) for row in alpha for phi in row)
    if all_exp and T.is_minimum:
        bad = _rate_triangle(M)
        if bad is not None:
            x, y, z = bad
            witness = {"x": labels[x], "y": labels[y], "z": labels[z],
                       "rates": [alpha[x][y].rate, alpha[y][z].rate, alpha[x][z].rate]}
            return AxiomCheck("P5", False, witness, "rate triangle inequality fails", sampled=False)
        return AxiomCheck("P5", True, detail="rate triangle inequality holds", sampled=False)

    sampled = False
    for x in range(n):
        for y in range(n):
            for z in range(n):
                left, right, target = alpha[y][z], alpha[x][y], alpha[x][z]
                conv = _convolve_exact(T, left, right, max_plateaus)
                if conv is not None:
                    try:
                        t = first_violation(conv, target, tolerances.order)
                    except InvalidDistributionError:
                        conv = None
                    else:
                        if t is not None:
                            after = max((j for j in _jumps(conv) + _jumps(target) if j < t), default=0.0)
                            witness = {"x": labels[x], "y": labels[y], "z": labels[z], "t": t, "after": after,
                                       "composed": conv.evaluate(t), "direct": target.evaluate(t)}
                            return AxiomCheck("P5", False, witness, "fails on (after, t]; t is the midpoint of the failing plateau",
                                              sampled=False)
                        continue
                sampled = True
                unchecked.append({"x": labels[x], "y": labels[y], "z": labels[z], "mode": "sampled"})
                split = _sampled_triangle_violation(T, left, right, target, exp_points, tolerances.exp_grid)
                if split is not None:
                    r, s = split
                    witness = {"x": labels[x], "y": labels[y], "z": labels[z], "r": r, "s": s, "t": r + s}
                    return AxiomCheck("P5", False, witness, "sampled grid", sampled=True)
    detail = "sampled grid for exponential entries" if sampled else "exact"
    return AxiomCheck("P5", True, detail=detail, sampled=sampled)


def require_valid(M: ProbMetricSpace, config: Optional[ConfigManager] = None, waive_p4: bool = False) -> AxiomReport:
    """Raise AxiomViolationError unless M satisfies P1-P5 for its t-norm."""
    report = check_axioms(M, config, waive_p4)
    if not report.passed:
        failed = ", ".join(check.name for check in report.failures)
        logger.error(f"Space is not valid for {M.tnorm.name}: {failed}")
        raise AxiomViolationError(f"space is not a probabilistic metric space for {M.tnorm.name} ({failed})", report)
    return report


def from_classical_metric(D: ClassicalMetricSpace, T: OrdinalSumTNorm) -> ProbMetricSpace:
    """Embed a metric: alpha(x,y) jumps from 0 to 1 right after d(x,y)."""
    rows = []
    for i in range(D.size):
        row = []
        for j in range(D.size):
            d = D.d[i][j]
            if i == j:
                row.append(kappa())
            elif d == INF:
                row.append(bottom())
            else:
                row.append(StepDistribution(((d, 1.0),)))
        rows.append(tuple(row))
    return ProbMetricSpace(D.carrier, T, tuple(rows))


def exp_family_from_metric(D: ClassicalMetricSpace, waive_p4: bool = False) -> ProbMetricSpace:
    """
    The exponential family over a (pseudo)metric, under the minimum t-norm.

    Args:
        D: a metric; zero distances between distinct points need waive_p4
        waive_p4: allow a pseudo-metric

    Raises:
        AxiomViolationError: if D violates the metric axioms
    """
    errors = D.validate(allow_pseudo=waive_p4)
    if errors:
        logger.error(f"Not a metric: {errors[0]}")
        raise AxiomViolationError(f"not a {'pseudo-' if waive_p4 else ''}metric: {errors[0]}")
    rows = tuple(
        tuple(ExpDistribution(0.0 if i == j else D.d[i][j]) for j in range(D.size))
        for i in range(D.size)
    )
    return ProbMetricSpace(D.carrier, OrdinalSumTNorm.minimum(), rows)


def first_reach_metric(M: ProbMetricSpace) -> ClassicalMetricSpace:
    """The generalized metric d(x,y) = inf{r : alpha(x,y,r) = 1}."""
    d = tuple(tuple(first_reach_one(phi) for phi in row) for row in M.alpha)
    return ClassicalMetricSpace(M.carrier, d)


def triangle_closure(
    carrier: Sequence[str],
    raw: Sequence[Sequence[StepDistribution]],
    T: OrdinalSumTNorm,
    max_plateaus: int = MAX_PLATEAUS,
) -> ProbMetricSpace:
    """
    Smallest pointwise enlargement of raw satisfying the triangle axiom.

    Sweeps alpha[x][z] <- sup(alpha[x][z], alpha[y][z] (x) alpha[x][y]) in
    Floyd-Warshall order until nothing changes.

    Raises:
        AxiomViolationError: if raw is not symmetric with kappa diagonal, or
            the closure produces an off-diagonal kappa (report names the pair)
    """
    n = len(carrier)
    alpha: List[List[StepDistribution]] = [list(row) for row in raw]
    for x in range(n):
        if not is_kappa(alpha[x][x]):
            raise AxiomViolationError(f"raw diagonal entry at '{carrier[x]}' is not kappa")
        for z in range(n):
            if not isinstance(alpha[x][z], StepDistribution):
                raise InvalidDistributionError("triangle_closure supports step distributions only")
            if alpha[x][z] != alpha[z][x]:
                raise AxiomViolationError(f"raw matrix is not symmetric at '{carrier[x]}|{carrier[z]}'")

    max_sweeps = 4 * n + 4
    for sweep in range(1, max_sweeps + 1):
        changed = 0
        for y in range(n):
            for x in range(n):
                if x == y:
                    continue
                for z in range(x + 1, n):
                    if z == y:
                        continue
                    path = convolve(T, alpha[y][z], alpha[x][y], max_plateaus)
                    widened = pointwise_sup([alpha[x][z], path])
                    if widened != alpha[x][z]:
                        alpha[x][z] = alpha[z][x] = widened
                        changed += 1
        logger.debug(f"Closure sweep {sweep}: {changed} entries widened")
        if not changed:
            break
    else:
        logger.warning(f"Triangle closure did not settle after {max_sweeps} sweeps")
        raise AxiomViolationError(f"triangle closure did not settle after {max_sweeps} sweeps")

    for x in range(n):
        for z in range(x + 1, n):
            if is_kappa(alpha[x][z]):
                report = AxiomReport("triangle closure", [AxiomCheck("P4", False, {"x": carrier[x], "y": carrier[z]})])
                logger.warning(f"Closure merged '{carrier[x]}' and '{carrier[z]}'")
                raise AxiomViolationError(f"closure makes '{carrier[x]}|{carrier[z]}' kappa", report)
    return ProbMetricSpace(tuple(carrier), T, tuple(tuple(row) for row in alpha))


def check_nonexpansive(
    f: Mapping[str, str],
    M: ProbMetricSpace,
    N: ProbMetricSpace,
    tol: float = 0.0,
) -> AxiomCheck:
    """
    alpha(x, x', t) <= beta(f(x), f(x'), t) for all pairs and all t.

    Pairs whose order no primitive decides (a step entry against an
    exponential one) make the verdict false and are listed in the witness.

    Raises:
        SchemaError: if f is not a total map from M's carrier into N's
        AxiomViolationError: if M and N carry different t-norms
    """
    _check_map(f, M.carrier, N.carrier)
    if M.tnorm != N.tnorm:
        raise AxiomViolationError(f"t-norms differ: {M.tnorm.name} and {N.tnorm.name}")
    undecided: List[Dict[str, str]] = []
    for x in M.carrier:
        for y in M.carrier:
            source, target = M.entry(x, y), N.entry(f[x], f[y])
            try:
                t = first_violation(source, target, tol)
            except InvalidDistributionError:
                undecided.append({"x": x, "y": y})
                continue
            if t is not None:
                witness = {"x": x, "y": y, "fx": f[x], "fy": f[y], "t": t,
                           "source": source.evaluate(t), "target": target.evaluate(t)}
                return AxiomCheck("nonexpansive", False, witness)
    if undecided:
        return AxiomCheck("nonexpansive", False, {"unchecked": undecided}, "order undecided for some pairs")
    return AxiomCheck("nonexpansive", True)


def _check_map(f: Mapping[str, str], domain: Sequence[str], codomain: Sequence[str]) -> None:
    for x in domain:
        if x not in f:
            raise SchemaError(f"map is not defined at '{x}'", "map")
        if f[x] not in codomain:
            raise SchemaError(f"image '{f[x]}' of '{x}' is not a point of the target", "map")
