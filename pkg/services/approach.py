"""Finite approach spaces: derivation, axioms, closure, neighborhoods, lambda bases and gauges."""
import logging
import math
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from models.distribution import INF, StepDistribution, first_reach_one, threshold_inf
from models.errors import AxiomViolationError, CarrierSizeError, InvalidDistributionError, SchemaError
from models.reports import AxiomCheck, AxiomReport, GaugeReport
from models.spaces import ClassicalMetricSpace, FiniteApproachSpace, LambdaTable, ProbMetricSpace
from services.config_manager import ConfigManager, LimitsConfig

logger = logging.getLogger(__name__)

NEIGHBORHOOD_HALVINGS = 64


def _limits(config: Optional[ConfigManager]) -> LimitsConfig:
    return config.limits if config is not None else LimitsConfig()


def _require_size(size: int, cap: int, what: str) -> None:
    if size > cap:
        logger.error(f"Carrier of {size} points exceeds the cap of {cap} for {what}")
        raise CarrierSizeError(f"{what} supports at most {cap} points, got {size}")


def _min_over_subsets(values: Sequence[float]) -> List[float]:
    """table[mask] = min of values over the members of mask, inf for the empty mask."""
    table = [INF] * (1 << len(values))
    for mask in range(1, len(table)):
        low = (mask & -mask).bit_length() - 1
        table[mask] = min(table[mask & (mask - 1)], values[low])
    return table


def _labels(space, mask: int) -> List[str]:
    return [label for i, label in enumerate(space.carrier) if mask >> i & 1]


def derive_delta(M: ProbMetricSpace, config: Optional[ConfigManager] = None) -> FiniteApproachSpace:
    """
    The approach distance of M: delta(x, A) = inf{r : sup_{a in A} alpha(x, a, r) = 1}.

    A finite supremum equals 1 exactly when one member does, so the table is
    the minimum of first_reach_one(alpha(x, a)) over a in A.
    """
    _require_size(M.size, _limits(config).max_table_carrier, "delta tables")
    rows = []
    for i in range(M.size):
        reach = [first_reach_one(phi) for phi in M.alpha[i]]
        rows.append(tuple(_min_over_subsets(reach)))
    logger.debug(f"Derived delta table over {M.size} points")
    return FiniteApproachSpace(M.carrier, tuple(rows))


def metric_delta(D: ClassicalMetricSpace) -> FiniteApproachSpace:
    """delta(x, A) = min over a in A of d(x, a)."""
    rows = tuple(tuple(_min_over_subsets(D.d[i])) for i in range(D.size))
    return FiniteApproachSpace(D.carrier, rows)


def topological_delta(D: ClassicalMetricSpace) -> FiniteApproachSpace:
    """0 on the (pseudo)metric closure of A, inf elsewhere."""
    rows = []
    for i in range(D.size):
        dist = _min_over_subsets(D.d[i])
        rows.append(tuple(0.0 if v == 0.0 else INF for v in dist))
    return FiniteApproachSpace(D.carrier, tuple(rows))


def check_axioms(A: FiniteApproachSpace, config: Optional[ConfigManager] = None) -> AxiomReport:
    """
    Exhaustive A1-A4 over every point and every pair of subsets.

    Raises:
        CarrierSizeError: above limits.max_exhaustive_carrier
    """
    n = A.size
    _require_size(n, _limits(config).max_exhaustive_carrier, "exhaustive approach checks")
    report = AxiomReport(subject="approach space")
    D = np.array(A.delta, dtype=float)            # (n, 2^n)
    masks = np.arange(1 << n)

    bad = [i for i in range(n) if D[i, 1 << i] != 0.0]
    if bad:
        report.add(AxiomCheck("A1", False, {"x": A.carrier[bad[0]], "value": D[bad[0], 1 << bad[0]]}))
    else:
        report.add(AxiomCheck("A1", True))

    bad = [i for i in range(n) if D[i, 0] != INF]
    if bad:
        report.add(AxiomCheck("A2", False, {"x": A.carrier[bad[0]], "value": D[bad[0], 0]}))
    else:
        report.add(AxiomCheck("A2", True))

    union = masks[:, None] | masks[None, :]
    lhs = D[:, union]
    rhs = np.minimum(D[:, :, None], D[:, None, :])
    violation = lhs != rhs
    if violation.any():
        x, a, b = (int(v) for v in np.argwhere(violation)[0])
        witness = {"x": A.carrier[x], "A": _labels(A, a), "B": _labels(A, b),
                   "union": lhs[x, a, b], "min": rhs[x, a, b]}
        report.add(AxiomCheck("A3", False, witness))
    else:
        report.add(AxiomCheck("A3", True, detail=f"{n * 4 ** n} cases"))

    # sup_b[a, b] = max over members of B of delta(member, A); 0 for the empty B
    sup_b = np.zeros((1 << n, 1 << n))
    for b in range(1, 1 << n):
        low = (b & -b).bit_length() - 1
        sup_b[:, b] = np.maximum(sup_b[:, b & (b - 1)], D[low, :])
    bound = sup_b[None, :, :] + D[:, None, :]      # (x, A, B)
    violation = D[:, :, None] > bound
    if violation.any():
        x, a, b = (int(v) for v in np.argwhere(violation)[0])
        witness = {"x": A.carrier[x], "A": _labels(A, a), "B": _labels(A, b),
                   "delta": D[x, a], "bound": bound[x, a, b]}
        report.add(AxiomCheck("A4", False, witness))
    else:
        report.add(AxiomCheck("A4", True, detail=f"{n * 4 ** n} cases"))
    logger.debug(f"Checked A1-A4 on {n} points: passed={report.passed}")
    return report


def closure_mask(A: FiniteApproachSpace, mask: int) -> int:
    out = 0
    for i in range(A.size):
        if A.delta[i][mask] == 0.0:
            out |= 1 << i
    return out


def closure(A: FiniteApproachSpace, subset: Iterable[str]) -> Tuple[str, ...]:
    """cl(S) = {x : delta(x, S) = 0}, in carrier order."""
    return A.labels_of(closure_mask(A, A.mask_of(subset)))


def check_closure_operator(A: FiniteApproachSpace, config: Optional[ConfigManager] = None) -> AxiomReport:
    """Kuratowski axioms of cl, exhaustively."""
    n = A.size
    _require_size(n, _limits(config).max_exhaustive_carrier, "closure operator checks")
    report = AxiomReport(subject="closure operator")
    cl = [closure_mask(A, mask) for mask in range(1 << n)]

    report.add(AxiomCheck("empty", cl[0] == 0, None if cl[0] == 0 else {"closure": _labels(A, cl[0])}))

    bad = next((m for m in range(1 << n) if m & ~cl[m]), None)
    report.add(AxiomCheck("extensive", bad is None, None if bad is None else {"S": _labels(A, bad)}))

    bad = next((m for m in range(1 << n) if cl[cl[m]] != cl[m]), None)
    report.add(AxiomCheck("idempotent", bad is None, None if bad is None else {"S": _labels(A, bad)}))

    bad = next(((s, t) for s in range(1 << n) for t in range(1 << n) if cl[s | t] != cl[s] | cl[t]), None)
    witness = None if bad is None else {"S": _labels(A, bad[0]), "T": _labels(A, bad[1])}
    report.add(AxiomCheck("union", bad is None, witness))
    return report


def neighborhood(M: ProbMetricSpace, x: str, t: float) -> Tuple[str, ...]:
    """U_x(t) = {y : alpha(x, y, t) > 1 - t}."""
    if not t > 0:
        raise ValueError(f"neighborhood radius must be positive, got {t}")
    row = M.row(x)
    return tuple(y for y in M.carrier if row[y].evaluate(t) > 1.0 - t)


def check_strong_topology(
    M: ProbMetricSpace,
    A: Optional[FiniteApproachSpace] = None,
    ts: Sequence[float] = (),
    config: Optional[ConfigManager] = None,
) -> AxiomReport:
    """
    x in cl(S) iff S meets every U_x(t).

    The forward direction is checked on the supplied radii. For x outside
    cl(S) a separating radius is searched by halving from min(1, delta(x, S));
    a failure names the pair for which none was found.
    """
    if A is None:
        A = derive_delta(M, config)
    _require_size(M.size, _limits(config).max_exhaustive_carrier, "strong topology checks")
    report = AxiomReport(subject="strong topology")
    radii = sorted(set(float(t) for t in ts))
    hoods = {(x, t): A.mask_of(neighborhood(M, x, t)) for x in M.carrier for t in radii}

    forward_witness = None
    separate_witness = None
    for mask in range(1, 1 << M.size):
        members = A.labels_of(mask)
        cl = closure_mask(A, mask)
        for i, x in enumerate(M.carrier):
            if cl >> i & 1:
                missed = next((t for t in radii if not hoods[(x, t)] & mask), None)
                if missed is not None and forward_witness is None:
                    forward_witness = {"x": x, "S": list(members), "t": missed}
            elif separate_witness is None:
                if _separating_radius(M, x, mask, A.delta[i][mask]) is None:
                    separate_witness = {"x": x, "S": list(members), "delta": A.delta[i][mask]}
    report.add(AxiomCheck("closure_meets_neighborhoods", forward_witness is None, forward_witness,
                          f"{len(radii)} radii"))
    report.add(AxiomCheck("neighborhoods_separate", separate_witness is None, separate_witness))
    return report


def _separating_radius(M: ProbMetricSpace, x: str, mask: int, delta: float) -> Optional[float]:
    t = min(1.0, delta) if delta > 0 else 0.0
    if t <= 0:
        return None
    row = M.row(x)
    for _ in range(NEIGHBORHOOD_HALVINGS):
        if not any(mask >> k & 1 and row[y].evaluate(t) > 1.0 - t for k, y in enumerate(M.carrier)):
            return t
        t /= 2.0
    return None


def _require_steps(M: ProbMetricSpace, x: str) -> None:
    if not all(isinstance(phi, StepDistribution) for phi in M.row(x).values()):
        raise InvalidDistributionError("lambda stabilization needs step entries; exponential rows never stabilize")


def lambda_n(M: ProbMetricSpace, x: str, n: int) -> LambdaTable:
    """lambda_{x,n}(y) = inf{r : alpha(x, y, r) > 1 - 1/n}."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    theta = 1.0 - 1.0 / n
    return LambdaTable(x, int(n), {y: threshold_inf(phi, theta) for y, phi in M.row(x).items()})


def _least_n_reaching(v: float) -> int:
    """Least n >= 1 with 1 - 1/n >= v, for v < 1."""
    def reached(k: int) -> bool:
        return 1.0 - 1.0 / k >= v

    if reached(1):
        return 1
    hi = max(2, math.ceil(1.0 / (1.0 - v)))
    while not reached(hi):
        hi *= 2
    lo = 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if reached(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lambda_breakpoints(M: ProbMetricSpace, x: str) -> List[int]:
    """The n at which lambda_{x,n} can change, starting with 1."""
    _require_steps(M, x)
    points = {1}
    for phi in M.row(x).values():
        for v in phi.values:
            if v < 1.0:
                points.add(_least_n_reaching(v))
    return sorted(points)


def stabilization_index(M: ProbMetricSpace, x: str) -> int:
    """N such that lambda_{x,n} = lambda_{x,N} for every n >= N."""
    return lambda_breakpoints(M, x)[-1]


def delta_via_lambda(M: ProbMetricSpace, x: str, subset: Iterable[str]) -> float:
    """sup over n of min over a in S of lambda_{x,n}(a), with n ranging over the breakpoints."""
    members = list(subset)
    if not members:
        raise ValueError("delta_via_lambda needs a nonempty subset")
    best = 0.0
    for n in lambda_breakpoints(M, x):
        table = lambda_n(M, x, n)
        best = max(best, min(table.values[a] for a in members))
    return best


def check_lambda_basis(
    M: ProbMetricSpace,
    A: Optional[FiniteApproachSpace] = None,
    config: Optional[ConfigManager] = None,
) -> AxiomReport:
    """
    The lambda tables form a basis of the approach system at every point.

    Checks that every lambda_{x,n} at a breakpoint is below delta(x, .) on
    every subset, that the tables increase with n, and that they stabilize.
    """
    if A is None:
        A = derive_delta(M, config)
    _require_size(M.size, _limits(config).max_exhaustive_carrier, "lambda basis checks")
    report = AxiomReport(subject="lambda basis")
    below_witness = directed_witness = stable_witness = None
    for x in M.carrier:
        breakpoints = lambda_breakpoints(M, x)
        tables = [lambda_n(M, x, n) for n in breakpoints]
        for table in tables:
            if below_witness is None:
                check = in_approach_system(A, x, table.values)
                if not check.passed:
                    below_witness = dict(check.witness, n=table.n)
        for lower, upper in zip(tables, tables[1:]):
            bad = next((y for y in M.carrier if lower.values[y] > upper.values[y]), None)
            if bad is not None and directed_witness is None:
                directed_witness = {"x": x, "y": bad, "n": lower.n, "m": upper.n}
        last = tables[-1]
        beyond = lambda_n(M, x, last.n + 1)
        if beyond.values != last.values and stable_witness is None:
            stable_witness = {"x": x, "n": last.n}
    report.add(AxiomCheck("below_delta", below_witness is None, below_witness))
    report.add(AxiomCheck("directed", directed_witness is None, directed_witness))
    report.add(AxiomCheck("stabilizes", stable_witness is None, stable_witness))
    return report


def in_approach_system(A: FiniteApproachSpace, x: str, phi: Mapping[str, float]) -> AxiomCheck:
    """min over a in S of phi(a) <= delta(x, S) for every subset S."""
    i = A.index(x)
    values = [float(phi[y]) for y in A.carrier]
    lows = _min_over_subsets(values)
    for mask in range(1, A.full_mask + 1):
        if lows[mask] > A.delta[i][mask]:
            witness = {"x": x, "S": _labels(A, mask), "phi_min": lows[mask], "delta": A.delta[i][mask]}
            return AxiomCheck("in_approach_system", False, witness)
    return AxiomCheck("in_approach_system", True)


def dominates(
    M: ProbMetricSpace,
    x: str,
    phi: Mapping[str, float],
    eps: float,
    omega: float,
) -> Optional[int]:
    """
    Least n with min(phi(y), omega) <= lambda_{x,n}(y) + eps for every y.

    Returns:
        The least such n, or None when even the stabilized table fails
    """
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    if not (0 < omega < INF):
        raise ValueError(f"omega must be finite and positive, got {omega}")
    for n in lambda_breakpoints(M, x):
        table = lambda_n(M, x, n)
        if all(min(float(phi[y]), omega) <= table.values[y] + eps for y in M.carrier):
            return n
    return None


def gauge_dn(M: ProbMetricSpace, n: int) -> GaugeReport:
    """
    d_n(x, y) = lambda_{x,n}(y), with verdicts on diagonal, symmetry and triangle.

    Raises:
        AxiomViolationError: for a t-norm other than the minimum
    """
    if not M.tnorm.is_minimum:
        logger.error(f"Gauge d_n requested over {M.tnorm.name}")
        raise AxiomViolationError(
            f"gauge d_n needs the minimum t-norm, got {M.tnorm.name}; the uniformity argument composes by min"
        )
    tables = [lambda_n(M, x, n) for x in M.carrier]
    matrix = tuple(tuple(table.values[y] for y in M.carrier) for table in tables)
    labels = M.carrier
    size = M.size
    checks = AxiomReport(subject=f"gauge d_{n}")

    bad = next((i for i in range(size) if matrix[i][i] != 0.0), None)
    checks.add(AxiomCheck("diagonal", bad is None, None if bad is None else {"x": labels[bad]}))

    bad = next(((i, j) for i in range(size) for j in range(size) if matrix[i][j] != matrix[j][i]), None)
    checks.add(AxiomCheck("symmetry", bad is None, None if bad is None else {"x": labels[bad[0]], "y": labels[bad[1]]}))

    bad = next(
        ((i, j, k) for i in range(size) for j in range(size) for k in range(size)
         if matrix[i][k] > matrix[i][j] + matrix[j][k]),
        None,
    )
    witness = None if bad is None else {"x": labels[bad[0]], "y": labels[bad[1]], "z": labels[bad[2]]}
    checks.add(AxiomCheck("triangle", bad is None, witness))
    return GaugeReport(n=int(n), carrier=labels, matrix=matrix, checks=checks)


def is_contraction(f: Mapping[str, str], A: FiniteApproachSpace, B: FiniteApproachSpace) -> AxiomCheck:
    """delta_A(x, S) >= delta_B(f(x), f(S)) for every point and subset."""
    for x in A.carrier:
        if x not in f:
            raise SchemaError(f"map is not defined at '{x}'", "map")
        if f[x] not in B.carrier:
            raise SchemaError(f"image '{f[x]}' of '{x}' is not a point of the target", "map")
    images = [B.index(f[x]) for x in A.carrier]
    image_mask = [0] * (1 << A.size)
    for mask in range(1, 1 << A.size):
        low = (mask & -mask).bit_length() - 1
        image_mask[mask] = image_mask[mask & (mask - 1)] | (1 << images[low])
    for i, x in enumerate(A.carrier):
        for mask in range(1 << A.size):
            source = A.delta[i][mask]
            target = B.delta[images[i]][image_mask[mask]]
            if source < target:
                witness = {"x": x, "S": _labels(A, mask), "source": source, "target": target}
                return AxiomCheck("contraction", False, witness)
    return AxiomCheck("contraction", True)

