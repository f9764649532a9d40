"""Property suite for ordinal-sum t-norms (the verify-tnorm command)."""
import logging
from typing import Optional

import numpy as np

from models.reports import AxiomCheck, AxiomReport
from models.tnorm import Archetype, OrdinalSumTNorm, transported_iso
from services.config_manager import ConfigManager, ToleranceConfig

logger = logging.getLogger(__name__)

COMMUTATIVITY_POINTS = 101
ASSOCIATIVITY_POINTS = 50
LATTICE_POINTS = 200
TRANSPORT_POINTS = 1000
HOMOMORPHISM_POINTS = 50


def floor_array(T: OrdinalSumTNorm, values) -> np.ndarray:
    """Vectorised idempotent_floor."""
    values = np.asarray(values, dtype=float)
    out = values.copy()
    for interval in T.intervals:
        inside = (values > interval.a) & (values < interval.b)
        out[inside] = interval.a
    return out


def _grid(points: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def _first_index(mask: np.ndarray):
    return tuple(int(i) for i in np.argwhere(mask)[0])


def check_commutativity(T: OrdinalSumTNorm, points: int = COMMUTATIVITY_POINTS) -> AxiomCheck:
    g = _grid(points)
    P, Q = np.meshgrid(g, g, indexing="ij")
    lhs, rhs = T.eval_array(P, Q), T.eval_array(Q, P)
    bad = lhs != rhs
    if bad.any():
        i, j = _first_index(bad)
        return AxiomCheck("commutativity", False, {"p": g[i], "q": g[j], "pq": lhs[i, j], "qp": rhs[i, j]})
    return AxiomCheck("commutativity", True, detail=f"exact on a {points}x{points} grid")


def check_associativity(T: OrdinalSumTNorm, tol: float, points: int = ASSOCIATIVITY_POINTS) -> AxiomCheck:
    g = _grid(points)
    P, Q, R = np.meshgrid(g, g, g, indexing="ij")
    lhs = T.eval_array(T.eval_array(P, Q), R)
    rhs = T.eval_array(P, T.eval_array(Q, R))
    gap = np.abs(lhs - rhs)
    if (gap > tol).any():
        i, j, k = _first_index(gap > tol)
        witness = {"p": g[i], "q": g[j], "r": g[k], "left": lhs[i, j, k], "right": rhs[i, j, k]}
        return AxiomCheck("associativity", False, witness, f"gap above {tol:g}")
    return AxiomCheck("associativity", True, detail=f"max gap {gap.max():.3g} on {points}^3 triples")


def check_monotonicity(T: OrdinalSumTNorm, tol: float, points: int = LATTICE_POINTS) -> AxiomCheck:
    g = _grid(points)
    P, Q = np.meshgrid(g, g, indexing="ij")
    values = T.eval_array(P, Q)
    for axis in (0, 1):
        steps = np.diff(values, axis=axis)
        bad = steps < -tol
        if bad.any():
            i, j = _first_index(bad)
            witness = {"axis": "p" if axis == 0 else "q", "p": g[i], "q": g[j], "drop": -steps[i, j]}
            return AxiomCheck("monotonicity", False, witness)
    return AxiomCheck("monotonicity", True, detail=f"adjacent grid steps on {points}x{points}")


def check_units(T: OrdinalSumTNorm) -> AxiomCheck:
    g = _grid(LATTICE_POINTS)
    ones, zeros = np.ones_like(g), np.zeros_like(g)
    if (T.eval_array(ones, g) != g).any() or (T.eval_array(g, ones) != g).any():
        q = g[np.argmax(T.eval_array(ones, g) != g)]
        return AxiomCheck("unit", False, {"q": q}, "1 is not neutral")
    if (T.eval_array(zeros, g) != 0.0).any():
        q = g[np.argmax(T.eval_array(zeros, g) != 0.0)]
        return AxiomCheck("unit", False, {"q": q}, "0 is not absorbing")
    return AxiomCheck("unit", True, detail="1 neutral and 0 absorbing, exact")


def check_below_minimum(T: OrdinalSumTNorm) -> AxiomCheck:
    g = _grid(LATTICE_POINTS)
    P, Q = np.meshgrid(g, g, indexing="ij")
    bad = T.eval_array(P, Q) > np.minimum(P, Q)
    if bad.any():
        i, j = _first_index(bad)
        return AxiomCheck("below_minimum", False, {"p": g[i], "q": g[j]})
    return AxiomCheck("below_minimum", True)


def check_idempotent_meet(T: OrdinalSumTNorm) -> AxiomCheck:
    """p * q = min(p, q) whenever q is idempotent."""
    g = _grid(LATTICE_POINTS)
    idempotents = sorted(set(T.idempotent_points()) | {q for q in g.tolist() if T.is_idempotent(q)})
    for q in idempotents:
        qs = np.full_like(g, q)
        bad = T.eval_array(g, qs) != np.minimum(g, qs)
        if bad.any():
            p = g[np.argmax(bad)]
            return AxiomCheck("idempotent_meet", False, {"p": p, "q": q, "value": T.eval(p, q)})
    return AxiomCheck("idempotent_meet", True, detail=f"{len(idempotents)} idempotents, exact")


def check_idempotent_eval(T: OrdinalSumTNorm, points: int = LATTICE_POINTS) -> AxiomCheck:
    """q * q == q exactly where is_idempotent(q) holds, on the grid."""
    g = _grid(points)
    diagonal = T.eval_array(g, g) == g
    structural = np.array([T.is_idempotent(q) for q in g.tolist()])
    bad = diagonal != structural
    if bad.any():
        q = g[np.argmax(bad)]
        return AxiomCheck("idempotent_eval", False, {"q": q, "qq": T.eval(q, q), "idempotent": T.is_idempotent(q)})
    return AxiomCheck("idempotent_eval", True, detail=f"exact on {points} points")


def check_floor_wedge(T: OrdinalSumTNorm, points: int = LATTICE_POINTS) -> AxiomCheck:
    """(p * q)^- = min(p^-, q^-) exactly on the grid."""
    g = _grid(points)
    P, Q = np.meshgrid(g, g, indexing="ij")
    lhs = floor_array(T, T.eval_array(P, Q))
    rhs = np.minimum(floor_array(T, P), floor_array(T, Q))
    bad = lhs != rhs
    if bad.any():
        i, j = _first_index(bad)
        return AxiomCheck("floor_wedge", False, {"p": g[i], "q": g[j], "left": lhs[i, j], "right": rhs[i, j]})
    return AxiomCheck("floor_wedge", True, detail=f"exact on a {points}x{points} grid")


def check_k_star(T: OrdinalSumTNorm) -> AxiomCheck:
    k = T.k_star()
    if not T.is_idempotent(k):
        return AxiomCheck("k_star", False, {"k_star": k}, "k* is not idempotent")
    g = _grid(LATTICE_POINTS)
    for q in g[(g > k) & (g < 1.0)].tolist():
        if T.is_idempotent(q):
            return AxiomCheck("k_star", False, {"k_star": k, "idempotent": q}, "idempotent above k*")
    return AxiomCheck("k_star", True, detail=f"k* = {k:g}")


def check_transport(T: OrdinalSumTNorm, tol: float) -> Optional[AxiomCheck]:
    """Round trip and homomorphism of the tail isomorphism; None without a tail interval."""
    tail = T.tail_interval()
    if tail is None:
        return None
    forward, backward = transported_iso(tail)
    archetype = OrdinalSumTNorm.archetype_norm(tail.archetype)
    for x in np.linspace(tail.a, 1.0, TRANSPORT_POINTS).tolist():
        if abs(backward(forward(x)) - x) > tol:
            return AxiomCheck("transport", False, {"x": x, "round_trip": backward(forward(x))}, "round trip")
    if forward(1.0) != 1.0 or backward(1.0) != 1.0:
        return AxiomCheck("transport", False, {"x": 1.0}, "1 is not fixed")
    g = np.linspace(tail.a, 1.0, HOMOMORPHISM_POINTS).tolist()
    for p in g:
        for q in g:
            lhs = forward(T.eval(p, q))
            rhs = archetype.eval(forward(p), forward(q))
            if abs(lhs - rhs) > tol:
                return AxiomCheck("transport", False, {"p": p, "q": q, "left": lhs, "right": rhs}, "homomorphism")
    return AxiomCheck("transport", True, detail=f"tail ({tail.a:g}, 1) onto {tail.archetype.value}")


def check_archetype_order() -> AxiomCheck:
    """Lukasiewicz <= Product <= Minimum pointwise."""
    g = _grid(LATTICE_POINTS)
    P, Q = np.meshgrid(g, g, indexing="ij")
    luk = OrdinalSumTNorm.lukasiewicz().eval_array(P, Q)
    prod = OrdinalSumTNorm.product().eval_array(P, Q)
    bad = (luk > prod) | (prod > np.minimum(P, Q))
    if bad.any():
        i, j = _first_index(bad)
        return AxiomCheck("archetype_order", False, {"p": g[i], "q": g[j]})
    return AxiomCheck("archetype_order", True)


def verify_tnorm(T: OrdinalSumTNorm, config: Optional[ConfigManager] = None) -> AxiomReport:
    """
    Run the t-norm property suite.

    Args:
        T: the t-norm under test
        config: supplies tolerances; defaults apply when omitted

    Returns:
        AxiomReport with one check per property
    """
    tolerances = config.tolerances if config is not None else ToleranceConfig()
    report = AxiomReport(subject=f"t-norm {T.name}")
    report.add(check_units(T))
    report.add(check_commutativity(T))
    report.add(check_associativity(T, tolerances.associativity))
    report.add(check_monotonicity(T, tolerances.monotonicity))
    report.add(check_below_minimum(T))
    report.add(check_idempotent_meet(T))
    report.add(check_idempotent_eval(T))
    report.add(check_floor_wedge(T))
    report.add(check_k_star(T))
    transport = check_transport(T, tolerances.transport_grid)
    if transport is not None:
        report.add(transport)
    if len(T.intervals) == 1 and T.tail_interval() is not None and T.intervals[0].a == 0.0:
        report.add(check_archetype_order())
    logger.info(f"t-norm {T.name}: {len(report.failures)} of {len(report.checks)} checks failed")
    return report
