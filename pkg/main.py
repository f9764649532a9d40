#!/usr/bin/env python3
"""
Probabilistic metrizability toolkit

Command-line verifier for continuous t-norms, finite probabilistic metric
spaces, the approach structures they induce and the re-metrization
transforms between t-norms.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

DEFAULT_MANIFEST = Path(__file__).parent / "corpus" / "manifest.json"
DEFAULT_RADII = (0.125, 0.25, 0.5, 1.0)
DEFAULT_NS = (1, 2, 5, 10)
TRANSFORMS = ("min-retag", "luk-to-prod", "prod-to-luk", "tail-rescale", "project-min", "remetrize")


def setup_logging(verbose: bool = False) -> None:
    """Configure application logging; reports own stdout."""
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=log_format,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )

    # Reduce noise from numerics
    logging.getLogger("numpy").setLevel(logging.WARNING)


def check_dependencies() -> bool:
    """Check that required dependencies are installed."""
    missing = []

    try:
        import numpy
    except ImportError:
        missing.append("numpy")

    try:
        import rich
    except ImportError:
        missing.append("rich")

    if missing:
        print(f"Missing required dependencies: {', '.join(missing)}", file=sys.stderr)
        print("\nInstall them with:", file=sys.stderr)
        print(f"  pip install {' '.join(missing)}", file=sys.stderr)
        return False

    return True


def _split_list(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [item.strip() for item in text.split(",") if item.strip()]


def _floats(text: Optional[str], flag: str) -> List[float]:
    try:
        return [float(item) for item in _split_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects a comma list of numbers, got {text!r}")


def _ints(text: Optional[str], flag: str) -> List[int]:
    try:
        return [int(item) for item in _split_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects a comma list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmetric",
        description="Verify t-norms, probabilistic metric spaces and re-metrization transforms.",
    )
    parser.add_argument("--config", help="configuration file (default: config.json next to main.py)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    parser.add_argument("--out", help="also write the machine-readable report to this JSON file")
    parser.add_argument("--max-carrier", type=int, help="raise the carrier caps for tables and exhaustive checks")

    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, help_text: str, space: bool = True, approach: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if space:
            inputs = p.add_mutually_exclusive_group(required=True) if approach else p
            inputs.add_argument("--space", required=not approach, help="space file (entries or distances document)")
            if approach:
                inputs.add_argument("--approach", help="approach table file (delta table or derive_from document)")
            p.add_argument("--tnorm", help="override the space's t-norm (name or descriptor file)")
            p.add_argument("--waive-p4", action="store_true", help="accept pseudo-metric spaces")
        return p

    p = verb("verify-tnorm", "run the t-norm property suite", space=False)
    p.add_argument("--tnorm", required=True, help="t-norm name or descriptor file")

    verb("verify-space", "check the probabilistic metric axioms")

    p = verb("derive", "derive the approach distance table", approach=True)
    p.add_argument("--grid", help="also compare against the grid oracle: t_max,resolution")

    p = verb("closure", "closure of subsets under the derived approach distance", approach=True)
    p.add_argument("--subset", help="comma list; omit for every subset")

    p = verb("neighborhoods", "strong-topology neighborhoods U_x(t)")
    p.add_argument("--t", help="comma list of radii")
    p.add_argument("--point", help="restrict to one point")

    p = verb("transform", "run a re-metrization transform")
    p.add_argument("pipeline", choices=TRANSFORMS)
    p.add_argument("--target", choices=("min", "product"), help="remetrize target")
    p.add_argument("--to", dest="to_tnorm", help="min-retag target, or tail-rescale back onto this t-norm")

    verb("classify", "report which re-metrization certificates hold")

    p = verb("nonexpansive", "check that a point map does not stretch distances")
    p.add_argument("--into", required=True, help="target space file (re-tagged with the source t-norm)")
    p.add_argument("--map", dest="map_file", required=True, help="point map file")

    p = verb("gauge", "gauge metrics d_n (minimum t-norm)")
    p.add_argument("--n", help="comma list of n")

    p = verb("lambda", "lambda tables and the basis check")
    p.add_argument("--n", help="comma list of n; default: breakpoints")
    p.add_argument("--point", help="restrict to one point")

    p = verb("corpus", "replay a corpus manifest", space=False)
    p.add_argument("--manifest", default=str(DEFAULT_MANIFEST))
    p.add_argument("--seed", type=int, help="replay a single seed instead of the manifest")
    p.add_argument("--tnorm", default="min", help="t-norm for --seed")
    p.add_argument("--points", type=int, default=4, help="carrier size for --seed")
    return parser


Outcome = Tuple[bool, Any]


def _load_space(args, config):
    from services import file_loader

    tnorm = file_loader.load_tnorm(args.tnorm) if getattr(args, "tnorm", None) else None
    return file_loader.load_space(args.space, tnorm, waive_p4=args.waive_p4)


def _load_delta(args, config):
    """(space, table): the table is read from --approach or derived from --space."""
    from services import approach, file_loader

    if getattr(args, "approach", None):
        return None, file_loader.load_approach(args.approach, config)
    M = _load_space(args, config)
    return M, approach.derive_delta(M, config)


def run_verify_tnorm(args, config, console) -> Outcome:
    from services import file_loader, tnorm_checks
    from ui import text_report

    T = file_loader.load_tnorm(args.tnorm)
    report = tnorm_checks.verify_tnorm(T, config)
    text_report.render_axiom_report(console, report)
    return report.passed, report.to_dict()


def run_verify_space(args, config, console) -> Outcome:
    from services import probmetric
    from ui import text_report

    M = _load_space(args, config)
    report = probmetric.check_axioms(M, config, waive_p4=args.waive_p4)
    text_report.render_axiom_report(console, report)
    return report.passed, report.to_dict()


def run_derive(args, config, console) -> Outcome:
    from models.reports import AxiomCheck
    from services import approach, oracle
    from ui import text_report

    M, A = _load_delta(args, config)
    report = approach.check_axioms(A, config)
    if args.grid:
        if M is None:
            raise argparse.ArgumentTypeError("--grid needs --space")
        g = oracle.GridSpec.parse(args.grid)
        worst = None
        for i, x in enumerate(A.carrier):
            for mask in range(1, A.full_mask + 1):
                approx = oracle.grid_delta_oracle(M, x, A.labels_of(mask), g)
                exact = A.delta[i][mask]
                gap = 0.0 if approx == exact else abs(approx - exact)
                if exact >= g.t_max:
                    gap = 0.0
                if gap > g.pitch + oracle.CONTRACT_SLACK and worst is None:
                    worst = {"x": x, "S": list(A.labels_of(mask)), "exact": exact, "grid": approx}
        report.add(AxiomCheck("grid_oracle", worst is None, worst, f"within one pitch {g.pitch:g}", sampled=True))
    text_report.render_delta_table(console, A)
    text_report.render_axiom_report(console, report)
    return report.passed, {"delta": A.to_dict(), "axioms": report.to_dict()}


def run_closure(args, config, console) -> Outcome:
    from services import approach
    from ui import text_report

    _, A = _load_delta(args, config)
    subset = _split_list(args.subset)
    if subset:
        rows = [(tuple(subset), approach.closure(A, subset))]
    else:
        rows = [(A.labels_of(mask), A.labels_of(approach.closure_mask(A, mask))) for mask in range(A.full_mask + 1)]
    report = approach.check_closure_operator(A, config)
    text_report.render_closures(console, rows)
    text_report.render_axiom_report(console, report)
    payload = {"closures": [{"S": list(s), "closure": list(c)} for s, c in rows], "checks": report.to_dict()}
    return report.passed, payload


def run_neighborhoods(args, config, console) -> Outcome:
    from services import approach
    from ui import text_report

    M = _load_space(args, config)
    radii = _floats(args.t, "--t") or list(DEFAULT_RADII)
    points = [args.point] if args.point else list(M.carrier)
    payload: Dict[str, Any] = {"neighborhoods": {}}
    for x in points:
        rows = [(t, approach.neighborhood(M, x, t)) for t in radii]
        text_report.render_neighborhoods(console, x, rows)
        payload["neighborhoods"][x] = [{"t": t, "points": list(u)} for t, u in rows]
    report = approach.check_strong_topology(M, ts=radii, config=config)
    text_report.render_axiom_report(console, report)
    payload["checks"] = report.to_dict()
    return report.passed, payload


def run_transform(args, config, console) -> Outcome:
    from services import file_loader, transforms
    from ui import text_report

    M = _load_space(args, config)
    to_tnorm = file_loader.load_tnorm(args.to_tnorm) if args.to_tnorm else None
    pipeline = args.pipeline
    if pipeline == "min-retag":
        if to_tnorm is None:
            raise argparse.ArgumentTypeError("min-retag needs --to")
        report = transforms.min_retag(M, to_tnorm, config)
    elif pipeline == "luk-to-prod":
        report = transforms.luk_to_prod(M, config)
    elif pipeline == "prod-to-luk":
        report = transforms.prod_to_luk(M, config)
    elif pipeline == "tail-rescale":
        if to_tnorm is None:
            report = transforms.tail_rescale_up(M, config=config)
        else:
            report = transforms.tail_rescale_down(M, to_tnorm, config=config)
    elif pipeline == "project-min":
        report = transforms.idempotent_projection(M, config)
    else:
        if args.target is None:
            raise argparse.ArgumentTypeError("remetrize needs --target")
        report = transforms.remetrize(M, args.target, config)
    text_report.render_transform_report(console, report)
    return report.passed, report.to_dict()


def run_nonexpansive(args, config, console) -> Outcome:
    from models.reports import AxiomReport
    from services import file_loader, probmetric
    from ui import text_report

    M = _load_space(args, config)
    N = file_loader.load_space(args.into, M.tnorm, waive_p4=args.waive_p4)
    f = file_loader.load_map(args.map_file)
    report = AxiomReport(subject=f"map {args.map_file}")
    report.add(probmetric.check_nonexpansive(f, M, N, config.tolerances.order))
    text_report.render_axiom_report(console, report)
    return report.passed, report.to_dict()


def run_classify(args, config, console) -> Outcome:
    from services import transforms
    from ui import text_report

    M = _load_space(args, config)
    report = transforms.classify(M, config)
    witness = transforms.wedgesup_witness(M.tnorm)
    text_report.render_classification(console, report)
    text_report.render_wedge_witness(console, witness)
    payload = report.to_dict()
    payload["wedgesup_witness"] = witness.to_dict() if witness else None
    return report.passed, payload


def run_gauge(args, config, console) -> Outcome:
    from services import approach
    from ui import text_report

    M = _load_space(args, config)
    reports = [approach.gauge_dn(M, n) for n in (_ints(args.n, "--n") or list(DEFAULT_NS))]
    for report in reports:
        text_report.render_gauge(console, report)
    return all(r.passed for r in reports), {"gauges": [r.to_dict() for r in reports]}


def run_lambda(args, config, console) -> Outcome:
    from services import approach
    from ui import text_report

    M = _load_space(args, config)
    ns = _ints(args.n, "--n")
    points = [args.point] if args.point else list(M.carrier)
    payload: Dict[str, Any] = {"tables": {}, "stabilization": {}}
    for x in points:
        tables = [approach.lambda_n(M, x, n) for n in (ns or approach.lambda_breakpoints(M, x))]
        text_report.render_lambda_tables(console, tables)
        payload["tables"][x] = [table.to_dict() for table in tables]
        payload["stabilization"][x] = approach.stabilization_index(M, x)
    report = approach.check_lambda_basis(M, config=config)
    text_report.render_axiom_report(console, report)
    payload["checks"] = report.to_dict()
    return report.passed, payload


def run_corpus(args, config, console) -> Outcome:
    from services import file_loader, oracle
    from ui import text_report

    if args.seed is not None:
        T = file_loader.load_tnorm(args.tnorm)
        entries = [{"seed": args.seed, "tnorm": T.to_dict(), "n_points": args.points}]
    else:
        entries = oracle.load_manifest(args.manifest)
    results = oracle.replay_manifest(entries, config)
    text_report.render_corpus(console, results)
    return all(r.passed for r in results), {"entries": [r.to_dict() for r in results]}


HANDLERS: Dict[str, Callable[..., Outcome]] = {
    "verify-tnorm": run_verify_tnorm,
    "verify-space": run_verify_space,
    "derive": run_derive,
    "closure": run_closure,
    "neighborhoods": run_neighborhoods,
    "transform": run_transform,
    "classify": run_classify,
    "nonexpansive": run_nonexpansive,
    "gauge": run_gauge,
    "lambda": run_lambda,
    "corpus": run_corpus,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main application entry point.

    Returns:
        0 when every check passes, 1 when a check fails, 2 on input or configuration errors
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    # Set up logging
    setup_logging(args.verbose)

    # Check dependencies
    if not check_dependencies():
        return 2

    # Import after dependency check
    from rich.console import Console

    from models.errors import ToolkitError
    from services.config_manager import ConfigManager
    from services.file_loader import write_json

    try:
        config = ConfigManager(args.config)
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        return 2
    if args.max_carrier is not None:
        config.set_value("limits", "max_table_carrier", args.max_carrier)
        config.set_value("limits", "max_exhaustive_carrier", args.max_carrier)
    errors = config.get_validation_errors()
    if errors:
        for error in errors:
            logger.error(f"Configuration error: {error}")
        return 2

    console = Console()
    try:
        passed, payload = HANDLERS[args.verb](args, config, console)
    except (ToolkitError, argparse.ArgumentTypeError, KeyError, ValueError) as e:
        logger.error(f"{args.verb} failed: {e}")
        return 2

    if args.out:
        write_json(args.out, payload)
    logger.info(f"{args.verb}: {'passed' if passed else 'failed'}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
