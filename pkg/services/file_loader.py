"""JSON input documents: t-norms, spaces, metrics, approach tables and maps."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from models.errors import SchemaError
from models.reports import to_jsonable
from models.spaces import ClassicalMetricSpace, FiniteApproachSpace, ProbMetricSpace, check_carrier
from models.tnorm import OrdinalSumTNorm
from services import approach, probmetric
from services.config_manager import ConfigManager

logger = logging.getLogger(__name__)

FAMILIES = ("chi", "exp")


def read_json(path: str) -> Any:
    """
    Read a JSON document.

    Raises:
        SchemaError: if the file is missing or is not valid JSON (with line and column)
    """
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        logger.error(f"Input file not found: {path}")
        raise SchemaError("file not found", "", str(path))
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {path}: {e}")
        raise SchemaError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", "", str(path))


def write_json(path: str, payload: Any) -> None:
    """Write a report or document; floats keep their shortest round-trip repr."""
    with open(path, 'w') as f:
        json.dump(to_jsonable(payload), f, indent=2)
    logger.info(f"Wrote {path}")


def load_tnorm(spec: str) -> OrdinalSumTNorm:
    """
    Resolve a --tnorm argument.

    Args:
        spec: a name ("min", "product", "lukasiewicz") or the path of a JSON
              file holding a descriptor, bare or under a "tnorm" key
    """
    if Path(spec).is_file():
        data = read_json(spec)
        if isinstance(data, dict) and "tnorm" in data:
            data = data["tnorm"]
        T = OrdinalSumTNorm.from_descriptor(data, spec)
    else:
        T = OrdinalSumTNorm.from_descriptor(spec)
    logger.debug(f"Resolved t-norm {T.name}")
    return T


def metric_from_document(data: Dict[str, Any], source: Optional[str] = None) -> ClassicalMetricSpace:
    return ClassicalMetricSpace.from_dict(data, source)


def space_from_document(
    data: Dict[str, Any],
    source: Optional[str] = None,
    tnorm: Optional[OrdinalSumTNorm] = None,
    waive_p4: bool = False,
) -> ProbMetricSpace:
    """
    Build a space from either document form.

    An "entries" document is a space as it stands. A "distances" document is a
    metric turned into a space by its "family": "chi" (single jump at each
    distance, over the document's or the given t-norm, minimum by default)
    or "exp" (exponential family under the minimum).
    """
    if not isinstance(data, dict):
        raise SchemaError("expected an object", "", source)
    if "entries" in data:
        space = ProbMetricSpace.from_dict(data, source)
        return space.retag(tnorm) if tnorm is not None else space
    if "distances" not in data:
        raise SchemaError("expected 'entries' or 'distances'", "", source)
    family = data.get("family", "chi")
    if family not in FAMILIES:
        raise SchemaError(f"must be one of {', '.join(FAMILIES)}", "family", source)
    D = metric_from_document(data, source)
    if family == "exp":
        return probmetric.exp_family_from_metric(D, waive_p4=waive_p4)
    if tnorm is None:
        tnorm = OrdinalSumTNorm.from_descriptor(data["tnorm"], source) if "tnorm" in data else OrdinalSumTNorm.minimum()
    return probmetric.from_classical_metric(D, tnorm)


def load_space(path: str, tnorm: Optional[OrdinalSumTNorm] = None, waive_p4: bool = False) -> ProbMetricSpace:
    """
    Load a space file.

    Args:
        path: JSON file in either document form
        tnorm: overrides the document's t-norm when given
        waive_p4: allow a pseudo-metric behind an "exp" document
    """
    M = space_from_document(read_json(path), path, tnorm, waive_p4)
    logger.info(f"Loaded space over {M.size} points, t-norm {M.tnorm.name}, from {path}")
    return M


def load_approach(path: str, config: Optional[ConfigManager] = None) -> FiniteApproachSpace:
    """Load a delta table, or derive one from {"derive_from": "<space file>"} (relative to this file)."""
    data = read_json(path)
    if isinstance(data, dict) and "derive_from" in data:
        target = Path(path).parent / str(data["derive_from"])
        return approach.derive_delta(load_space(str(target)), config)
    A = FiniteApproachSpace.from_dict(data, path)
    logger.info(f"Loaded approach table over {A.size} points from {path}")
    return A


def load_map(path: str) -> Dict[str, str]:
    """A point map, {"map": {"x": "y", ...}} or the bare object."""
    data = read_json(path)
    if isinstance(data, dict) and "map" in data:
        data = data["map"]
    if not isinstance(data, dict):
        raise SchemaError("expected an object mapping points to points", "map", path)
    check_carrier(list(data.keys()), path)
    f = {}
    for x, y in data.items():
        if not isinstance(y, str):
            raise SchemaError("image must be a point label", f"map.{x}", path)
        f[x] = y
    return f
