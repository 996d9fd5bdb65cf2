"""JSON system-configuration I/O and validation."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..exceptions import ConfigValidationError
from ..models.system import (
    CentralServer,
    ClientProfile,
    LearningConstants,
    RoutingVector,
    SystemConfig,
    uniform_routing,
)

logger = logging.getLogger(__name__)

SIMPLEX_TOLERANCE = 1e-9
MIN_PROBABILITY = 1e-12

PathLike = Union[str, Path]


def _number(data: Dict[str, Any], key: str, where: str, default: Optional[float] = None) -> float:
    if key not in data:
        if default is None:
            raise ConfigValidationError(f"{where}: missing field '{key}'")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"{where}: field '{key}' must be a number, got {value!r}")
    return float(value)


def _check_rate(value: float, name: str) -> None:
    if not math.isfinite(value) or value <= 0:
        raise ConfigValidationError(f"non-positive rate: {name}={value}")


def _check_power(value: float, name: str) -> None:
    if not math.isfinite(value) or value < 0:
        raise ConfigValidationError(f"negative power: {name}={value}")


def validate_routing(p) -> RoutingVector:
    """
    Check a routing vector and renormalize it onto the simplex.

    Args:
        p: Routing entries

    Returns:
        RoutingVector summing to 1

    Raises:
        ConfigValidationError: Entry <= 1e-12 or sum off by more than 1e-9
    """
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigValidationError(f"routing must be a non-empty list, got {p!r}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= MIN_PROBABILITY):
        raise ConfigValidationError(f"routing entries must be > {MIN_PROBABILITY}, got {arr.tolist()}")
    total = float(arr.sum())
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise ConfigValidationError(f"routing sums to {total!r}, off by more than {SIMPLEX_TOLERANCE}")
    if abs(total - 1.0) <= MIN_PROBABILITY:
        return RoutingVector(p=tuple(float(v) for v in arr))
    return RoutingVector.from_array(arr)


def validate_system_config(config: SystemConfig) -> SystemConfig:
    """
    Validate every invariant of a SystemConfig.

    Args:
        config: Configuration to check

    Returns:
        The configuration with its routing renormalized

    Raises:
        ConfigValidationError: On the first violated invariant
    """
    if len(config.clients) < 1:
        raise ConfigValidationError("config needs at least one client")
    for i, client in enumerate(config.clients):
        _check_rate(client.mu_d, f"clients[{i}].mu_d")
        _check_rate(client.mu_c, f"clients[{i}].mu_c")
        _check_rate(client.mu_u, f"clients[{i}].mu_u")
        _check_power(client.p_d, f"clients[{i}].p_d")
        _check_power(client.p_c, f"clients[{i}].p_c")
        _check_power(client.p_u, f"clients[{i}].p_u")
    if len(config.routing) != len(config.clients):
        raise ConfigValidationError(
            f"routing has {len(config.routing)} entries for {len(config.clients)} clients"
        )
    routing = validate_routing(config.routing.p)
    if isinstance(config.m, bool) or not isinstance(config.m, (int, np.integer)) or config.m < 1:
        raise ConfigValidationError(f"concurrency must be an integer >= 1, got m={config.m!r}")
    if config.cs is not None:
        _check_rate(config.cs.mu_cs, "cs.mu_cs")
        _check_power(config.cs.p_cs, "cs.p_cs")
    return SystemConfig(clients=tuple(config.clients), routing=routing, m=int(config.m), cs=config.cs)


def system_config_from_dict(data: Dict[str, Any]) -> SystemConfig:
    """
    Build and validate a SystemConfig from its JSON object.

    A missing "routing" field means uniform routing.
    """
    if not isinstance(data, dict):
        raise ConfigValidationError(f"config must be a JSON object, got {type(data).__name__}")
    raw_clients = data.get("clients")
    if not isinstance(raw_clients, list) or not raw_clients:
        raise ConfigValidationError("config needs a non-empty 'clients' list")

    clients = []
    for i, entry in enumerate(raw_clients):
        where = f"clients[{i}]"
        if not isinstance(entry, dict):
            raise ConfigValidationError(f"{where} must be an object")
        clients.append(
            ClientProfile(
                mu_d=_number(entry, "mu_d", where),
                mu_c=_number(entry, "mu_c", where),
                mu_u=_number(entry, "mu_u", where),
                p_d=_number(entry, "p_d", where, 0.0),
                p_c=_number(entry, "p_c", where, 0.0),
                p_u=_number(entry, "p_u", where, 0.0),
            )
        )

    routing_data = data.get("routing")
    if routing_data is None:
        routing = uniform_routing(len(clients))
    else:
        if not isinstance(routing_data, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in routing_data
        ):
            raise ConfigValidationError(f"'routing' must be a list of numbers, got {routing_data!r}")
        routing = RoutingVector(p=tuple(float(v) for v in routing_data))

    cs_data = data.get("cs")
    cs = None
    if cs_data is not None:
        if not isinstance(cs_data, dict):
            raise ConfigValidationError("'cs' must be an object or null")
        cs = CentralServer(mu_cs=_number(cs_data, "mu_cs", "cs"), p_cs=_number(cs_data, "p_cs", "cs", 0.0))

    if "m" not in data:
        raise ConfigValidationError("config needs the concurrency 'm'")
    return validate_system_config(SystemConfig(clients=tuple(clients), routing=routing, m=data["m"], cs=cs))


def _read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"cannot parse {path}: {e}") from e


def load_system_config(path: PathLike) -> SystemConfig:
    """
    Load and validate a system configuration file.

    Args:
        path: JSON file following the config schema

    Returns:
        Validated SystemConfig

    Raises:
        ConfigValidationError: Parse error or violated invariant
        OSError: If the file cannot be read
    """
    config = system_config_from_dict(_read_json(path))
    logger.info("loaded config %s: n=%d m=%d cs=%s", path, config.n, config.m, config.cs is not None)
    return config


def load_learning_constants(path: PathLike) -> Optional[LearningConstants]:
    """Optional "constants" block of a config file, or None."""
    data = _read_json(path).get("constants")
    if data is None:
        return None
    try:
        consts = LearningConstants.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigValidationError(f"invalid 'constants' block in {path}: {e}") from e
    if consts.l_smooth <= 0 or min(consts.delta, consts.sigma, consts.m_dissim, consts.g_bound) < 0:
        raise ConfigValidationError(f"invalid learning constants: {consts}")
    return consts


def save_system_config(config: SystemConfig, path: PathLike) -> str:
    """
    Write a configuration as JSON; floats are written with full precision.

    Args:
        config: Configuration to save
        path: Target file

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config.to_dict(), f, indent=2)
        f.write("\n")
    return str(path)
