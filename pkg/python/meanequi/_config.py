"""Loading experiment configurations.

A configuration is a YAML mapping, for example::

    systems: [rotation, full_shift]
    properties: [mean_eq, theorem_3_8]
    seed: 7
    format: both
    grids:
      eps: [0.5, 0.25]
      pairs_per_cell: 16

Only ``systems``, ``properties`` and ``seed`` are required. Errors name the
dotted path of the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from dataclasses import fields
from pathlib import Path
from typing import Any
from typing import TYPE_CHECKING

import yaml

from meanequi._catalog import CatalogOptions
from meanequi._checkers import CheckConfig
from meanequi._types import ConfigError
from meanequi._types import Property

if TYPE_CHECKING:
    from collections.abc import Mapping

#: Cross-checks and diagnostics that can be listed next to properties.
CHECKS = (
    "theorem_3_6",
    "theorem_3_8",
    "theorem_5_1",
    "theorem_5_3",
    "mean_l_stability",
    "product_closure",
    "averaged_function_equicontinuity",
    "relation_collapse",
    "weakly_mixing_fixed_point",
    "unique_ergodicity",
    "lemma_6_4",
)

FORMATS = ("json", "csv", "both")

_TOP_LEVEL = {
    "systems",
    "properties",
    "seed",
    "format",
    "output_dir",
    "grids",
    "tolerances",
    "catalog",
    "symbol_memo_cap",
}
_GRIDS = {
    "eps",
    "delta",
    "pairs_per_cell",
    "horizon_numeric",
    "horizon_symbolic",
    "window_lengths",
    "eps_schedule",
    "search_budget",
}
_TOLERANCES = {"banach_proximal_theta", "ue_tail", "ue_margin"}
_CATALOG = {
    "squaring_upper",
    "symbolic_depth",
    "sturmian_alpha",
    "sturmian_quotients",
    "trusted_horizon",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration."""

    system_ids: tuple[str, ...]
    properties: tuple[Property, ...]
    checks: tuple[str, ...]
    rng_seed: int
    check: CheckConfig
    catalog: CatalogOptions = field(default_factory=CatalogOptions)
    output_dir: Path = Path("report")
    format: str = "json"

    def echo(self) -> dict[str, Any]:
        """The configuration as it is recorded in a report."""
        check = {
            f.name: getattr(self.check, f.name) for f in fields(CheckConfig)
        }
        catalog = {
            f.name: getattr(self.catalog, f.name)
            for f in fields(CatalogOptions)
        }
        return {
            "systems": list(self.system_ids),
            "properties": [p.value for p in self.properties],
            "checks": list(self.checks),
            "seed": self.rng_seed,
            "format": self.format,
            "grids": {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in check.items()
                if key not in {"seed", *_TOLERANCES}
            },
            "tolerances": {key: check[key] for key in sorted(_TOLERANCES)},
            "catalog": {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in catalog.items()
            },
        }


def _mapping(value: Any, path: str, allowed: set[str]) -> Mapping[str, Any]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path or "config", "expected a mapping")
    for key in value:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(where, "unknown key")
    return value


def _integer(value: Any, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, "expected an integer")
    if value < minimum:
        raise ConfigError(path, f"must be at least {minimum}")
    return value


def _real(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a number")
    if value <= 0:
        raise ConfigError(path, "must be positive")
    return float(value)


def _reals(value: Any, path: str, *, decreasing: bool) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty list")
    out = tuple(_real(v, f"{path}[{i}]") for i, v in enumerate(value))
    if decreasing and any(b >= a for a, b in zip(out, out[1:], strict=False)):
        raise ConfigError(path, "must be strictly decreasing")
    return out


def _integers(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty list")
    out = tuple(_integer(v, f"{path}[{i}]") for i, v in enumerate(value))
    if any(b <= a for a, b in zip(out, out[1:], strict=False)):
        raise ConfigError(path, "must be strictly increasing")
    return out


def _strings(value: Any, path: str) -> list[str]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty list")
    for index, item in enumerate(value):
        if not isinstance(item, str):
            raise ConfigError(f"{path}[{index}]", "expected a string")
    return value


def _grids(raw: Mapping[str, Any], seed: int) -> CheckConfig:
    grids = _mapping(raw.get("grids"), "grids", _GRIDS)
    tolerances = _mapping(raw.get("tolerances"), "tolerances", _TOLERANCES)
    values: dict[str, Any] = {"seed": seed}
    for key in ("eps", "delta", "eps_schedule"):
        if key in grids:
            values[key] = _reals(grids[key], f"grids.{key}", decreasing=True)
    for key in (
        "pairs_per_cell",
        "horizon_numeric",
        "horizon_symbolic",
        "search_budget",
    ):
        if key in grids:
            values[key] = _integer(grids[key], f"grids.{key}")
    if grids.get("window_lengths") is not None:
        values["window_lengths"] = _integers(
            grids["window_lengths"], "grids.window_lengths"
        )
    for key in _TOLERANCES:
        if key in tolerances:
            values[key] = _real(tolerances[key], f"tolerances.{key}")
    return CheckConfig(**values)


def _catalog(raw: Mapping[str, Any]) -> CatalogOptions:
    options = _mapping(raw.get("catalog"), "catalog", _CATALOG)
    values: dict[str, Any] = {}
    for key in ("squaring_upper", "sturmian_alpha"):
        if key in options:
            values[key] = _real(options[key], f"catalog.{key}")
    for key in ("symbolic_depth", "trusted_horizon"):
        if key in options:
            values[key] = _integer(options[key], f"catalog.{key}")
    if "sturmian_quotients" in options:
        quotients = options["sturmian_quotients"]
        if not isinstance(quotients, list) or not quotients:
            raise ConfigError(
                "catalog.sturmian_quotients", "expected a non-empty list"
            )
        values["sturmian_quotients"] = tuple(
            _integer(q, f"catalog.sturmian_quotients[{i}]")
            for i, q in enumerate(quotients)
        )
    if ("sturmian_alpha" in values) != ("sturmian_quotients" in values):
        raise ConfigError(
            "catalog",
            "sturmian_alpha and sturmian_quotients must be given together",
        )
    if "symbol_memo_cap" in raw:
        values["symbol_memo_cap"] = _integer(
            raw["symbol_memo_cap"], "symbol_memo_cap", 1024
        )
    return CatalogOptions(**values)


def parse_config(
    raw: Any, output_dir: Path | None = None
) -> ExperimentConfig:
    """Validate a parsed YAML document."""
    raw = _mapping(raw, "", _TOP_LEVEL)
    for key in ("systems", "properties", "seed"):
        if key not in raw:
            raise ConfigError(key, "missing required key")
    seed = raw["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", "expected a non-negative integer")
    systems = tuple(_strings(raw["systems"], "systems"))
    properties: list[Property] = []
    checks: list[str] = []
    known = {p.value: p for p in Property}
    for index, name in enumerate(_strings(raw["properties"], "properties")):
        if name in known:
            properties.append(known[name])
        elif name in CHECKS:
            checks.append(name)
        else:
            raise ConfigError(
                f"properties[{index}]", f"unknown property or check {name!r}"
            )
    fmt = raw.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError("format", f"expected one of {', '.join(FORMATS)}")
    if output_dir is None:
        output = raw.get("output_dir", "report")
        if not isinstance(output, str):
            raise ConfigError("output_dir", "expected a path")
        output_dir = Path(output)
    return ExperimentConfig(
        systems,
        tuple(properties),
        tuple(checks),
        seed,
        _grids(raw, seed),
        _catalog(raw),
        output_dir,
        fmt,
    )


def load_config(
    path: str | Path, output_dir: Path | None = None
) -> ExperimentConfig:
    """Load and validate the YAML config at ``path``.

    Args:
        path: The config file.
        output_dir: Overrides the ``output_dir`` of the file.
    """
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as error:
        raise ConfigError("config", f"invalid YAML: {error}") from error
    except OSError as error:
        raise ConfigError("config", str(error)) from error
    return parse_config(raw, output_dir)
