"""Test configuration loading."""

from __future__ import annotations

from pathlib import Path
from typing import Any
from typing import TYPE_CHECKING

import pytest

from meanequi import ConfigError
from meanequi import Property
from meanequi import load_config
from meanequi import parse_config

if TYPE_CHECKING:
    from collections.abc import Callable


def _field(raw: Any) -> str:
    with pytest.raises(ConfigError) as excinfo:
        parse_config(raw)
    return excinfo.value.field


def test_minimal_config(yaml_doc: Any) -> None:
    """
    systems: [rotation, full_shift]
    properties: [mean_eq, eq_in_mean, theorem_3_8, lemma_6_4]
    seed: 7
    """
    config = parse_config(yaml_doc)
    assert config.system_ids == ("rotation", "full_shift")
    assert config.properties == (Property.MEAN_EQ, Property.EQ_IN_MEAN)
    assert config.checks == ("theorem_3_8", "lemma_6_4")
    assert config.rng_seed == 7
    assert config.check.seed == 7
    assert config.format == "json"
    assert config.output_dir == Path("report")


def test_full_config(yaml_doc: Any) -> None:
    """
    systems: [sturmian]
    properties: [weyl_mean_eq]
    seed: 3
    format: both
    output_dir: out
    grids:
      eps: [0.5, 0.25]
      delta: [0.1, 0.01]
      pairs_per_cell: 4
      window_lengths: [8, 64]
    tolerances:
      ue_margin: 0.3
    catalog:
      squaring_upper: 0.9
      sturmian_alpha: 0.7071067811865476
      sturmian_quotients: [1, 2]
    symbol_memo_cap: 4096
    """
    config = parse_config(yaml_doc)
    assert config.check.eps == (0.5, 0.25)
    assert config.check.delta == (0.1, 0.01)
    assert config.check.pairs_per_cell == 4
    assert config.check.window_lengths == (8, 64)
    assert config.check.ue_margin == 0.3
    assert config.catalog.squaring_upper == 0.9
    assert config.catalog.sturmian_alpha == 0.7071067811865476
    assert config.catalog.sturmian_quotients == (1, 2)
    assert config.catalog.symbol_memo_cap == 4096
    assert config.output_dir == Path("out")

    echo = config.echo()
    assert echo["grids"]["eps"] == [0.5, 0.25]
    assert echo["tolerances"]["ue_margin"] == 0.3
    assert echo["catalog"]["sturmian_quotients"] == [1, 2]
    assert "seed" not in echo["grids"]

    overridden = parse_config(yaml_doc, Path("elsewhere"))
    assert overridden.output_dir == Path("elsewhere")


def test_missing_seed(yaml_doc: Any) -> None:
    """
    systems: [rotation]
    properties: [mean_eq]
    """
    assert _field(yaml_doc) == "seed"


def test_grid_errors(yaml_doc: Any) -> None:
    """
    systems: [rotation]
    properties: [mean_eq]
    seed: 1
    """
    assert _field({**yaml_doc, "grids": {"eps": [0.1, 0.5]}}) == "grids.eps"
    assert _field({**yaml_doc, "grids": {"eps": [0.5, -1]}}) == "grids.eps[1]"
    assert _field({**yaml_doc, "grids": {"foo": 1}}) == "grids.foo"
    assert _field({**yaml_doc, "grids": [1]}) == "grids"
    window_lengths = {"window_lengths": [8, 8]}
    assert (
        _field({**yaml_doc, "grids": window_lengths}) == "grids.window_lengths"
    )
    pairs = {"pairs_per_cell": True}
    assert _field({**yaml_doc, "grids": pairs}) == "grids.pairs_per_cell"


def test_other_errors(yaml_doc: Any) -> None:
    """
    systems: [rotation]
    properties: [mean_eq, transitivity]
    seed: 1
    """
    assert _field(yaml_doc) == "properties[1]"
    valid = {**yaml_doc, "properties": ["mean_eq"]}
    assert _field({**valid, "format": "xml"}) == "format"
    assert _field({**valid, "seed": -1}) == "seed"
    assert _field({**valid, "systems": []}) == "systems"
    assert _field({**valid, "colour": "red"}) == "colour"
    assert _field({**valid, "symbol_memo_cap": 10}) == "symbol_memo_cap"
    catalog = {"sturmian_quotients": [1, 0]}
    assert (
        _field({**valid, "catalog": catalog})
        == "catalog.sturmian_quotients[1]"
    )
    alone = {"sturmian_alpha": 0.7}
    assert _field({**valid, "catalog": alone}) == "catalog"
    assert _field([1, 2]) == "config"


def test_load_config(write_config: Callable[[str], Path]) -> None:
    path = write_config(
        """
        systems: [rotation]
        properties: [mean_eq]
        seed: 0
        """
    )
    assert load_config(path).system_ids == ("rotation",)

    broken = write_config("systems: [rotation\n")
    with pytest.raises(ConfigError) as excinfo:
        load_config(broken)
    assert excinfo.value.field == "config"

    with pytest.raises(ConfigError):
        load_config(path.parent / "missing.yaml")
