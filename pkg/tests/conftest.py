"""Test fixtures."""

from __future__ import annotations

from textwrap import dedent
from typing import Any
from typing import TYPE_CHECKING

import pytest
import yaml

from meanequi import CheckConfig
from meanequi import IndexTrace
from meanequi import ScanCache
from meanequi import build_catalog
from meanequi import find_entry

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from meanequi import CatalogEntry


@pytest.fixture(scope="session")
def catalog() -> list[CatalogEntry]:
    """The default catalog, shared by all tests."""
    return build_catalog()


@pytest.fixture(scope="session")
def entry(catalog: list[CatalogEntry]) -> Callable[[str], CatalogEntry]:
    """Look up catalog entries by id."""
    return lambda id_: find_entry(catalog, id_)


@pytest.fixture(scope="session")
def small_config() -> CheckConfig:
    """Coarse grids and short horizons for quick scans."""
    return CheckConfig(
        eps=(0.5, 0.25),
        delta=tuple(2.0**-k for k in range(1, 9)),
        pairs_per_cell=8,
        horizon_numeric=2000,
        horizon_symbolic=4096,
    )


@pytest.fixture(scope="session")
def small_cache(small_config: CheckConfig) -> ScanCache:
    """Verdicts for ``small_config``, shared across tests."""
    return ScanCache(small_config)


@pytest.fixture
def runs_doc(request: pytest.FixtureRequest) -> IndexTrace:
    """Parse the docstring as alternating run lengths."""
    return IndexTrace.from_runs(dedent(request.function.__doc__))


@pytest.fixture
def yaml_doc(request: pytest.FixtureRequest) -> Any:
    """Load the docstring as a YAML document."""
    return yaml.safe_load(dedent(request.function.__doc__))


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str], Path]:
    """Write a YAML config to a temporary file."""

    def write(contents: str) -> Path:
        path = tmp_path / "config.yaml"
        path.write_text(dedent(contents), encoding="utf-8")
        return path

    return write
