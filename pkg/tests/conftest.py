from __future__ import annotations

from importlib import resources

import pytest

from morphamood.expression import load_default_map


@pytest.fixture(scope="session")
def default_map_text() -> str:
    # the shipped document, untouched by the engine's serializer
    return resources.files("morphamood").joinpath("data/default_map.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def default_map():
    return load_default_map()
