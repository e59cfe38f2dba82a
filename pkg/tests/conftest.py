import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riskgraph import load_builtin, parse_graph

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def din():
    return load_builtin("din-vde-0831-104")


@pytest.fixture(scope="session")
def iso():
    return load_builtin("iso-sae-21434")


@pytest.fixture(scope="session")
def clc():
    return load_builtin("clc-ts-50701")


@pytest.fixture(scope="session")
def weiss_din_text():
    return (FIXTURES / "weiss-din.rag").read_text(encoding="utf-8")


@pytest.fixture()
def weiss_din(weiss_din_text):
    return parse_graph(weiss_din_text)


@pytest.fixture()
def weiss_iso():
    return parse_graph((FIXTURES / "weiss-iso.rag").read_text(encoding="utf-8"))


@pytest.fixture()
def weiss_clc():
    return parse_graph((FIXTURES / "weiss-clc.rag").read_text(encoding="utf-8"))
