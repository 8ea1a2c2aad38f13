import sys
from pathlib import Path

import pytest

from polyrv.speclang import parse_spec

# make sibling test helpers (genspec, reference_interpreter) importable
sys.path.insert(0, str(Path(__file__).parent))

SPEC_DIR = Path(__file__).parent.parent / "src" / "polyrv" / "specs"


def spec_text(name: str) -> str:
    return (SPEC_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def program1():
    return parse_spec(spec_text("program1.prv"))


@pytest.fixture(scope="session")
def program2():
    return parse_spec(spec_text("program2.prv"))


@pytest.fixture(scope="session")
def program3():
    return parse_spec(spec_text("program3.prv"))


@pytest.fixture(scope="session")
def program4():
    return parse_spec(spec_text("program4.prv"))


@pytest.fixture(scope="session")
def program5():
    return parse_spec(spec_text("program5.prv"))


@pytest.fixture(scope="session")
def mailer_spec():
    return parse_spec(spec_text("mailer.prv"))
