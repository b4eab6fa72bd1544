import pytest

from ptrans.cli import example_text
from ptrans.minillvm.parser import parse_program
from ptrans.syntax import parse_transformation


@pytest.fixture(scope="session")
def g1():
    return parse_program(example_text("g1.tcfg"))


@pytest.fixture(scope="session")
def racy():
    return parse_program(example_text("racy.tcfg"))


@pytest.fixture(scope="session")
def rse1():
    return parse_transformation(example_text("rse_phi1.ptrans"))


@pytest.fixture(scope="session")
def rse2():
    return parse_transformation(example_text("rse_phi2.ptrans"))
