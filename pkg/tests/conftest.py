import random
import shutil
from pathlib import Path

import pytest

from smgnash import parse_game

DATA = Path(__file__).parent / "data"


def load(name: str):
    return parse_game((DATA / name).read_text())


@pytest.fixture
def g1():
    return load("g1.json")


@pytest.fixture
def g2():
    return load("g2.json")


@pytest.fixture
def g2_choice():
    return load("g2_choice.json")


@pytest.fixture
def rng():
    return random.Random(20240611)


def z3_command():
    return "z3 -in" if shutil.which("z3") else None


needs_z3 = pytest.mark.skipif(z3_command() is None, reason="z3 binary not installed")
