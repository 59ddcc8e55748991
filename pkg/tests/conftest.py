import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ibepair import ibe  # noqa: E402
from ibepair.curve import AffinePoint  # noqa: E402
from ibepair.entropy import SeededEntropy  # noqa: E402
from ibepair.field import PrimeField  # noqa: E402

GOLDEN = Path(__file__).resolve().parent / "golden"


def load_golden(name: str) -> dict[str, str]:
    rows = {}
    for line in (GOLDEN / f"{name}.txt").read_text().splitlines():
        k, _, v = line.partition(" = ")
        rows[k] = v
    return rows


def toy_params(p: int, q: int, P: tuple[int, int], s: int, n: int = 256):
    F = PrimeField(p)
    return ibe.setup_from(p, q, AffinePoint(F(P[0]), F(P[1])), s, n)


@pytest.fixture(scope="session")
def pkg512():
    """One 512-bit / 160-bit PKG shared by the slower tests."""
    return ibe.setup(rng=SeededEntropy(b"pytest-pkg512"))


@pytest.fixture(scope="session")
def pkg256():
    return ibe.setup(ibe.Profile(bits_q=160, bits_p=256), rng=SeededEntropy(b"pytest-pkg256"))


@pytest.fixture
def rng():
    return SeededEntropy(b"pytest")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
