from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

SIX_VERSES = [
    "Escribí en el arenal",
    "los tres nombres de la vida:",
    "vida, muerte, amor.",
    "Una ráfaga de mar,",
    "tantas claras veces da,",
    "vino y nos borró.",
]
EXAMPLE_ES = "cubra de nieve la hermosa cumbre"
EXAMPLE_EN = "Our foes to conquer on th’ embattled plain;"
EXAMPLE_DE = "Leise lausch’ ich an der Thür"


def read_tsv(name: str) -> list[list[str]]:
    rows = []
    with open(FIXTURES / name, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                rows.append(line.rstrip("\n").split("\t"))
    return rows


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# acceptance gate lines, printed again at the end of the run
GATES: dict[str, str] = {}


def gate(number: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
    GATES[f"{number:02d}"] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if GATES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(GATES):
            terminalreporter.write_line(GATES[key])
