from importlib import resources

import pytest

from retrograde.minilang import parse

CORPUS = resources.files("retrograde") / "corpus"


def corpus_path(name: str) -> str:
    return str(CORPUS / name)


def load(name: str):
    return parse((CORPUS / name).read_text(encoding="utf-8"))


@pytest.fixture
def code1():
    return load("code1.rg")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
