import hypothesis
import pytest

from authorprof.corpus import generate_synthetic

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")

ACCEPTANCE_LINES = []

TWO_CLASSES = [
    ("canada", ["maple", "hockey", "toque", "loonie"]),
    ("ireland", ["craic", "grand", "feck", "eejit"]),
]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def planted_corpus():
    return generate_synthetic(40, 4, TWO_CLASSES, 200, 0.3, seed=7)


@pytest.fixture(scope="session")
def labeled_corpus():
    classes = [
        ("female:::canada", ["maple", "kitten"]),
        ("male:::canada", ["maple", "league"]),
        ("female:::ireland", ["craic", "kitten"]),
        ("male:::ireland", ["craic", "league"]),
    ]
    return generate_synthetic(40, 4, classes, 200, 0.4, seed=3, label_field="joint")
