import pytest


def pytest_addoption(parser):
    parser.addoption("--runstretch", action="store_true", default=False,
                     help="run optional multi-hour stretch targets")


def pytest_collection_modifyitems(config, items):
    skip_stretch = pytest.mark.skip(reason="needs --runstretch")
    for item in items:
        if "stretch" in item.keywords and not config.getoption("--runstretch"):
            item.add_marker(skip_stretch)


@pytest.fixture
def report_line(capsys):
    """Print a line to the live terminal, bypassing output capture (used for
    the one-line acceptance verdicts)."""
    def _emit(line):
        with capsys.disabled():
            print(line, flush=True)
    return _emit
