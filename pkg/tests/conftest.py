import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

REPO_ROOT = Path(__file__).parent.parent


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-second statistical runs")


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if "test_acceptance.py" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {verdict}: {name}", file=sys.__stdout__, flush=True)


@pytest.fixture(scope="session")
def sample_data_dir() -> Path:
    return REPO_ROOT / "sample_data"


@pytest.fixture(scope="session")
def sample_taxonomy_paths(sample_data_dir) -> list[Path]:
    return sorted((sample_data_dir / "taxonomies").glob("*.json"))


@pytest.fixture(scope="session")
def synthetic_dir(sample_data_dir) -> Path:
    return sample_data_dir / "synthetic"
