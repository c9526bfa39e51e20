import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fixture_repo import build_fixture  # noqa: E402

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "goldens")


@pytest.fixture(scope="session")
def fixture_project(tmp_path_factory):
    base = tmp_path_factory.mktemp("fixture")
    repo, metadata = build_fixture(str(base))
    return repo, metadata


@pytest.fixture()
def fixture_history(fixture_project):
    from revrec.history import load_history

    repo, metadata = fixture_project
    return load_history(metadata, repo)


def golden_path(name: str) -> str:
    return os.path.join(GOLDEN_DIR, name)


def read_golden(name: str) -> str:
    with open(golden_path(name), "r", encoding="utf-8") as fh:
        return fh.read()
