import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("BURGERS_RELAX_CLI") or shutil.which("burgers-relax")
    if not path:
        candidate = ROOT / "build" / "tools" / "burgers-relax"
        path = str(candidate) if candidate.exists() else None
    if not path:
        pytest.skip("burgers-relax executable not found")
    return path


@pytest.fixture(scope="session")
def configs():
    return pathlib.Path(os.environ.get("BURGERS_CONFIG_DIR", ROOT / "configs"))
