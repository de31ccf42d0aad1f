import os
import sys

sys.path.insert(0, os.path.dirname(__file__))  # make oracles importable

import pytest

TOY_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "toy")


@pytest.fixture
def toy_dir(tmp_path):
    """Fresh copy of the bundled toy dataset (expand rewrites the queries file)."""
    import shutil

    dst = tmp_path / "toy"
    shutil.copytree(TOY_DIR, dst)
    return dst
