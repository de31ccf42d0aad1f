import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

TOY_DIR = Path(__file__).resolve().parents[2] / "data" / "toy"


@pytest.fixture(scope="session")
def toy_export(tmp_path_factory) -> dict[str, Path]:
    """Run the retrieval pipeline's index/expand/score steps on the toy
    dataset and return the file paths the reranker consumes."""
    root = tmp_path_factory.mktemp("toy_export")
    data = root / "toy"
    shutil.copytree(TOY_DIR, data)
    config_path = data / "config.json"
    config = json.loads(config_path.read_text())
    config["workdir"] = str(root / "work")
    config_path.write_text(json.dumps(config))
    for step in ("index", "expand", "score"):
        subprocess.run(
            [sys.executable, "-m", "statuterank.cli", step, "--config", str(config_path)],
            check=True,
            capture_output=True,
        )
    return {
        "queries": data / "queries.jsonl",
        "corpus": data / "corpus.jsonl",
        "qrels": data / "qrels.tsv",
        "rankings": root / "work" / "export" / "bm25_top.tsv",
    }
