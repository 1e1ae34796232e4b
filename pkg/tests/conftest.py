import os
from pathlib import Path

import pytest

from xids.config import RunConfig
from xids.pipeline import save_artifacts, train_pipeline
from xids.synthetic import write_dataset

REAL_DATA_SKIP = (
    "real NSL-KDD files not found: place KDDTrain+.txt and KDDTest+.txt in "
    "./data or point XIDS_DATA_DIR at them"
)


def real_data_dir() -> Path | None:
    """Directory holding the real KDDTrain+.txt / KDDTest+.txt, if present."""
    candidates = []
    env = os.environ.get("XIDS_DATA_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for base in candidates:
        if (base / "KDDTrain+.txt").exists() and (base / "KDDTest+.txt").exists():
            return base
    return None


@pytest.fixture(scope="session")
def synthetic_data_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("synth-data")
    write_dataset(out, n_train=3000, n_test=800, seed=0)
    return out


@pytest.fixture(scope="session")
def synthetic_config(synthetic_data_dir) -> RunConfig:
    return RunConfig(
        train_path=str(synthetic_data_dir / "KDDTrain+.txt"),
        test_path=str(synthetic_data_dir / "KDDTest+.txt"),
        n_trees=50,
        subsample_psi=256,
        background_size=40,
        n_coalitions=200,
    )


@pytest.fixture(scope="session")
def trained(synthetic_config):
    return train_pipeline(synthetic_config)


@pytest.fixture(scope="session")
def artifacts_dir(trained, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("artifacts")
    save_artifacts(trained, out)
    return out
