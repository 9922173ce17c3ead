from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tunescope import ParameterSchema, SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def storage_dataset():
    """Mid-size planted dataset shared by filter/search tests."""
    spec = SyntheticSpec(
        parameters=(
            ParameterSchema("Workload", ("dbsrvr", "mailsvr", "websrvr", "fileserver")),
            ParameterSchema("FileSystem", ("ext2", "ext3", "ext4", "xfs")),
            ParameterSchema("BlockSize", ("1024", "2048", "4096"), ordinal=True),
            ParameterSchema("Device", ("hdd", "ssd")),
        ),
        rows=5000,
        effects=(8.0, 4.0, 2.0, 0.5),
        noise_sd=1.0,
        repeat_runs=5,
        base=100.0,
        target_name="Throughput",
    )
    dataset, truth = generate_synthetic(spec, seed=11)
    return dataset, truth


@pytest.fixture()
def fig_csv() -> bytes:
    """Four-row toy with a single four-level parameter."""
    return (
        b"FS,Throughput\n"
        b"Ext2,100.5\n"
        b"Ext3,101.5\n"
        b"Ext4,99.0\n"
        b"nilfs2,98.25\n"
    )


def random_dataset(rng: np.random.Generator, rows: int, n_params: int, max_levels: int = 8):
    """Small random planted dataset for property sweeps."""
    params = tuple(
        ParameterSchema(
            f"p{i}", tuple(f"l{j}" for j in range(int(rng.integers(2, max_levels + 1))))
        )
        for i in range(n_params)
    )
    spec = SyntheticSpec(
        parameters=params,
        rows=rows,
        effects=tuple(float(rng.uniform(0, 10)) for _ in range(n_params)),
        noise_sd=float(rng.uniform(0, 2)),
        repeat_runs=1,
        base=float(rng.uniform(-50, 50)),
    )
    return generate_synthetic(spec, seed=int(rng.integers(0, 2**31)))
