"""Shared session fixtures: the expensive desk-scale training runs.

Both the acceptance criteria and the ablation-direction tests consume
these, so the trainings happen once per pytest session.
"""

import time

import pytest

from geasd.harness import ExperimentConfig, run_experiment


@pytest.fixture(scope="session")
def desk_runs():
    """Comparative runs: three methods, three seeds, 20k-step desk preset."""
    runs = {}
    t0 = time.time()
    for method in ("GEASD-L", "GEAPS", "OMEGA"):
        cfg = ExperimentConfig.desk(method=method, maze="spiral",
                                    seeds=(0, 1, 2))
        runs[method] = run_experiment(cfg)
    runs["elapsed"] = time.time() - t0
    return runs


@pytest.fixture(scope="session")
def transfer_run():
    """Artifacts for cross-maze evaluation, trained at the transfer preset."""
    cfg = ExperimentConfig.transfer(method="GEASD-L", maze="spiral",
                                    seeds=(0, 1, 2))
    return run_experiment(cfg)
