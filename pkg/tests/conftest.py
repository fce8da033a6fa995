import pytest

from trbeam.experiments import ExperimentConfig, run_experiment


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    """Tiny-scale artifacts for all seven experiments in one directory."""
    out = tmp_path_factory.mktemp("artifacts")
    for name in ("time-compression", "le-sweep", "params-vs-l",
                 "focusing-table", "ber-approx", "ber-tr-vs-etr",
                 "ber-scenarios"):
        run_experiment(ExperimentConfig(experiment=name, out_dir=out,
                                        seed=3, realizations=4,
                                        symbols=1500))
    return out
