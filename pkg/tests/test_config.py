import json

import pytest
from hypothesis import given, settings, strategies as st

from neural_pulse.config import RunConfig
from neural_pulse.errors import ConfigError

BASE = {"kernel": {"type": "exponential", "rho": 1.0}, "theta": 0.25, "gamma": 0.2}


def test_defaults_and_sections():
    cfg = RunConfig.from_dict({**BASE, "solver": {"tol": 1e-11},
                               "verification": {"z0": 9.0}})
    assert cfg.solver.tol == 1e-11 and cfg.solver.max_iter == 50
    assert cfg.verification.z0 == 9.0 and cfg.verification.hausdorff_bound == 0.25
    assert cfg.epsilons == [0.04, 0.02, 0.01, 0.005]


@settings(max_examples=30)
@given(st.floats(0.01, 0.49), st.floats(1e-4, 0.05), st.integers(1, 16),
       st.sampled_from(["json", "csv", "both"]), st.floats(1e-14, 1e-6))
def test_round_trip(theta, eps, workers, fmt, tol):
    cfg = RunConfig.from_dict({**BASE, "theta": theta, "epsilon": eps, "workers": workers,
                               "format": fmt, "solver": {"tol": tol}})
    again = RunConfig.from_dict(json.loads(cfg.dumps()))
    assert again == cfg


@pytest.mark.parametrize("bad", [
    {"theta": 0.25, "gamma": 0.2},
    {**BASE, "colour": "red"},
    {**BASE, "solver": {"tol": -1.0}},
    {**BASE, "solver": {"tolerance": 1.0}},
    {**BASE, "format": "xml"},
    {**BASE, "epsilons": [0.01, -0.01]},
    {**BASE, "theta": "a quarter"},
    {**BASE, "simulator": 3},
    [1, 2],
])
def test_rejects(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_load_errors(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(p)
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "none.json")
    p.write_text(json.dumps(BASE))
    assert RunConfig.load(p).base_dir == str(tmp_path)
