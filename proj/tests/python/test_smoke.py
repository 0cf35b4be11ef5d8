import json
import os
import pathlib

import pytest

import homeo

DATA = pathlib.Path(os.environ.get("HOMEO_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))
STRIPE_L2 = DATA / "weights" / "stripe_l2.json"


def test_moduli_of_stripe_weights():
    m = homeo.moduli(STRIPE_L2)
    assert m["E"] == pytest.approx(1.79504907, rel=1e-8)
    assert m["nu"] == pytest.approx(-0.218904892, rel=1e-8)


def test_moduli_accepts_dict():
    weights = json.loads(STRIPE_L2.read_text())
    assert homeo.moduli(weights)["kappa"] == pytest.approx(homeo.moduli(STRIPE_L2)["kappa"])


def test_simulate_stripe_compression():
    r = homeo.simulate(STRIPE_L2, DATA / "protocols" / "stripe_compression.csv")
    assert len(r["time_h"]) == 401
    assert r["stress"][170][0] > 10.0
    assert r["stress"][171][0] < r["stress"][170][0]
    assert r["stress"][200][1] == 0.0


def test_degenerate_energy_raises():
    weights = json.loads(STRIPE_L2.read_text())
    for key in ("w01", "w02", "w11", "w12"):
        weights[key] = 0.0
    with pytest.raises(homeo.DegenerateMaterial):
        homeo.moduli(weights)


def test_bad_weights_raise_parse_error():
    with pytest.raises(homeo.ParseError):
        homeo.moduli({"w01": 1.0})


def test_verify_passes():
    checks = homeo.verify(seed=2)
    assert checks
    assert all(c["pass"] for c in checks), [c["name"] for c in checks if not c["pass"]]


def test_cli_usage_exit_code():
    code, _, _ = homeo.run_cli(["moduli"])
    assert code == 1
