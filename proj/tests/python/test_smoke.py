"""Smoke tests for the Python module (built by CMake; PYTHONPATH points at
the build tree when run through the test driver)."""

import json

import _nsmem


def test_version():
    assert _nsmem.version().startswith("nsmem ")


def test_config_round_trip():
    text = _nsmem.default_config()
    cfg = json.loads(text)
    assert cfg["schema_version"] == 1
    assert cfg["grid"]["N"] == 32
    # normalization is idempotent
    assert _nsmem.normalize_config(text) == text


def test_unknown_key_rejected():
    try:
        _nsmem.normalize_config('{"grid": {"M": 3}}')
    except RuntimeError as e:
        assert "grid.M" in str(e)
    else:
        raise AssertionError("unknown key was accepted")


def test_simulate_deterministic_and_decaying():
    cfg = json.dumps(
        {
            "physics": {"forcing": {"amplitude": 0.0}},
            "noise": {"epsilon": 0.0},
            "integration": {"t_end": 0.2},
        }
    )
    a = _nsmem.simulate_csv(cfg)
    b = _nsmem.simulate_csv(cfg)
    assert a == b
    header = a.splitlines()[0]
    assert header.startswith("t,v_H,v_V,eta_M,psi_H,z,beta1")
    # zero data, zero forcing, zero noise amplitude: energies stay zero
    for line in a.splitlines()[1:]:
        cols = line.split(",")
        assert float(cols[1]) == 0.0 and float(cols[4]) == 0.0


def test_forced_run_moves():
    cfg = json.dumps({"integration": {"t_end": 0.2}})
    out = _nsmem.simulate(cfg)
    assert out["t"][0] == 0.0
    assert out["psi_H"][-1] > 0.0


def test_constants_sane():
    c = _nsmem.measured_constants("")
    assert c["lambda1"] > 0.0
    assert c["c_hat"] > 0.0
    assert c["c_tilde"] > 0.0
    assert 0.0 < c["delta0"] <= min(c["lambda1"] * 0.05 / 2.0, 0.5) + 1e-12


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
    print("smoke: all ok")
