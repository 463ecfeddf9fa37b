"""Smoke test for the rfl Python module.

Build and run from the repository root:

    cargo build --release -p rfl-py --features extension-module
    python3 python/smoke.py
"""

import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "librfl.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("rfl", lib)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("librfl.so not found; build rfl-py with --features extension-module first")


def main():
    rfl = load()

    assert round(rfl.fluxon_energy(0.4), 2) == 8.73
    assert round(rfl.fluxon_energy(0.6, 2.0), 2) == 5.0

    ideal = rfl.ideal_snl_efficiency(4.0, 0.6, mode="fast")
    assert abs(ideal["efficiency"] - 0.81) < 0.01, ideal

    edge = rfl.edge_model()
    assert 0.61 <= edge["mu_lambda"] <= 0.75, edge

    table = rfl.cnot_table()
    assert [(r["c"]["port"], r["d"]["port"]) for r in table] == [
        ("C1", "D1"),
        ("C2", "D1"),
        ("C2", "D2"),
        ("C1", "D2"),
    ]

    gate = rfl.Gate("not")
    verdict = gate.run("0")
    assert verdict["classification"] == "0->1", verdict
    assert verdict["pass"]

    idsn = rfl.Gate("idsn")
    assert idsn.inputs == ["S1", "S2"]
    assert idsn.run("00")["classification"] == "00->11"

    verdict = rfl.simulate('gate = "one-bit"\n[inputs]\nS1 = "fluxon v0=0.6 x0=-20"\n')
    assert verdict["classification"] == "0->1", verdict

    try:
        rfl.Gate("no-such-gate")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown gate accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
