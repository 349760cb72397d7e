#!/usr/bin/env python3
"""Smoke test for the gridx_py extension module.

Build the module first (`cargo build -p gridx-py`, or --release), then
run this script from anywhere inside the repository.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path


def locate_extension() -> Path:
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libgridx_py.so", "libgridx_py.dylib", "gridx_py.dll")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("gridx_py extension not found; run `cargo build -p gridx-py` first")


def import_module(tmp: Path):
    src = locate_extension()
    suffix = ".pyd" if src.suffix == ".dll" else ".so"
    dst = tmp / f"gridx_py{suffix}"
    shutil.copyfile(src, dst)
    sys.path.insert(0, str(tmp))
    import gridx_py  # noqa: E402

    return gridx_py


def main() -> None:
    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        gx = import_module(tmp)

        # Geometry helper: Austin <-> Dallas is roughly 182 miles.
        d = gx.haversine_miles(30.2672, -97.7431, 32.7767, -96.7970)
        assert 175 < d < 195, d

        # Tiny LP through the bound simplex.
        lp = gx.LpModel()
        x = lp.add_col("x", 0.0, 40.0, -25.0)
        y = lp.add_col("y", 0.0, float("inf"), -30.0)
        r1 = lp.add_row("lathe", "<=", 160.0)
        r2 = lp.add_row("mill", "<=", 120.0)
        lp.add_coeff(r1, x, 2.0)
        lp.add_coeff(r1, y, 4.0)
        lp.add_coeff(r2, x, 3.0)
        lp.add_coeff(r2, y, 1.5)
        lp.finalize()
        sol = lp.solve()
        assert sol["status"] == "Optimal", sol
        # Optimum at 2x+4y=160, 3x+1.5y=120 -> x = y = 80/3.
        expected = -(25.0 + 30.0) * 80.0 / 3.0
        assert abs(sol["objective"] - expected) / abs(expected) < 1e-6, sol["objective"]
        assert "ENDATA" in lp.to_mps()

        # Reference demand trajectory sanity.
        growth = gx.load_growth_scenario()
        assert growth["horizon"][0] == 2025 and len(growth["horizon"]) == 7

        # Full pipeline on the bundled demo inputs.
        data = tmp / "inputs"
        gx.write_demo_inputs(data)
        scenario = data / "scenario.json"

        summary = gx.demand_summary(scenario, data)
        assert len(summary["years"]) == 2
        assert summary["peak_gw"][1] > summary["peak_gw"][0]

        result = gx.run(scenario, data)
        assert result["status"] == "optimal", result["status"]
        assert result["objective"] > 0
        total = result["costs"]["total"]
        assert abs(total - result["objective"]) / result["objective"] < 1e-6

        rows = gx.sweep_construction_time(scenario, data, "natural_gas", [0, 3])
        assert [r["omega"] for r in rows] == [0, 3]
        assert all(r["status"] == "optimal" for r in rows)

        print("smoke test passed")
        print(json.dumps({"objective": result["objective"], "sweep": len(rows)}))


if __name__ == "__main__":
    main()
