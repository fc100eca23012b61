"""Smoke test for the pyqexpander extension.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist && pip install dist/pyqexpander-*.whl
"""

import json
import sys
import tempfile
from pathlib import Path

import pyqexpander as q


def check(cond, msg):
    if not cond:
        print(f"FAIL {msg}")
        sys.exit(1)
    print(f"ok   {msg}")


def main():
    toy = q.Code(q.Graph.toy())
    check((toy.n, toy.num_checks, toy.dimension) == (13, 6, 1), "toy code parameters")

    g = q.Graph.sample(60, 5, 10, seed=1)
    code = q.Code(g)
    check((code.n, code.num_checks) == (4500, 1800), "(60,5,10) code size")
    check(code.label(0) == ("aa", 0, 0), "qubit labels")

    dec = q.Decoder(code, beta="1/2")
    check(dec.num_colors > 0, f"coloring uses {dec.num_colors} colors")

    v = 1234
    sigma = code.syndrome([v])
    check(len(sigma) == 5, "single-qubit syndrome has weight d_A")
    out = dec.decode(sigma)
    check(out["final_syndrome"] == [] and out["correction"] == [v], "beta decoder fixes one qubit")
    check(dec.classify([v], out["correction"]) == ("exact", 0), "classification")
    par = dec.decode(sigma, variant="parallel")
    check(par["final_syndrome"] == [] and par["sweeps"] >= 1, "parallel decoder")
    check(dec.decode(sigma, variant="ratio")["final_syndrome"] == [], "ratio decoder")

    e, d = code.sample_error(0.001, 0.0, seed=7, stream=3)
    check(e == code.sample_error(0.001, 0.0, seed=7, stream=3)[0] and d == [], "seeded noise")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "sweep.json"
        path.write_text(json.dumps({
            "graph": {"kind": "toy"},
            "ledger": {"delta": 0.025, "beta": "1/2", "c": 18, "gamma": 0.1},
            "p_phys": [0.01, 0.05],
            "trials": 50,
            "master_seed": 1,
            "output": "sweep.csv",
        }))
        rep = q.sweep(str(path))
        check(len(rep["points"]) == 2 and rep["points"][0]["trials"] == 50, "sweep summary")
        check((Path(tmp) / "sweep.csv").read_text().startswith("# qexpander-sweep v1"), "sweep CSV header")

    try:
        code.syndrome([code.n])
    except ValueError:
        check(True, "out-of-range index raises ValueError")
    else:
        check(False, "out-of-range index raises ValueError")
    print("all checks passed")


if __name__ == "__main__":
    main()
