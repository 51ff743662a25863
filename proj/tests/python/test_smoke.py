import json
import math

import pytest

import puncvol


def test_sphere_volume():
    assert puncvol.sphere_volume(3) == pytest.approx(2 * math.pi**2, rel=1e-15)


def test_matrix_helpers():
    assert puncvol.elem_sym([[1, 2], [3, 4]], 2) == pytest.approx(-2.0)
    a = [[1, 0, 0], [0, 1, 1], [0, 0, 0]]
    assert puncvol.graph_volume(a) == pytest.approx(math.sqrt(6))


def test_hopf_volume_normalized():
    r = puncvol.volume(puncvol.field("hopf", n=1))
    assert r["normalized"] == pytest.approx(2.0, abs=1e-9)


def test_radial_index_and_poincare_hopf():
    spec = puncvol.field("radial", n=1)
    north = puncvol.field_index(spec, [0, 0, 0, 1])
    south = puncvol.field_index(spec, [0, 0, 0, -1])
    assert north["index"] + south["index"] == 0


def test_verify_lemma():
    r = puncvol.verify_lemma(1)
    assert r["status"] == "verified"


def test_bounds_and_chain_table():
    rep = puncvol.bounds(1, [1, 1])
    names = [b["name"] for b in rep["bounds"]]
    assert "thmA" in names and "thmB" in names
    row = puncvol.chain_table([2])[0]
    assert row["radial"] == pytest.approx(8 / 3)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        puncvol.field_index(puncvol.field("radial"), [0, 0, 0, 1], radius=2.0)


def test_run_roundtrip():
    code, out, _ = puncvol.run("chain-table", "--n", "1,2")
    assert code == 0
    rec = json.loads(out)
    assert rec["schema"] == 1 and len(rec["results"]["rows"]) == 2
    code, _, err = puncvol.run("volume", "--field", "radial", "--grid", '{"kind":"monte-carlo","count":10}')
    assert code == 2 and "monte-carlo" in err
