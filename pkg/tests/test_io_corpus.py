from __future__ import annotations

import json

import numpy as np
import pytest

from brodylab import corpus
from brodylab.curves import spherical_derivative
from brodylab.errors import ParseError
from brodylab.io import curve_from_dict, curve_to_dict, dump_curve, load_curve, record_line, write_field_csv
from brodylab.regions import Region


@pytest.mark.parametrize("cid", corpus.ids())
def test_documents_round_trip(cid, tmp_path):
    f = corpus.get(cid).curve
    path = tmp_path / f"{cid}.json"
    dump_curve(f, path, cid)
    g = load_curve(path)
    assert curve_to_dict(g) == curve_to_dict(f)
    z = np.array([0.3 + 0.1j, -2 + 1j, 4.5 - 3j])
    assert np.array_equal(spherical_derivative(g, z), spherical_derivative(f, z))


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"type": "spline"},
        {"type": "rational", "components": [["x"]]},
        {"type": "weierstrass", "lattice": {"omega1": [1, 0]}},
        {"type": "precomposed", "base": {"type": "rational"}},
        [1, 2],
    ],
)
def test_bad_documents_raise(doc):
    with pytest.raises(ParseError):
        curve_from_dict(doc)


def test_unreadable_file_raises(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_curve(bad)
    with pytest.raises(ParseError):
        load_curve(tmp_path / "missing.json")


def test_records_are_sorted_and_serialisable():
    line = record_line("op", "x", 1 + 2j, {"b": 1, "a": np.float64(2.0)}, extra=np.arange(3))
    rec = json.loads(line)
    assert rec["value"] == [1.0, 2.0]
    assert rec["extra"] == [0, 1, 2]
    assert list(rec) == sorted(rec)


def test_field_csv(tmp_path):
    path = tmp_path / "field.csv"
    n = write_field_csv(path, corpus.get("identity").curve, Region.disk(0, 1), 0.25)
    rows = path.read_text().splitlines()
    assert rows[0] == "x,y,value" and len(rows) == n + 1
    x, y, v = map(float, rows[1].split(","))
    assert v == pytest.approx(spherical_derivative(corpus.get("identity").curve, complex(x, y)))


def test_corpus_sups_are_consistent():
    from brodylab.curves import sup_spherical_derivative

    for e in corpus.corpus():
        if e.sup is None or e.periodic:
            continue
        v, _ = sup_spherical_derivative(e.curve, e.window, e.window.size / 200)
        assert v == pytest.approx(e.sup, rel=1e-6, abs=1e-12), e.id


def test_unknown_corpus_id():
    with pytest.raises(KeyError):
        corpus.get("nope")
