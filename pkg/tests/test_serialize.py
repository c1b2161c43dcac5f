import json
from fractions import Fraction

import pytest

from padicspectral.cyclotomic import CycInt, CycRat
from padicspectral.measures import nu_truncation, spectrum_truncation
from padicspectral.padic import PAdicScaled
from padicspectral.serialize import (
    InputError, cycrat_from_json, cycrat_to_json, dumps, load_json, measure_from_json, measure_to_json,
    residues_from_json, scaled_from_json, scaled_to_json, schema, set_from_json, set_to_json, tree_from_json,
    tree_to_json,
)
from padicspectral.trees import HomoTree, random_choice


def test_points_round_trip():
    for x in [PAdicScaled(3, 5, 2), PAdicScaled(2, -7, 1), PAdicScaled(5, 12), PAdicScaled(2, 0)]:
        assert scaled_from_json(x.p, scaled_to_json(x)) == x
    assert scaled_to_json(PAdicScaled(3, 5, 2)) == "5/3^2"
    assert scaled_from_json(2, "3/8") == PAdicScaled(2, 3, 3)
    with pytest.raises(InputError):
        scaled_from_json(2, "1/3")


def test_measure_and_set_round_trip():
    mu = nu_truncation(3, {0, 2}, 3, random_choice(3, 4))
    assert measure_from_json(json.loads(dumps(measure_to_json(mu)))) == mu
    E = spectrum_truncation(3, {0, 2}, 3)
    assert set_from_json(json.loads(dumps(set_to_json(E)))) == E


def test_tree_round_trip():
    t = HomoTree.build(3, 4, {1, 3}, random_choice(3, 9))
    data = json.loads(dumps(tree_to_json(t)))
    assert tree_from_json(data) == t
    assert "" in data["choice"] and data["leaves"] == t.leaves()


def test_cycrat_round_trip():
    z = CycRat(CycInt(3, 2, [1, 0, 2, 0, 0, 1, 0, 0, 0]), 6)
    d = cycrat_to_json(z)
    assert cycrat_from_json(3, d).equals(z)
    assert abs(complex(*d["complex"]) - z.to_complex()) < 1e-9


def test_schemas_load():
    for name in ("measure", "set", "tree", "residues"):
        assert schema(name)["title"] == name


@pytest.mark.parametrize("data,where", [
    ({"p": 3, "gamma": 1}, "<root>"),
    ({"p": 4, "gamma": 1, "masses": {"0": "1"}}, "p"),
    ({"p": 3, "gamma": 1, "masses": {"0": "1/2", "1": "1/3"}}, "masses"),
    ({"p": 3, "gamma": 1, "masses": {"5": "1"}}, "masses/5"),
    ({"p": 3, "gamma": 1, "masses": {"0": "half"}}, "masses/0"),
    ({"p": 3, "gamma": 1, "masses": {"0": "1"}, "extra": 1}, "<root>"),
])
def test_measure_diagnostics(data, where):
    with pytest.raises(InputError) as info:
        measure_from_json(data)
    assert info.value.location == where


def test_set_and_tree_diagnostics():
    with pytest.raises(InputError) as info:
        set_from_json({"p": 2, "elements": ["1/2", "x"]}, "s.json")
    assert info.value.location == "s.json:elements/1"
    with pytest.raises(InputError) as info:
        set_from_json({"p": 2, "elements": ["1/2", "2/4"]})
    assert info.value.location == "elements/1"
    with pytest.raises(InputError) as info:
        tree_from_json({"p": 2, "gamma": 2, "I": [3]})
    assert info.value.location == "I/0"
    with pytest.raises(InputError) as info:
        residues_from_json({"p": 2, "gamma": 2, "residues": [0, 4]})
    assert info.value.location == "residues/1"


def test_load_json(tmp_path):
    f = tmp_path / "m.json"
    f.write_text('{"p": 2, "gamma": 1,\n "masses": {"0": "1"}')
    with pytest.raises(InputError) as info:
        load_json(str(f), "measure")
    assert "line 2" in info.value.location
    with pytest.raises(InputError):
        load_json(str(tmp_path / "missing.json"), "measure")
    with pytest.raises(InputError):
        load_json("{" + " " * 5000 + "}", "measure")
    data, src = load_json('{"p": 2}', "set")
    assert data == {"p": 2} and src == "<inline set>"


def test_dumps_is_stable():
    payload = {"b": Fraction(1, 3), "a": [PAdicScaled(2, 1, 1)], "c": frozenset({3, 1})}
    assert dumps(payload) == dumps(dict(reversed(list(payload.items()))))
    assert json.loads(dumps(payload)) == {"a": ["1/2^1"], "b": "1/3", "c": [1, 3]}
