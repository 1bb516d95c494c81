import json

import pytest

from chernlab.catalog import (DEFAULT_BUILTINS, RecordError, build_builtin, build_hilb2, check_record,
                              dumps_record, hilb2_topology, load_catalog_dir, load_record,
                              loads_record, record_to_dict, save_record)
from chernlab.chern import chern_numbers
from chernlab.exact import ChernlabError
from chernlab.hodge import validate_diamond

ALL_NAMES = list(DEFAULT_BUILTINS) + ["pn(1)", "pn(2)", "pn(3)", "pn(5)", "pn(6)", "quadric(3)",
                                      "quadric(5)", "quadric(6)"]


def test_cubic4(builtins):
    r = builtins("cubic4")
    assert r.model.euler_number() == 27
    assert r.b(4) == 23 and r.b(2) == 1
    assert r.annotations["stated_signature"] == 23


def test_hilb2_k3(builtins):
    r = builtins("hilb2_k3")
    assert r.b(2) == 23
    assert r.model.fujiki.constant == 3
    assert chern_numbers(r.model)["c2^2"] == 828
    assert r.annotations["generalized_kummer4_b2"] == 7
    h = r.model.hodge
    assert (h[3, 1], h[2, 2], h[2, 0]) == (21, 232, 1)


def test_dp5(builtins):
    r = builtins("dp5")
    m = r.model
    assert m.integrate(m.line_generator ** 4) == 5
    assert r.b(4) == 2


def test_hilb2_topology():
    assert hilb2_topology(24, 22) == {"euler": 324, "b2": 23, "b4": 276}
    assert hilb2_topology(0, 2)["euler"] == 0


def test_build_hilb2_rejects_non_surfaces(builtins):
    with pytest.raises(ChernlabError):
        build_hilb2(builtins("cubic4"))
    with pytest.raises(ChernlabError):
        build_hilb2(builtins("pn(2)"))


def test_unknown_builtin():
    with pytest.raises(ChernlabError, match="unknown built-in"):
        build_builtin("nosuch")
    with pytest.raises(ChernlabError):
        build_builtin("pn(9)")


def test_pn_aliases():
    assert build_builtin("p3").model.tangent_total == build_builtin("pn(3)").model.tangent_total


@pytest.mark.parametrize("name", ALL_NAMES)
def test_every_builtin_is_consistent(name, builtins):
    r = builtins(name)
    assert check_record(r) == []
    if r.model.hodge is not None:
        assert validate_diamond(r.model.hodge) == []
        betti = r.betti()
        assert r.model.euler_number() == sum((-1) ** k * b for k, b in enumerate(betti))
    for v in chern_numbers(r.model).as_dict().values():
        assert v.denominator == 1


@pytest.mark.parametrize("name", ALL_NAMES)
def test_round_trip(name, builtins, tmp_path):
    r = builtins(name)
    path = tmp_path / "rec.json"
    save_record(r, path)
    assert load_record(path) == r


def test_rejects_wrong_euler(builtins):
    data = record_to_dict(builtins("cubic4"))
    data["stored"]["euler"] = "28"
    with pytest.raises(RecordError, match="stored.euler: file has 28, recomputed 27"):
        loads_record(json.dumps(data))


def test_rejects_unknown_field(builtins):
    data = record_to_dict(builtins("cubic4"))
    data["colour"] = "blue"
    with pytest.raises(RecordError, match="colour"):
        loads_record(json.dumps(data))


def test_rejects_missing_field(builtins):
    data = record_to_dict(builtins("cubic4"))
    del data["ring"]
    with pytest.raises(RecordError, match="ring"):
        loads_record(json.dumps(data))


def test_parse_error_reports_position():
    with pytest.raises(RecordError, match="line 2, column"):
        loads_record('{\n  "name": }')


def test_bad_field_value_names_field(builtins):
    data = record_to_dict(builtins("cubic4"))
    data["hodge"] = [[1, 0], [0, 1]]
    with pytest.raises(RecordError, match="hodge"):
        loads_record(json.dumps(data))


def test_load_catalog_dir(builtins, tmp_path):
    save_record(builtins("k3"), tmp_path / "k3.json")
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    records, errors = load_catalog_dir(tmp_path)
    assert list(records) == ["k3"]
    assert list(errors) == [str(tmp_path / "broken.json")]


def test_dumps_is_deterministic(builtins):
    assert dumps_record(builtins("dp5")) == dumps_record(build_builtin("dp5"))
