import json

import pytest

from ellsheaf import cli
from ellsheaf.errors import EXIT_CODES
from ellsheaf.store import Store, tate_key_fields


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_uniformizer_carlitz(capsys):
    code, doc, _ = run(capsys, "uniformizer", "--q", "2", "--theta", "1", "--prec", "6")
    assert code == 0
    res = doc["result"]
    coeffs = res["uniformizer"]["series"][0][0]["coeffs"]
    assert len(coeffs) == 6 and coeffs[0][0] == 1
    assert coeffs[1][:2] == [0, 1]                     # a_1 = omega
    assert res["cross_validation"]["scalar"] is not None


def test_uniformizer_zero_theta_exit_code(capsys):
    code, _, err = run(capsys, "uniformizer", "--q", "2", "--theta", "0")
    assert code == EXIT_CODES["CharacteristicCollision"]
    assert json.loads(err)["exit_code"] == code


def test_torsion_and_scattering(capsys):
    code, doc, _ = run(capsys, "torsion", "--q", "3", "--phi", "2;0;1", "--r", "2")
    assert code == 0 and doc["result"]["dimension"] == 4
    code, doc, _ = run(capsys, "scattering", "--q", "2", "--phi", "1;0;1")
    assert code == 0 and doc["result"]["g_constant"] and doc["result"]["generation"]


def test_lattice_check_and_stabilizer(capsys):
    code, doc, _ = run(capsys, "lattice-check", "--q", "2", "--lattice", "trivial")
    assert code == 0
    assert doc["result"]["verdicts"]["frobenius_flag"] is False and doc["result"]["window_stable"]
    code, doc, _ = run(capsys, "stabilizer", "--q", "2")
    assert doc["result"]["u_degrees"] == [0, 1, 2]


def test_baker_cli(capsys):
    code, doc, _ = run(capsys, "baker", "--q", "2", "--phi", "1;0;1", "--prec", "12",
                       "--g", "[[[1,1],[1]],[[0],[0,1]]]")
    assert code == 0 and doc["result"]["a0_units"] and doc["result"]["exponents"] == [0, 1]


def test_cache_hit_corrupt_and_policy_key(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ELLSHEAF_STORE", str(tmp_path))
    _, first, _ = run(capsys, "cache", "tate", "--depth", "6")
    _, second, _ = run(capsys, "cache", "tate", "--depth", "6")
    assert first["result"]["status"] == "miss" and second["result"]["status"] == "hit"
    assert first["result"]["payload"] == second["result"]["payload"]
    path = Store(tmp_path).path(first["result"]["key"])
    path.write_text(path.read_text().replace('"depth":6', '"depth":5'))
    code, _, err = run(capsys, "cache", "tate", "--depth", "6", "--strict")
    assert code == EXIT_CODES["StoreCorrupt"]
    _, third, _ = run(capsys, "cache", "tate", "--depth", "6")
    assert third["result"]["status"] == "recovered"
    assert third["result"]["payload"] == first["result"]["payload"]
    fields = tate_key_fields(2, [1], None, {"xi": [0]}, 6, "least")
    s = Store(tmp_path)
    assert s.key(fields) != s.key(fields, policy_version=2)


def test_verify_single_suite_filters(capsys):
    code, doc, err = run(capsys, "verify", "--suite", "moore")
    assert code == 0
    assert list(doc["result"]["suites"]) == ["moore"]


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for name, code in EXIT_CODES.items():
        assert str(code) in out
    assert "StoreCorrupt" in out and "ELLSHEAF_STORE" in out
