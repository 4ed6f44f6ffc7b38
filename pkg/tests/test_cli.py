import csv
import io
import json

import pytest

from entmono.cli import ROW_FIELDS, main, num

GHZ = '{"family": "ghz", "params": {"n": 3, "a": 0.6, "b": 0.8}}'
W3 = '{"family": "w", "params": {"n": 3}}'
FAST = ["--restarts", "16"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_negativity(capsys):
    code, out, _ = run(capsys, "compute", GHZ, "negativity", "0|1,2", "--output", "json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["result"]["value"] == {"value": 0.96, "bound": "exact"}
    assert data["result"]["squared"]["value"] == pytest.approx(0.9216)


def test_compute_crenoa_on_traced_pair(capsys):
    code, out, _ = run(capsys, "compute", W3, "crenoa", "0|1", "--keep", "0,1", "--output", "json", *FAST)
    assert code == 0
    assert json.loads(out)["result"]["value"]["value"] == pytest.approx(2 / 3, abs=1e-3)


def test_compute_table(capsys):
    code, out, _ = run(capsys, "compute", GHZ, "negativity", "0|1,2")
    assert code == 0 and "0.9216" in out and "exact" in out


def test_malformed_partition_exits_2(capsys):
    code, _, err = run(capsys, "compute", GHZ, "negativity", "0|0")
    assert code == 2 and "error" in err


def test_parse_failures_exit_2(capsys):
    assert run(capsys, "compute", "{not json", "negativity", "0|1,2")[0] == 2
    assert run(capsys, "compute", '{"family": "nope"}', "negativity", "0|1")[0] == 2
    assert run(capsys, "compute", '{"family": "w", "dims": [2]}', "negativity", "0|1")[0] == 2
    assert run(capsys, "compute", "/no/such/file.json", "negativity", "0|1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["compute", GHZ, "entropy", "0|1,2"])
    assert exc.value.code == 2


def test_invariant_violation_exits_3(capsys):
    spec = '{"dims": [2, 2], "amplitudes": [[1, 0], [0, 0], [0, 0], [1, 0]]}'
    code, _, err = run(capsys, "compute", spec, "negativity", "0|1")
    assert code == 3 and "invariant" in err


def test_explicit_amplitudes_and_stdin(capsys, monkeypatch):
    spec = '{"dims": [2, 2], "amplitudes": [[0.70710678118654752, 0], [0, 0], [0, 0], [0, 0.70710678118654752]]}'
    monkeypatch.setattr("sys.stdin", io.StringIO(spec))
    code, out, _ = run(capsys, "compute", "-", "negativity", "0|1", "--output", "json")
    assert code == 0
    assert json.loads(out)["result"]["value"]["value"] == pytest.approx(1)


def test_spec_file_and_out_file(capsys, tmp_path):
    spec = tmp_path / "state.json"
    spec.write_text(GHZ)
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "compute", str(spec), "negativity", "0|1,2", "--output", "csv", "--out", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(target.open()))
    assert rows[0]["value"] == "0.96" and rows[0]["bound"] == "exact"


def test_check_theorem1_saturation(capsys):
    code, out, _ = run(capsys, "check", '{"family": "theorem1", "params": {"a": 0.6, "b": 0.8}}',
                       "theorem1", "--output", "json")
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert abs(rep["slack"]["value"]) <= 1e-3
    assert rep["verdict"] == "verified"


def test_check_theorem2_w4(capsys):
    code, out, _ = run(capsys, "check", '{"family": "w", "params": {"n": 4}}', "theorem2",
                       "--output", "json", *FAST)
    assert code == 0
    assert json.loads(out)["reports"][0]["slack"]["value"] == pytest.approx(0.5, abs=1e-6)


def test_check_ckw_random(capsys):
    code, out, _ = run(capsys, "check", '{"family": "random_pure", "params": {"dims": [2, 2, 2], "seed": 7}}', "ckw")
    assert code == 0 and "verdict: verified" in out


def test_check_exit_codes(capsys):
    assert run(capsys, "check", W3, "bogus")[0] == 2
    bell_pairs = ('{"dims": [2, 2, 2, 2], "amplitudes": '
                  + json.dumps([[0.5, 0] if i in (0, 5, 10, 15) else [0, 0] for i in range(16)]) + "}")
    assert run(capsys, "check", bell_pairs, "theorem2", *FAST)[0] == 1
    # a starved optimizer leaves the 4-qubit identity uncertified
    code, _, _ = run(capsys, "check", '{"family": "random_pure", "params": {"dims": [2, 2, 2, 2], "seed": 2}}',
                     "identity", "--restarts", "1", "--iters", "5")
    assert code == 4


def test_check_entropy_with_partition(capsys):
    spec = '{"family": "random_mixed", "params": {"dims": [2, 2, 2], "rank": 3, "seed": 1}}'
    code, out, _ = run(capsys, "check", spec, "entropy", "--partition", "0,1|2", "--output", "json")
    assert code == 0
    assert [r["name"] for r in json.loads(out)["reports"]] == ["entropy-subadditivity", "entropy-triangle"]


def test_json_numbers_carry_bounds(capsys):
    code, out, _ = run(capsys, "check", W3, "corollary1", "--output", "json", *FAST)
    assert code == 0
    for rep in json.loads(out)["reports"]:
        for key in ("lhs", "rhs", "slack"):
            assert set(rep[key]) == {"value", "bound"}
        for term in rep["lhs_terms"] + rep["rhs_terms"]:
            assert set(term["value"]) == {"value", "bound"}


def test_suite_csv_columns(capsys):
    code, out, _ = run(capsys, "suite", "2", "--output", "csv", *FAST)
    assert code == 0
    reader = csv.DictReader(io.StringIO(out))
    assert reader.fieldnames == ROW_FIELDS
    rows = list(reader)
    assert {r["provenance"] for r in rows} == {"paper-formula", "derived-oracle"}
    target = [r for r in rows if r["case"] == "n=4" and r["quantity"] == "N^2(A1A2|rest)"][0]
    assert float(target["computed_value"]) == pytest.approx(1.0)


def test_suite_params_file(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text('{"2": {"n": [6]}}')
    code, out, _ = run(capsys, "suite", "2", "--params", str(params), "--output", "json", *FAST)
    assert code == 0
    data = json.loads(out)
    assert {r["case"] for r in data["rows"]} == {"n=6"}
    assert data["summary"]["violations"] == 0
    params.write_text("[1, 2]")
    assert run(capsys, "suite", "2", "--params", str(params))[0] == 2


def test_suite_table(capsys):
    code, out, _ = run(capsys, "suite", "3", *FAST)
    assert code == 0 and "violations=0" in out


def test_thread_count_does_not_change_output(capsys):
    outs = []
    for threads in ("1", "4"):
        code, out, _ = run(capsys, "suite", "1,3", "--output", "json", "--threads", threads, *FAST)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_bad_threads_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["suite", "2", "--threads", "zero"])
    assert exc.value.code == 2


def test_num_rounds_to_twelve_digits():
    assert num(1 / 3) == 0.333333333333
    assert str(num(-0.0)) == "0.0"
    assert num(None) is None
