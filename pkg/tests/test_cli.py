import json

import pytest

from foodbank.cli import COMPARE_COLUMNS, RUN_COLUMNS, SWEEP_COLUMNS, main, read_table
from foodbank.model import load_scenario, save_scenario


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "s.json"
    assert main(["gen", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_gen_writes_valid_scenario(scenario_file, capsys):
    assert main(["validate", "--scenario", str(scenario_file)]) == 0
    assert "valid" in capsys.readouterr().out
    assert len(load_scenario(scenario_file).donors) == 10


def test_gen_honours_generator_flags(tmp_path):
    path = tmp_path / "s.json"
    args = ["gen", "--seed", "1", "--donors", "4", "--agencies", "2", "--food-types", "2",
            "--supply-range", "10:20", "--region-km", "5", "--epsilon", "0.5", "--out", str(path)]
    assert main(args) == 0
    s = load_scenario(path)
    assert (len(s.donors), len(s.agencies), s.n_types, s.region_size) == (4, 2, 2, 5.0)
    assert all(10 <= v <= 20 for d in s.donors for v in d.supply)
    assert s.params.epsilon == (0.5, 0.5)


def test_run_proposed(scenario_file, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", "--scenario", str(scenario_file), "--policy", "proposed", "--out", str(out)]) == 0
    rows = read_table(out)
    assert list(rows[0]) == RUN_COLUMNS
    assert [r["policy"] for r in rows] == ["proposed"] * 6
    total = rows[-1]
    assert total["agency_id"] == "TOTAL" and float(total["overflow_lbs"]) == 0.0


def test_run_both_json(scenario_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", str(scenario_file), "--format", "json", "--out", str(out)]) == 0
    rows = read_table(out)
    assert {r["policy"] for r in rows} == {"proposed", "baseline"}
    assert len(rows) == 12


def test_run_missing_file(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_run_invalid_scenario(scenario_file, capsys):
    doc = json.loads(scenario_file.read_text())
    doc["food_types"][0]["weight"] = 0.9
    scenario_file.write_text(json.dumps(doc))
    assert main(["run", "--scenario", str(scenario_file)]) == 3
    assert "weights" in capsys.readouterr().err
    assert main(["validate", "--scenario", str(scenario_file)]) == 3


def test_scenario_and_generator_flags_conflict(scenario_file):
    assert main(["run", "--scenario", str(scenario_file), "--donors", "3"]) == 2


def test_param_overrides_on_loaded_scenario(scenario_file, tmp_path, capsys):
    assert main(["run", "--scenario", str(scenario_file), "--weights", "0.5,0.5"]) == 3
    capsys.readouterr()
    assert main(["run", "--scenario", str(scenario_file), "--epsilon", "0.5",
                 "--pounds-per-person", "2", "--policy", "baseline"]) == 0


def test_bad_flag_values_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["compare", "--supply-range", "600-800"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["compare", "--replications", "0"])
    assert err.value.code == 2


def test_compare_table(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["compare", "--replications", "5", "--seed", "42", "--out", str(out)]) == 0
    rows = read_table(out)
    assert list(rows[0]) == COMPARE_COLUMNS
    assert [r["policy"] for r in rows] == ["proposed", "baseline"]
    assert all(r["n_replications"] == "5" and r["seed"] == "42" for r in rows)


def test_compare_single_replication_zero_sd(tmp_path):
    out = tmp_path / "c.json"
    assert main(["compare", "--replications", "1", "--format", "json", "--out", str(out)]) == 0
    for r in read_table(out):
        assert r["sd_overflow_lbs"] == r["sd_undistributed_lbs"] == r["sd_people_served"] == 0


def test_compare_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["compare", "--replications", "10", "--seed", "42", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_compare_rejects_scenario_file(scenario_file):
    assert main(["compare", "--scenario", str(scenario_file)]) == 2


def test_sweep_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--epsilons", "0.5,1.0,1.5,2.0", "--replications", "3", "--out", str(out)]) == 0
    rows = read_table(out)
    assert list(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == 8
    assert [r["epsilon"] for r in rows[::2]] == ["0.500000", "1.000000", "1.500000", "2.000000"]


def test_single_epsilon_sweep_equals_compare(tmp_path):
    c, s = tmp_path / "c.csv", tmp_path / "s.csv"
    common = ["--replications", "4", "--seed", "3", "--epsilon", "1.5"]
    assert main(["compare", *common, "--out", str(c)]) == 0
    assert main(["sweep", "--epsilons", "1.5", *common, "--out", str(s)]) == 0
    swept = [{k: v for k, v in r.items() if k != "epsilon"} for r in read_table(s)]
    assert swept == read_table(c)


@pytest.mark.parametrize("eps", ["", "0.5,,1", "a,b", "1,-2"])
def test_sweep_malformed_epsilons(eps):
    assert main(["sweep", "--epsilons", eps, "--replications", "1"]) == 2


def test_agency_order_flag(scenario_file, tmp_path):
    desc, asc = tmp_path / "d.csv", tmp_path / "a.csv"
    base = ["run", "--scenario", str(scenario_file), "--policy", "proposed"]
    assert main([*base, "--out", str(desc)]) == 0
    assert main([*base, "--agency-order", "poverty-asc", "--out", str(asc)]) == 0
    order = lambda p: [r["agency_id"] for r in read_table(p)][:-1]  # noqa: E731
    assert order(asc) == order(desc)[::-1]


def test_round_trip_scenario(scenario_file, tmp_path):
    copy = tmp_path / "copy.json"
    save_scenario(load_scenario(scenario_file), copy)
    assert copy.read_bytes() == scenario_file.read_bytes()
