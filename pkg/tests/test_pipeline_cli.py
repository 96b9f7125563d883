import json

import pytest

from starminer.cli import main
from starminer.errors import AgreementError
from starminer.pipeline import RunConfig, run_benchmark, run_pipeline


def write_people_csv(tmp_path):
    path = tmp_path / "people.csv"
    path.write_text("TID,age\n1,Young\n2,Middle\n3,Middle\n", encoding="utf-8")
    return path


def people_config(tmp_path, **overrides):
    base = dict(
        out_dir=str(tmp_path / "out"),
        fact=str(write_people_csv(tmp_path)),
        key_dim="TID",
        selected_dims=("age",),
        minsup="0.5",
        minconf="0.5",
    )
    base.update(overrides)
    return RunConfig(**base)


# --- run_pipeline -----------------------------------------------------------

def test_single_table_pipeline_mines_the_majority_value(tmp_path):
    result = run_pipeline(people_config(tmp_path))
    pair_sets = {d.pair_set: d for d in result.decoded}
    middle = pair_sets[frozenset({("age", "Middle")})]
    assert middle.support_count == 2
    assert middle.support == 2 / 3
    assert frozenset({("age", "Young")}) not in pair_sets
    for name in ("itemsets.txt", "itemsets.jsonl", "rules.txt", "rules.jsonl",
                 "stats.json", "registry.csv"):
        assert (tmp_path / "out" / name).exists()


def test_pipeline_records_parse_back(tmp_path):
    result = run_pipeline(people_config(tmp_path))
    lines = (tmp_path / "out" / "itemsets.jsonl").read_text().splitlines()
    records = [json.loads(l) for l in lines]
    assert {r["support_count"] for r in records} == {2}
    assert records[0]["items"] == [{"dimension": "age", "value": "Middle"}]
    stats = json.loads((tmp_path / "out" / "stats.json").read_text())
    assert stats["groups"] == 3
    assert stats["algorithms"]["rshar"]["full_scans_of_groups"] == 1
    assert "elapsed" not in json.dumps(stats)


def test_pipeline_rejects_bad_thresholds(tmp_path):
    with pytest.raises(ValueError):
        run_pipeline(people_config(tmp_path, minsup="0"))
    with pytest.raises(ValueError):
        run_pipeline(people_config(tmp_path, minsup="1.5"))
    with pytest.raises(ValueError):
        run_pipeline(people_config(tmp_path, minconf="abc"))


def test_pipeline_both_agreement_and_report(tmp_path):
    result = run_pipeline(people_config(tmp_path, algorithm="both"))
    assert result.report is not None
    assert result.report.agreement is True
    report = json.loads((tmp_path / "out" / "bench_report.json").read_text())
    assert report["agreement"] is True
    assert report["algorithms"]["rshar"]["full_scans_of_groups"] == 1
    assert "elapsed" not in json.dumps(report)


def test_run_benchmark_requires_both(tmp_path):
    with pytest.raises(ValueError):
        run_benchmark(people_config(tmp_path, algorithm="rshar"))
    report = run_benchmark(people_config(tmp_path, algorithm="both"))
    assert report.agreement is True
    assert "agreement: yes" in report.console_table()


def test_pipeline_deterministic_bytes_and_parallel_equivalence(tmp_path):
    def run(out_name, workers):
        cfg = RunConfig(
            out_dir=str(tmp_path / out_name),
            synth_rows=600,
            seed=13,
            joins=(("product_id", "product", "product_id"),),
            key_dim="tid",
            selected_dims=("product_name",),
            minsup="0.02",
            minconf="0.5",
            algorithm="both",
            repeatable_dims=("product_name",),
            workers=workers,
        )
        result = run_pipeline(cfg)
        return {
            name: path.read_bytes()
            for name, path in sorted(result.files.items())
        }

    first = run("one", 1)
    second = run("two", 1)
    parallel = run("three", 4)
    assert {k: v for k, v in first.items()} == {k: v for k, v in second.items()}
    assert {k: v for k, v in first.items()} == {k: v for k, v in parallel.items()}


def test_pipeline_with_bins_discretizes_before_combining(tmp_path):
    path = tmp_path / "orders.csv"
    path.write_text(
        "TID,income\n1,5500\n2,8000\n3,6200\n", encoding="utf-8"
    )
    cfg = RunConfig(
        out_dir=str(tmp_path / "out"),
        fact=str(path),
        key_dim="TID",
        selected_dims=("income",),
        bins=(("income", (("5K..7K", 5000.0, 7000.0), ("7K..9K", 7000.0, 9000.0))),),
        minsup="0.5",
        minconf="0.5",
    )
    result = run_pipeline(cfg)
    assert {d.pairs for d in result.decoded} == {(("income", "5K..7K"),)}


def test_pipeline_filters_restrict_rows(tmp_path):
    cfg = people_config(tmp_path, filters=(("age", "Middle"),), minsup="0.5")
    result = run_pipeline(cfg)
    assert result.codes == 1
    assert result.groups == 2


def test_pipeline_apriori_only(tmp_path):
    result = run_pipeline(people_config(tmp_path, algorithm="apriori"))
    assert set(result.stats) == {"apriori"}
    assert result.stats["apriori"].full_scans_of_groups >= 1
    assert {d.pair_set for d in result.decoded} == {frozenset({("age", "Middle")})}


def test_pipeline_no_frequent_items_reports_zero_everything(tmp_path):
    result = run_pipeline(people_config(tmp_path, algorithm="both", minsup="0.9"))
    assert result.itemsets == []
    assert result.rules == []
    assert result.report is not None and result.report.agreement is True
    stats = json.loads((tmp_path / "out" / "stats.json").read_text())
    assert stats["itemsets_total"] == 0
    assert stats["rules_total"] == 0


def test_report_numbers_recomputable_from_itemset_file(tmp_path):
    result = run_pipeline(people_config(tmp_path, algorithm="both", minsup="0.5"))
    records = [
        json.loads(line)
        for line in (tmp_path / "out" / "itemsets.jsonl").read_text().splitlines()
    ]
    per_level = {}
    for r in records:
        key = str(len(r["codes"]))
        per_level[key] = per_level.get(key, 0) + 1
    report = json.loads((tmp_path / "out" / "bench_report.json").read_text())
    for algo in ("rshar", "apriori"):
        assert report["algorithms"][algo]["itemsets_per_level"] == per_level
        assert report["algorithms"][algo]["itemsets_total"] == len(records)


def test_explicit_projection_resolves_ambiguous_attribute(tmp_path):
    fact = tmp_path / "fact.csv"
    fact.write_text("tid,cust,store\nt1,c1,s1\nt2,c1,s2\n", encoding="utf-8")
    cust = tmp_path / "cust.csv"
    cust.write_text("cust_id,name\nc1,Ann\n", encoding="utf-8")
    store = tmp_path / "store.csv"
    store.write_text("store_id,name\ns1,North\ns2,South\n", encoding="utf-8")
    common = dict(
        out_dir=str(tmp_path / "out"),
        fact=str(fact),
        dims=(("customer", str(cust)), ("store", str(store))),
        joins=(("cust", "customer", "cust_id"), ("store", "store", "store_id")),
        key_dim="tid",
        selected_dims=("name",),
        minsup="0.5",
        minconf="0.5",
    )
    with pytest.raises(Exception, match="ambiguous"):
        run_pipeline(RunConfig(**common))
    cfg = RunConfig(**common, projected=(("fact", "tid"), ("store", "name")))
    result = run_pipeline(cfg)
    assert {d.pairs for d in result.decoded} == {
        (("name", "North"),),
        (("name", "South"),),
    }


def test_config_round_trips_through_dict(tmp_path):
    cfg = RunConfig(
        out_dir="out",
        fact="fact.csv",
        dims=(("customer", "c.csv"), ("product", "p.csv")),
        joins=(("cust", "customer", "cust_id"),),
        projected=(("customer", "age"),),
        key_dim="tid",
        selected_dims=("age", "product_name"),
        filters=(("age", "Young"),),
        bins=(("income", (("low", 0.0, 5.0),)),),
        minsup="0.0045",
        minconf="0.8",
        algorithm="both",
        repeatable_dims=("product_name",),
        synth_rows=100,
        seed=7,
        workers=2,
    )
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert json.loads(json.dumps(cfg.to_dict())) == cfg.to_dict()


def test_config_rejects_unknown_fields():
    with pytest.raises(ValueError, match="unknown"):
        RunConfig.from_dict({"out_dir": "x", "bogus": 1})


# --- CLI ---------------------------------------------------------------------

def run_cli(*argv):
    return main(list(argv))


def test_cli_minsup_zero_rejected_before_any_work(tmp_path, capsys):
    code = run_cli(
        "--fact", "whatever.csv", "--key-dim", "TID", "--combine-dims", "age",
        "--minsup", "0", "--minconf", "0.5", "--out", str(tmp_path / "out"),
    )
    assert code == 1
    assert "minsup" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_cli_requires_out(tmp_path):
    assert run_cli("--synth", "10", "--seed", "1") == 1


def test_cli_single_table_run(tmp_path, capsys):
    fact = write_people_csv(tmp_path)
    code = run_cli(
        "--fact", str(fact), "--key-dim", "TID", "--combine-dims", "age",
        "--minsup", "0.5", "--minconf", "0.5", "--out", str(tmp_path / "out"),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "groups: 3" in out
    assert (tmp_path / "out" / "itemsets.txt").read_text().startswith('age("Middle")')


def test_cli_synth_only_generates_data(tmp_path, capsys):
    code = run_cli("--synth", "50", "--seed", "3", "--out", str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "data" / "fact.csv").exists()
    assert "generated synthetic data" in capsys.readouterr().out


def test_cli_synth_requires_seed(tmp_path):
    assert run_cli("--synth", "50", "--out", str(tmp_path / "out")) == 1


def test_cli_synth_benchmark_end_to_end(tmp_path, capsys):
    code = run_cli(
        "--synth", "600", "--seed", "7", "--out", str(tmp_path / "out"),
        "--join", "product_id:product:product_id",
        "--key-dim", "tid", "--combine-dims", "product_name",
        "--minsup", "0.02", "--minconf", "0.5",
        "--algorithm", "both", "--repeatable-dims", "product_name",
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "agreement: yes" in out
    assert "speedup" in out
    report = json.loads((tmp_path / "out" / "bench_report.json").read_text())
    assert report["agreement"] is True


def test_cli_orphan_key_is_a_data_error(tmp_path, capsys):
    fact = tmp_path / "fact.csv"
    fact.write_text("tid,cust\nt1,cX\n", encoding="utf-8")
    dim = tmp_path / "customer.csv"
    dim.write_text("cust_id,age\nc1,Young\n", encoding="utf-8")
    code = run_cli(
        "--fact", str(fact), "--dim", f"customer={dim}",
        "--join", "cust:customer:cust_id",
        "--key-dim", "tid", "--combine-dims", "age",
        "--minsup", "0.5", "--minconf", "0.5", "--out", str(tmp_path / "out"),
    )
    assert code == 2
    assert "cX" in capsys.readouterr().err


def test_cli_disagreement_exit_code(tmp_path, monkeypatch, capsys):
    import starminer.cli as cli_mod

    def explode(config):
        raise AgreementError("forced for the exit-code contract")

    monkeypatch.setattr(cli_mod, "run_pipeline", explode)
    fact = write_people_csv(tmp_path)
    code = run_cli(
        "--fact", str(fact), "--key-dim", "TID", "--combine-dims", "age",
        "--minsup", "0.5", "--minconf", "0.5", "--out", str(tmp_path / "out"),
    )
    assert code == 3


def test_cli_config_file_round_trip(tmp_path):
    fact = write_people_csv(tmp_path)
    cfg = RunConfig(
        out_dir=str(tmp_path / "out"),
        fact=str(fact),
        key_dim="TID",
        selected_dims=("age",),
        minsup="0.5",
        minconf="0.5",
    )
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(cfg.to_dict(), indent=2), encoding="utf-8")
    assert run_cli("--config", str(config_path)) == 0
    # flags override config fields
    assert run_cli("--config", str(config_path), "--minsup", "0") == 1


def test_cli_bad_flag_shapes(tmp_path):
    out = str(tmp_path / "out")
    assert run_cli("--dim", "nopath", "--out", out) == 1
    assert run_cli("--join", "a:b", "--out", out) == 1
    assert run_cli("--bins", "income=low:0", "--out", out) == 1


def test_cli_usage_error_exit_code_from_argparse(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--algorithm", "bogus"])
    assert exc.value.code == 1
