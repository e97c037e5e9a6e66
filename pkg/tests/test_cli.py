import json

import pytest

from fabcarbon.cli import main

from conftest import write_test_bundle

CPA_SCENARIO = """\
[run]
analysis = "cpa"
dataset = "{dataset}"
seed = 20240811
samples = 40000
grid_points = 1024
output = "{out}"

[[cpa.targets]]
name = "10nm_2019"
node = "10nm"
as_of_year = 2019
area_cm2 = 1.0
"""

EMBODIED_SCENARIO = """\
[run]
analysis = "embodied"
dataset = "{dataset}"
seed = 7
samples = 30000
grid_points = 512
output = "{out}"

[[designs]]
name = "mono"
as_of_year = 2019
chiplets = [{{node = "16nm", area_cm2 = 2.0, count = 1}}]

[[designs]]
name = "split"
as_of_year = 2019
chiplets = [{{node = "16nm", area_cm2 = 1.0, count = 2}}]
"""

ALPHA_SCENARIO = """\
[run]
analysis = "alpha"
dataset = "{dataset}"
seed = 11
samples = 20000
grid_points = 512
output = "{out}"

[[designs]]
name = "soc"
as_of_year = 2019
chiplets = [{{node = "10nm", area_cm2 = 0.2, count = 1}}]

[[alpha.cases]]
name = "dc_case"
design = "soc"
[alpha.cases.profile]
tdp_watts = 50.0
lifetime_years = 3.0
utilization = "dc"
ci_region = "TW"
"""


@pytest.fixture
def bundle_dir(tmp_path):
    return write_test_bundle(tmp_path / "bundle")


def write_scenario(tmp_path, template, bundle_dir, name="scenario.toml", out="out"):
    path = tmp_path / name
    path.write_text(template.format(dataset=bundle_dir, out=tmp_path / out))
    return path, tmp_path / out


class TestRun:
    def test_cpa_run_writes_artifacts(self, tmp_path, bundle_dir, capsys):
        scenario, out = write_scenario(tmp_path, CPA_SCENARIO, bundle_dir)
        before = {p: p.read_bytes() for p in bundle_dir.rglob("*") if p.is_file()}
        assert main(["run", str(scenario)]) == 0
        after = {p: p.read_bytes() for p in bundle_dir.rglob("*") if p.is_file()}
        assert before == after  # runs never mutate the bundle
        assert (out / "summary.json").is_file()
        assert (out / "10nm_2019.dist.csv").is_file()
        run_info = json.loads((out / "run.json").read_text())
        assert run_info["seed"] == 20240811
        assert run_info["samples"] == 40000
        assert run_info["bundle_version"] == "test-1"
        summary = json.loads((out / "summary.json").read_text())
        target = summary["targets"]["10nm_2019"]
        assert target["summary"]["mean"] > 0
        assert "deterministic_point" in target

    def test_rerun_is_byte_identical(self, tmp_path, bundle_dir):
        scenario, out = write_scenario(tmp_path, CPA_SCENARIO, bundle_dir)
        assert main(["run", str(scenario)]) == 0
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        assert main(["run", str(scenario)]) == 0
        second = {p.name: p.read_bytes() for p in out.iterdir()}
        assert first == second

    def test_worker_count_does_not_change_bytes(self, tmp_path, bundle_dir):
        scenario, out1 = write_scenario(tmp_path, CPA_SCENARIO, bundle_dir, out="out1")
        assert main(["run", str(scenario), "--workers", "1", "--out", str(tmp_path / "w1")]) == 0
        assert main(["run", str(scenario), "--workers", "3", "--out", str(tmp_path / "w3")]) == 0
        w1 = {p.name: p.read_bytes() for p in (tmp_path / "w1").iterdir()}
        w3 = {p.name: p.read_bytes() for p in (tmp_path / "w3").iterdir()}
        assert w1 == w3

    def test_embodied_multi_design(self, tmp_path, bundle_dir):
        scenario, out = write_scenario(tmp_path, EMBODIED_SCENARIO, bundle_dir)
        assert main(["run", str(scenario)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["designs"]) == {"mono", "split"}
        assert (out / "mono.dist.csv").is_file()
        assert (out / "split.dist.csv").is_file()

    def test_alpha_case_outputs(self, tmp_path, bundle_dir):
        scenario, out = write_scenario(tmp_path, ALPHA_SCENARIO, bundle_dir)
        assert main(["run", str(scenario)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        case = summary["cases"]["dc_case"]
        assert 0.0 < case["alpha"]["mean"] < 1.0
        assert summary["alpha_comparison_bands"]["embodied_dominated"]["center"] == 0.8
        assert (out / "dc_case.alpha.dist.csv").is_file()
        assert (out / "dc_case.total.dist.csv").is_file()

    def test_seed_override_changes_output(self, tmp_path, bundle_dir):
        scenario, _ = write_scenario(tmp_path, CPA_SCENARIO, bundle_dir)
        assert main(["run", str(scenario), "--out", str(tmp_path / "a"), "--seed", "1"]) == 0
        assert main(["run", str(scenario), "--out", str(tmp_path / "b"), "--seed", "2"]) == 0
        a = json.loads((tmp_path / "a" / "summary.json").read_text())
        b = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert a != b

    def test_json_format(self, tmp_path, bundle_dir):
        scenario, out = write_scenario(tmp_path, CPA_SCENARIO, bundle_dir)
        assert main(["run", str(scenario), "--format", "json"]) == 0
        assert (out / "10nm_2019.dist.json").is_file()


class TestExitCodes:
    def test_missing_scenario_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.toml")]) == 2

    def test_bad_toml(self, tmp_path, bundle_dir):
        path = tmp_path / "bad.toml"
        path.write_text("[run\nanalysis=")
        assert main(["run", str(path)]) == 2

    def test_missing_seed(self, tmp_path, bundle_dir):
        path = tmp_path / "no_seed.toml"
        path.write_text(
            f'[run]\nanalysis = "cpa"\ndataset = "{bundle_dir}"\nsamples = 100\n'
            '[[cpa.targets]]\nnode = "10nm"\n'
        )
        assert main(["run", str(path)]) == 2

    def test_unknown_node_is_scenario_error(self, tmp_path, bundle_dir):
        path = tmp_path / "bad_node.toml"
        path.write_text(
            f'[run]\nanalysis = "cpa"\ndataset = "{bundle_dir}"\nseed = 1\nsamples = 100\n'
            f'output = "{tmp_path / "o"}"\n'
            '[[cpa.targets]]\nnode = "3nm"\nas_of_year = 2020\n'
        )
        assert main(["run", str(path)]) == 2

    def test_broken_bundle_is_exit_3(self, tmp_path):
        bundle = write_test_bundle(tmp_path / "bundle", **{"provenance.toml": ""})
        path = tmp_path / "s.toml"
        path.write_text(
            f'[run]\nanalysis = "cpa"\ndataset = "{bundle}"\nseed = 1\nsamples = 100\n'
            f'output = "{tmp_path / "o"}"\n'
            '[[cpa.targets]]\nnode = "10nm"\nas_of_year = 2019\n'
        )
        assert main(["run", str(path)]) == 3

    def test_infeasible_provision_is_exit_4(self, tmp_path, bundle_dir):
        path = tmp_path / "prov.toml"
        path.write_text(
            f'[run]\nanalysis = "provision"\ndataset = "{bundle_dir}"\nseed = 1\nsamples = 5000\n'
            f'output = "{tmp_path / "o"}"\ngrid_points = 256\n'
            "[[designs]]\n"
            'name = "big"\nas_of_year = 2019\n'
            'chiplets = [{node = "16nm", area_cm2 = 5.0, count = 1}]\n'
            "[provision]\n"
            "budget_kgco2 = 0.001\nrisk = 0.05\n"
            "[[provision.candidates]]\n"
            'label = "big"\ndesign = "big"\nperformance = 1.0\n'
        )
        assert main(["run", str(path)]) == 4
        # the report is still written before the nonzero exit
        assert (tmp_path / "o" / "provision.csv").is_file()
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["provision"]["selected"] is None


class TestBundleCommands:
    def test_validate_ok(self, bundle_dir, capsys):
        assert main(["validate", str(bundle_dir)]) == 0
        assert "ok: bundle" in capsys.readouterr().out

    def test_validate_broken(self, tmp_path, capsys):
        bundle = write_test_bundle(tmp_path / "b", **{"provenance.toml": ""})
        assert main(["validate", str(bundle)]) == 3

    def test_list_nodes(self, bundle_dir, capsys):
        assert main(["list-nodes", str(bundle_dir)]) == 0
        out = capsys.readouterr().out
        assert "10nm" in out and "16nm" in out

    def test_validate_matches_run_ingestion(self, tmp_path):
        # validate succeeds iff run passes ingestion on the same bundle
        good = write_test_bundle(tmp_path / "good")
        bad = write_test_bundle(tmp_path / "bad", **{"provenance.toml": ""})
        for bundle, expected in ((good, 0), (bad, 3)):
            scenario = tmp_path / f"s_{expected}.toml"
            scenario.write_text(
                f'[run]\nanalysis = "cpa"\ndataset = "{bundle}"\nseed = 1\nsamples = 1000\n'
                f'output = "{tmp_path / ("out_" + str(expected))}"\ngrid_points = 256\n'
                '[[cpa.targets]]\nnode = "10nm"\nas_of_year = 2019\n'
            )
            assert main(["validate", str(bundle)]) == expected
            assert main(["run", str(scenario)]) == expected
