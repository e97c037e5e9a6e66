import pytest

from fabcarbon import load_bundle, save_bundle
from fabcarbon.errors import (
    DuplicateNodeError,
    MissingProvenanceError,
    SchemaViolationError,
    SharesDontSumToOneError,
    UnitOutOfRangeError,
    UnknownNodeError,
)

from conftest import write_test_bundle


@pytest.fixture
def bundle_dir(tmp_path):
    return write_test_bundle(tmp_path / "bundle")


class TestLoad:
    def test_loads_nodes_and_histories(self, bundle_dir):
        bundle = load_bundle(bundle_dir)
        assert set(bundle.nodes) == {"10nm", "16nm"}
        assert set(bundle.ci_histories) == {"KR", "TW"}
        assert set(bundle.utilization_sets) == {"dc"}
        assert bundle.version == "test-1"
        node = bundle.node("10nm")
        assert node.capacity_shares == (("KR", 0.31), ("TW", 0.69))
        assert node.efficiency_at(2020) == 2.6

    def test_idempotent(self, bundle_dir):
        assert load_bundle(bundle_dir) == load_bundle(bundle_dir)

    def test_round_trip(self, bundle_dir, tmp_path):
        bundle = load_bundle(bundle_dir)
        save_bundle(bundle, tmp_path / "copy")
        assert load_bundle(tmp_path / "copy") == bundle

    def test_unknown_node_lookup(self, bundle_dir):
        bundle = load_bundle(bundle_dir)
        with pytest.raises(UnknownNodeError, match="3nm"):
            bundle.node("3nm")

    def test_empty_nodes_file_defers_to_unknown_node(self, tmp_path):
        # an empty nodes table is not an ingest error; resolution fails later
        root = write_test_bundle(
            tmp_path / "b",
            **{
                "nodes.csv": "name,epa_base_kwh_cm2,epa_anchor_year,mass_production_year,mpa_kgco2_cm2\n",
                "efficiency.csv": "node,year,multiplier\n",
                "defects.csv": "node,date,d0_per_cm2\n",
                "gases.csv": "node,gas,gwp,kg_per_cm2,rel_error_95,abatement\n",
                "capacity.csv": "node,region,share\n",
            },
        )
        bundle = load_bundle(root)
        assert bundle.nodes == {}
        with pytest.raises(UnknownNodeError):
            bundle.node("10nm")


class TestValidation:
    def test_duplicate_node(self, tmp_path):
        root = write_test_bundle(
            tmp_path / "b",
            **{
                "nodes.csv": (
                    "name,epa_base_kwh_cm2,epa_anchor_year,mass_production_year,mpa_kgco2_cm2\n"
                    "10nm,1.8,2020,2017,0.1\n"
                    "10nm,1.9,2020,2017,0.1\n"
                    "16nm,1.3,2020,2015,0.1\n"
                ),
            },
        )
        with pytest.raises(DuplicateNodeError):
            load_bundle(root)

    def test_shares_must_sum_to_one_names_node(self, tmp_path):
        root = write_test_bundle(
            tmp_path / "b",
            **{"capacity.csv": "node,region,share\n10nm,KR,0.5\n10nm,TW,0.6\n16nm,TW,1.0\n"},
        )
        with pytest.raises(SharesDontSumToOneError, match="10nm"):
            load_bundle(root)

    def test_valid_capacity_split(self, bundle_dir):
        # 0.31 + 0.69 validates
        bundle = load_bundle(bundle_dir)
        assert sum(s for _, s in bundle.node("10nm").capacity_shares) == pytest.approx(1.0)

    def test_negative_ci_rejected_with_location(self, tmp_path):
        root = write_test_bundle(
            tmp_path / "b",
            **{"ci/TW.csv": "timestamp,g_per_kwh\n2021-01-01T00:00:00,500\n2021-01-02T00:00:00,-5\n"},
        )
        with pytest.raises(UnitOutOfRangeError) as err:
            load_bundle(root)
        assert err.value.line == 3

    def test_missing_provenance(self, tmp_path):
        root = write_test_bundle(tmp_path / "b", **{"provenance.toml": ""})
        with pytest.raises(MissingProvenanceError):
            load_bundle(root)

    def test_unknown_node_in_auxiliary_file(self, tmp_path):
        root = write_test_bundle(
            tmp_path / "b",
            **{"efficiency.csv": "node,year,multiplier\n3nm,2023,1.0\n"},
        )
        with pytest.raises(SchemaViolationError, match="3nm"):
            load_bundle(root)

    def test_bad_header(self, tmp_path):
        root = write_test_bundle(tmp_path / "b", **{"defects.csv": "node,when,d0\n"})
        with pytest.raises(SchemaViolationError, match="header"):
            load_bundle(root)

    def test_unparseable_number_reports_line_and_column(self, tmp_path):
        root = write_test_bundle(
            tmp_path / "b",
            **{
                "nodes.csv": (
                    "name,epa_base_kwh_cm2,epa_anchor_year,mass_production_year,mpa_kgco2_cm2\n"
                    "10nm,not-a-number,2020,2017,0.1\n"
                    "16nm,1.3,2020,2015,0.1\n"
                )
            },
        )
        with pytest.raises(SchemaViolationError) as err:
            load_bundle(root)
        assert err.value.line == 2
        assert err.value.column == "epa_base_kwh_cm2"

    def test_missing_file(self, tmp_path):
        root = write_test_bundle(tmp_path / "b")
        (root / "gases.csv").unlink()
        with pytest.raises(SchemaViolationError, match="missing"):
            load_bundle(root)


class TestShippedBundle:
    DATA = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"

    def test_loads_and_round_trips(self, tmp_path):
        bundle = load_bundle(self.DATA)
        assert set(bundle.nodes) == {"28nm", "16nm", "14nm", "10nm", "7nm"}
        save_bundle(bundle, tmp_path / "copy")
        assert load_bundle(tmp_path / "copy") == bundle

    def test_every_data_file_has_provenance(self):
        bundle = load_bundle(self.DATA)
        files = {p.relative_to(self.DATA).as_posix() for p in self.DATA.rglob("*.csv")}
        assert files <= set(bundle.provenance)

    def test_transcribed_anchor_values(self):
        # the handful of directly quotable values are exact in the bundle
        bundle = load_bundle(self.DATA)
        node10 = bundle.node("10nm")
        assert dict(node10.capacity_shares) == {"KR": 0.31, "TW": 0.69}
        first, second = node10.defect_series[0], node10.defect_series[2]
        assert second[1] / first[1] == pytest.approx(0.94, abs=1e-12)  # -6% in half a year
        node28 = bundle.node("28nm")
        three_years_in = node28.efficiency_at(node28.mass_production_year + 3)
        assert three_years_in == pytest.approx(2.6, abs=1e-9)
