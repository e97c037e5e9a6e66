"""Dataset bundle: the on-disk contract for all model inputs.

Layout of a bundle directory::

    manifest.toml            # version = "...", name = "..."
    provenance.toml          # one [files."<relpath>"] table per data file
    nodes.csv                # name, epa_base_kwh_cm2, epa_anchor_year,
                             #   mass_production_year, mpa_kgco2_cm2
    efficiency.csv           # node, year, multiplier
    defects.csv              # node, date, d0_per_cm2
    gases.csv                # node, gas, gwp, kg_per_cm2, rel_error_95, abatement
    capacity.csv             # node, region, share
    ci/<region>.csv          # timestamp, g_per_kwh
    utilization/<name>.csv   # value

All values are stored in model units (cm2, kWh, kg CO2e, g CO2e/kWh).  Every
data file must have a provenance entry citing its source; synthetic or
approximated values are flagged ``synthetic = true`` there.  Loading is
side-effect free and validates everything up front, with errors that carry
file, line, and column.
"""

from __future__ import annotations

import csv
import datetime as _dt
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import (
    DuplicateNodeError,
    MissingProvenanceError,
    SchemaViolationError,
    SharesDontSumToOneError,
    UnitOutOfRangeError,
    UnknownNodeError,
)
from .params import GasEmission, RegionCIHistory, TechNode

NODE_COLUMNS = ("name", "epa_base_kwh_cm2", "epa_anchor_year", "mass_production_year", "mpa_kgco2_cm2")
EFFICIENCY_COLUMNS = ("node", "year", "multiplier")
DEFECT_COLUMNS = ("node", "date", "d0_per_cm2")
GAS_COLUMNS = ("node", "gas", "gwp", "kg_per_cm2", "rel_error_95", "abatement")
CAPACITY_COLUMNS = ("node", "region", "share")
CI_COLUMNS = ("timestamp", "g_per_kwh")
UTILIZATION_COLUMNS = ("value",)

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class Provenance:
    source: str
    synthetic: bool = False


@dataclass(frozen=True)
class DatasetBundle:
    """Validated, immutable view of one bundle directory."""

    root: Path = field(compare=False)
    version: str
    name: str
    nodes: dict[str, TechNode]
    ci_histories: dict[str, RegionCIHistory]
    utilization_sets: dict[str, tuple[float, ...]]
    provenance: dict[str, Provenance] = field(default_factory=dict)

    def node(self, name: str) -> TechNode:
        if name not in self.nodes:
            raise UnknownNodeError(f"node {name!r} not in bundle (have: {', '.join(sorted(self.nodes))})")
        return self.nodes[name]


def _read_rows(path: Path, columns: tuple[str, ...]) -> list[tuple[int, dict[str, str]]]:
    if not path.is_file():
        raise SchemaViolationError("file is missing", file=str(path))
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaViolationError("file is empty; expected a header row", file=str(path)) from None
        if [h.strip() for h in header] != list(columns):
            raise SchemaViolationError(
                f"header {header!r} != expected {list(columns)!r}", file=str(path), line=1
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(columns):
                raise SchemaViolationError(
                    f"expected {len(columns)} fields, got {len(row)}", file=str(path), line=lineno
                )
            rows.append((lineno, dict(zip(columns, (cell.strip() for cell in row)))))
    return rows


def _parse_float(value: str, path: Path, line: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SchemaViolationError(
            f"cannot parse {value!r} as a number", file=str(path), line=line, column=column
        ) from None


def _parse_int(value: str, path: Path, line: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SchemaViolationError(
            f"cannot parse {value!r} as an integer", file=str(path), line=line, column=column
        ) from None


def _parse_date(value: str, path: Path, line: int, column: str) -> _dt.date:
    try:
        return _dt.date.fromisoformat(value)
    except ValueError:
        raise SchemaViolationError(
            f"cannot parse {value!r} as an ISO date", file=str(path), line=line, column=column
        ) from None


def _parse_timestamp(value: str, path: Path, line: int, column: str) -> _dt.datetime:
    try:
        return _dt.datetime.fromisoformat(value)
    except ValueError:
        raise SchemaViolationError(
            f"cannot parse {value!r} as an ISO timestamp", file=str(path), line=line, column=column
        ) from None


def _load_toml(path: Path) -> dict:
    if not path.is_file():
        raise SchemaViolationError("file is missing", file=str(path))
    with path.open("rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise SchemaViolationError(f"invalid TOML: {exc}", file=str(path)) from None


def load_bundle(root: str | Path) -> DatasetBundle:
    """Load and fully validate a bundle directory.

    Pure and idempotent: loading the same directory twice yields structurally
    equal bundles.
    """
    root = Path(root)
    if not root.is_dir():
        raise SchemaViolationError("bundle root is not a directory", file=str(root))

    manifest = _load_toml(root / "manifest.toml")
    version = str(manifest.get("version", ""))
    if not version:
        raise SchemaViolationError("manifest must define a version", file=str(root / "manifest.toml"))
    bundle_name = str(manifest.get("name", root.name))

    prov_raw = _load_toml(root / "provenance.toml").get("files", {})
    provenance = {
        rel: Provenance(source=str(entry.get("source", "")), synthetic=bool(entry.get("synthetic", False)))
        for rel, entry in prov_raw.items()
    }
    for rel, prov in provenance.items():
        if not prov.source:
            raise MissingProvenanceError("provenance entry has an empty source", file=rel)

    def check_provenance(path: Path) -> None:
        rel = path.relative_to(root).as_posix()
        if rel not in provenance:
            raise MissingProvenanceError("data file has no provenance entry", file=rel)

    # nodes.csv
    nodes_path = root / "nodes.csv"
    check_provenance(nodes_path)
    node_rows: dict[str, dict] = {}
    for lineno, row in _read_rows(nodes_path, NODE_COLUMNS):
        name = row["name"]
        if name in node_rows:
            raise DuplicateNodeError(f"node {name!r} defined twice", file=str(nodes_path), line=lineno)
        epa = _parse_float(row["epa_base_kwh_cm2"], nodes_path, lineno, "epa_base_kwh_cm2")
        mpa = _parse_float(row["mpa_kgco2_cm2"], nodes_path, lineno, "mpa_kgco2_cm2")
        if epa <= 0.0:
            raise UnitOutOfRangeError(f"epa_base must be > 0, got {epa}", file=str(nodes_path), line=lineno)
        if mpa < 0.0:
            raise UnitOutOfRangeError(f"mpa must be >= 0, got {mpa}", file=str(nodes_path), line=lineno)
        node_rows[name] = {
            "epa_base": epa,
            "epa_anchor_year": _parse_int(row["epa_anchor_year"], nodes_path, lineno, "epa_anchor_year"),
            "mass_production_year": _parse_int(
                row["mass_production_year"], nodes_path, lineno, "mass_production_year"
            ),
            "mpa": mpa,
            "efficiency": [],
            "defects": [],
            "gases": [],
            "capacity": [],
        }

    def node_entry(name: str, path: Path, lineno: int) -> dict:
        if name not in node_rows:
            raise SchemaViolationError(f"unknown node {name!r}", file=str(path), line=lineno, column="node")
        return node_rows[name]

    # efficiency.csv
    eff_path = root / "efficiency.csv"
    check_provenance(eff_path)
    for lineno, row in _read_rows(eff_path, EFFICIENCY_COLUMNS):
        mult = _parse_float(row["multiplier"], eff_path, lineno, "multiplier")
        if mult < 1.0:
            raise UnitOutOfRangeError(f"multiplier must be >= 1, got {mult}", file=str(eff_path), line=lineno)
        node_entry(row["node"], eff_path, lineno)["efficiency"].append(
            (_parse_int(row["year"], eff_path, lineno, "year"), mult)
        )

    # defects.csv
    defects_path = root / "defects.csv"
    check_provenance(defects_path)
    for lineno, row in _read_rows(defects_path, DEFECT_COLUMNS):
        d0 = _parse_float(row["d0_per_cm2"], defects_path, lineno, "d0_per_cm2")
        if d0 <= 0.0:
            raise UnitOutOfRangeError(f"d0 must be > 0, got {d0}", file=str(defects_path), line=lineno)
        node_entry(row["node"], defects_path, lineno)["defects"].append(
            (_parse_date(row["date"], defects_path, lineno, "date"), d0)
        )

    # gases.csv
    gases_path = root / "gases.csv"
    check_provenance(gases_path)
    for lineno, row in _read_rows(gases_path, GAS_COLUMNS):
        gwp = _parse_float(row["gwp"], gases_path, lineno, "gwp")
        kg = _parse_float(row["kg_per_cm2"], gases_path, lineno, "kg_per_cm2")
        rel = _parse_float(row["rel_error_95"], gases_path, lineno, "rel_error_95")
        abat = _parse_float(row["abatement"], gases_path, lineno, "abatement")
        if gwp <= 0.0 or kg < 0.0 or rel < 0.0 or not 0.0 <= abat <= 1.0:
            raise UnitOutOfRangeError(
                f"gas row out of range (gwp={gwp}, kg={kg}, rel={rel}, abatement={abat})",
                file=str(gases_path), line=lineno,
            )
        node_entry(row["node"], gases_path, lineno)["gases"].append(
            GasEmission(gas=row["gas"], gwp=gwp, emission_per_area=kg, rel_error_95=rel, abatement=abat)
        )

    # capacity.csv
    cap_path = root / "capacity.csv"
    check_provenance(cap_path)
    for lineno, row in _read_rows(cap_path, CAPACITY_COLUMNS):
        share = _parse_float(row["share"], cap_path, lineno, "share")
        if not 0.0 <= share <= 1.0:
            raise UnitOutOfRangeError(f"share must be in [0, 1], got {share}", file=str(cap_path), line=lineno)
        node_entry(row["node"], cap_path, lineno)["capacity"].append((row["region"], share))
    for name, entry in node_rows.items():
        if entry["capacity"]:
            total = sum(s for _, s in entry["capacity"])
            if abs(total - 1.0) > SHARE_TOL:
                raise SharesDontSumToOneError(
                    f"{cap_path}: node {name!r}: capacity shares sum to {total!r}"
                )

    # ci/<region>.csv
    ci_histories: dict[str, RegionCIHistory] = {}
    ci_dir = root / "ci"
    if ci_dir.is_dir():
        for path in sorted(ci_dir.glob("*.csv")):
            check_provenance(path)
            records = []
            for lineno, row in _read_rows(path, CI_COLUMNS):
                value = _parse_float(row["g_per_kwh"], path, lineno, "g_per_kwh")
                if value < 0.0:
                    raise UnitOutOfRangeError(
                        f"carbon intensity must be >= 0, got {value}", file=str(path), line=lineno
                    )
                records.append((_parse_timestamp(row["timestamp"], path, lineno, "timestamp"), value))
            region = path.stem
            try:
                ci_histories[region] = RegionCIHistory(region=region, records=tuple(records))
            except Exception as exc:
                raise SchemaViolationError(str(exc), file=str(path)) from None

    # utilization/<name>.csv
    utilization_sets: dict[str, tuple[float, ...]] = {}
    util_dir = root / "utilization"
    if util_dir.is_dir():
        for path in sorted(util_dir.glob("*.csv")):
            check_provenance(path)
            values = []
            for lineno, row in _read_rows(path, UTILIZATION_COLUMNS):
                value = _parse_float(row["value"], path, lineno, "value")
                if not 0.0 <= value <= 1.0:
                    raise UnitOutOfRangeError(
                        f"utilization must be in [0, 1], got {value}", file=str(path), line=lineno
                    )
                values.append(value)
            if not values:
                raise SchemaViolationError("utilization set is empty", file=str(path))
            utilization_sets[path.stem] = tuple(values)

    nodes: dict[str, TechNode] = {}
    for name, entry in node_rows.items():
        try:
            nodes[name] = TechNode(
                name=name,
                epa_base=entry["epa_base"],
                epa_anchor_year=entry["epa_anchor_year"],
                mass_production_year=entry["mass_production_year"],
                mpa=entry["mpa"],
                efficiency_series=tuple(sorted(entry["efficiency"])),
                defect_series=tuple(sorted(entry["defects"])),
                gas_inventory=tuple(entry["gases"]),
                capacity_shares=tuple(entry["capacity"]),
            )
        except Exception as exc:
            raise SchemaViolationError(f"node {name!r}: {exc}", file=str(nodes_path)) from None

    for region, hist in ci_histories.items():
        if not hist.records:
            raise SchemaViolationError(f"region {region!r} has no CI records", file=str(ci_dir))

    return DatasetBundle(
        root=root,
        version=version,
        name=bundle_name,
        nodes=nodes,
        ci_histories=ci_histories,
        utilization_sets=utilization_sets,
        provenance=provenance,
    )


def save_bundle(bundle: DatasetBundle, root: str | Path) -> None:
    """Write a bundle back to the directory layout (round-trips exactly)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / "ci").mkdir(exist_ok=True)
    (root / "utilization").mkdir(exist_ok=True)

    (root / "manifest.toml").write_text(
        f'version = "{bundle.version}"\nname = "{bundle.name}"\n'
    )
    lines = []
    for rel in sorted(bundle.provenance):
        prov = bundle.provenance[rel]
        lines.append(f'[files."{rel}"]')
        lines.append(f'source = "{prov.source}"')
        lines.append(f"synthetic = {'true' if prov.synthetic else 'false'}")
        lines.append("")
    (root / "provenance.toml").write_text("\n".join(lines))

    def write_csv(path: Path, columns: tuple[str, ...], rows) -> None:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(rows)

    write_csv(
        root / "nodes.csv",
        NODE_COLUMNS,
        [
            (n.name, repr(float(n.epa_base)), n.epa_anchor_year, n.mass_production_year, repr(float(n.mpa)))
            for n in bundle.nodes.values()
        ],
    )
    write_csv(
        root / "efficiency.csv",
        EFFICIENCY_COLUMNS,
        [(n.name, y, repr(float(m))) for n in bundle.nodes.values() for y, m in n.efficiency_series],
    )
    write_csv(
        root / "defects.csv",
        DEFECT_COLUMNS,
        [(n.name, d.isoformat(), repr(float(v))) for n in bundle.nodes.values() for d, v in n.defect_series],
    )
    write_csv(
        root / "gases.csv",
        GAS_COLUMNS,
        [
            (n.name, g.gas, repr(float(g.gwp)), repr(float(g.emission_per_area)), repr(float(g.rel_error_95)), repr(float(g.abatement)))
            for n in bundle.nodes.values()
            for g in n.gas_inventory
        ],
    )
    write_csv(
        root / "capacity.csv",
        CAPACITY_COLUMNS,
        [(n.name, region, repr(float(share))) for n in bundle.nodes.values() for region, share in n.capacity_shares],
    )
    for region, hist in bundle.ci_histories.items():
        write_csv(
            root / "ci" / f"{region}.csv",
            CI_COLUMNS,
            [(t.isoformat(), repr(float(v))) for t, v in hist.records],
        )
    for name, values in bundle.utilization_sets.items():
        write_csv(root / "utilization" / f"{name}.csv", UTILIZATION_COLUMNS, [(repr(float(v)),) for v in values])
