"""End-to-end orchestration: resolve, tune, synth, index-dump.

Stages run sequentially (load -> dedup -> index -> link -> components
-> emit); each is timed and sized for the run report, which mirrors the
intermediate-output table used when benchmarking the full pipeline:
records, distinct records, candidate signatures, pairwise links,
verified links, connected components.
"""

from __future__ import annotations

import gc
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import cc, linker
from .config import PipelineConfig
from .errors import ConfigError, SiglinkError
from .evaluation import GridSearchResult, grid_search, load_truth, write_results_csv
from .indexer import IndexStats, build_raw_postings, dump_index, index_from_postings
from .records import Record, deduplicate, load_csv_with_keys
from .synth import generate_dataset, write_dataset

log = logging.getLogger(__name__)


@dataclass
class StageRow:
    name: str
    size: int
    seconds: float


@dataclass
class RunReport:
    rows: list[StageRow] = field(default_factory=list)
    overall_seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def add(self, name: str, size: int, seconds: float) -> None:
        self.rows.append(StageRow(name, size, seconds))

    def to_text(self) -> str:
        width = max(len(r.name) for r in self.rows) + 2
        lines = [f"{'Stage':<{width}}{'Size':>15} {'Time':>12}"]
        for r in self.rows:
            lines.append(f"{r.name:<{width}}{r.size:>15,} {r.seconds:>10.2f} s")
        lines.append(f"{'Overall':<{width}}{'':>15} {self.overall_seconds:>10.2f} s")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "stages": [
                {"name": r.name, "size": r.size, "seconds": round(r.seconds, 4)}
                for r in self.rows
            ],
            "overall_seconds": round(self.overall_seconds, 4),
            **self.extra,
        }


@dataclass
class PreparedData:
    raw_count: int
    canonical_records: list[Record]
    records_by_id: dict[int, Record]
    alias_map: dict[int, int]
    source_of: dict[int, str]
    original_ids: list[int]
    native_maps: dict[str, dict[str, int]]
    load_seconds: float
    dedup_seconds: float


def _require(config: PipelineConfig, command: str, **sections) -> None:
    missing = [name for name, value in sections.items() if not value]
    if missing:
        raise ConfigError(f"'{command}' requires config section(s): {', '.join(missing)}")


def prepare(config: PipelineConfig) -> PreparedData:
    """Load and deduplicate all configured sources.

    Two-dataset runs get disjoint id ranges (source a from 0, source b
    from ``source_b_id_base``) and are deduplicated per source, so
    cross-source exact duplicates stay distinct records for linkage.
    """
    t0 = time.perf_counter()
    loaded: dict[str, list[Record]] = {}
    native_maps: dict[str, dict[str, int]] = {}
    for tag in sorted(config.inputs):
        spec = config.inputs[tag]
        base = config.source_b_id_base if tag == "b" else 0
        result = load_csv_with_keys(
            spec.path, config.schema, tag,
            id_base=base, column_map=spec.columns,
            key_column=spec.id_column, encoding=spec.encoding,
        )
        loaded[tag] = result.records
        native_maps[tag] = result.native_ids
    if "a" in loaded and len(loaded["a"]) >= config.source_b_id_base:
        raise ConfigError(
            f"source a has {len(loaded['a'])} rows, which collides with "
            f"source_b_id_base={config.source_b_id_base}; raise the base"
        )
    load_seconds = time.perf_counter() - t0

    t1 = time.perf_counter()
    canonical: list[Record] = []
    alias: dict[int, int] = {}
    source_of: dict[int, str] = {}
    for tag in sorted(loaded):
        dedup = deduplicate(loaded[tag])
        canonical.extend(dedup.canonical)
        alias.update(dedup.alias_map)
        for rec in loaded[tag]:
            source_of[rec.id] = tag
    dedup_seconds = time.perf_counter() - t1
    return PreparedData(
        raw_count=sum(len(v) for v in loaded.values()),
        canonical_records=canonical,
        records_by_id={r.id: r for r in canonical},
        alias_map=alias,
        source_of=source_of,
        original_ids=sorted(alias),
        native_maps=native_maps,
        load_seconds=load_seconds,
        dedup_seconds=dedup_seconds,
    )


def _stage(name: str):
    """Re-raise stage failures with the stage name attached."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, SiglinkError):
                exc.args = (f"[stage {name}] {exc}",)
            return False
    return _Ctx()


@contextmanager
def _batch_allocation_mode():
    """Suspend cyclic GC while building the big intermediate tables.

    The build stages allocate millions of long-lived records, postings,
    and evidence rows; generational collection rescans them over and
    over without freeing anything. Restored on exit, including errors.
    """
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


@dataclass
class ResolveResult:
    clusters_path: Path
    links_path: Path
    report_path: Path
    report: RunReport
    labelling: dict[int, int]
    links: list[linker.Link]


def run_resolve(config: PipelineConfig, out_dir: Path | None = None,
                threads: int = 1) -> ResolveResult:
    """Run the full pipeline and emit clusters.csv, links.csv, and the
    run report. Identical config and inputs produce identical bytes."""
    _require(config, "resolve", inputs=config.inputs, templates=config.templates,
             model=config.model, link=config.link)
    out = Path(out_dir) if out_dir is not None else config.output_dir
    t_start = time.perf_counter()
    report = RunReport()

    with _batch_allocation_mode():
        with _stage("load"):
            data = prepare(config)
        report.add("Records", data.raw_count, data.load_seconds)
        report.add("Distinct records", len(data.canonical_records), data.dedup_seconds)

        with _stage("index"):
            t0 = time.perf_counter()
            stats = IndexStats()
            raw = build_raw_postings(data.canonical_records, config.templates,
                                     config.extract_options, stats)
            index = index_from_postings(raw, config.model, config.link.rho, stats)
            index_seconds = time.perf_counter() - t0
        report.add("Candidate signatures", stats.candidate_instances, index_seconds)

        with _stage("link"):
            t0 = time.perf_counter()
            tuples = linker.generate(
                index,
                cross_source_only=config.link.cross_source_only,
                source_of=data.source_of,
            )
            groups = linker.group_pairs(tuples)
            pairs = linker.combine_pairs(groups, skip_elimination=config.link.skip_elimination)
            over_tau = [p for p in pairs if p.probability > config.link.tau]
            pair_seconds = time.perf_counter() - t0

            t0 = time.perf_counter()
            verifier = linker.make_verifier(config.link.verifier)
            verified = linker.verify_pairs(over_tau, verifier, data.records_by_id)
            links = [
                linker.Link(p.r_i, p.r_j, p.probability, p.evidence_count)
                for p in verified if p.verified
            ]
            verify_seconds = time.perf_counter() - t0
        report.add("Pairwise links", len(over_tau), pair_seconds)
        report.add("Verified links", len(links), verify_seconds)

        with _stage("components"):
            t0 = time.perf_counter()
            cc_stats: dict = {}
            labels = cc.connected_components(
                [(l.r_i, l.r_j) for l in links],
                nodes=data.records_by_id,
                stats=cc_stats,
            )
            labelling = {orig: labels[data.alias_map[orig]] for orig in data.original_ids}
            n_components = len(set(labels.values()))
            cc_seconds = time.perf_counter() - t0
        report.add("Connected components", n_components, cc_seconds)

    report.overall_seconds = time.perf_counter() - t_start
    report.extra = {
        "index": {
            "entries_kept": len(index.entries),
            "total_keys_seen": stats.total_keys_seen,
            "keys_pruned_by_rho": stats.keys_pruned_by_rho,
            "max_posting_len": stats.max_posting_len,
            "k_max": index.k_max,
            "cap_skipped_record_templates": stats.extraction.cap_skipped,
            "long_attr_random_skips": stats.extraction.long_attr_random_skips,
        },
        "components": cc_stats,
        "threads": threads,
    }

    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        clusters_path = out / "clusters.csv"
        with clusters_path.open("w", newline="", encoding="utf-8") as fh:
            written.append(clusters_path)
            fh.write("record_id,entity_id\n")
            for orig in data.original_ids:
                fh.write(f"{orig},{labelling[orig]}\n")
        links_path = out / "links.csv"
        with links_path.open("w", newline="", encoding="utf-8") as fh:
            written.append(links_path)
            fh.write("id_a,id_b,probability,evidence_count\n")
            for l in links:
                fh.write(f"{l.r_i},{l.r_j},{l.probability!r},{l.evidence_count}\n")
        report_path = out / "report.json"
        with report_path.open("w", encoding="utf-8") as fh:
            written.append(report_path)
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        (out / "report.txt").write_text(report.to_text() + "\n", encoding="utf-8")
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        (out / "report.txt").unlink(missing_ok=True)
        raise
    return ResolveResult(
        clusters_path=clusters_path,
        links_path=links_path,
        report_path=report_path,
        report=report,
        labelling=labelling,
        links=links,
    )


@dataclass
class TuneResult:
    results_path: Path
    best_params_path: Path
    search: GridSearchResult


def run_tune(config: PipelineConfig, out_dir: Path | None = None,
             threads: int = 1) -> TuneResult:
    """Grid-search (a, b, rho, tau) against ground truth and write the
    full results table plus the best parameter set."""
    _require(config, "tune", inputs=config.inputs, templates=config.templates,
             truth=config.truth, grids=config.grids)
    out = Path(out_dir) if out_dir is not None else config.output_dir
    with _batch_allocation_mode(), _stage("load"):
        data = prepare(config)
        if config.two_sources:
            native_a, native_b = data.native_maps["a"], data.native_maps["b"]
            scope = "cross_source"
        else:
            native_a = native_b = data.native_maps["single"]
            scope = "all"
        if not native_a or not native_b:
            raise ConfigError("'tune' needs id_column set on every input so truth keys resolve")
        truth = load_truth(
            config.truth.path, native_a, native_b,
            column_a=config.truth.column_a, column_b=config.truth.column_b,
            encoding=config.truth.encoding,
        )
    with _batch_allocation_mode(), _stage("index"):
        raw = build_raw_postings(data.canonical_records, config.templates,
                                 config.extract_options)
    link = config.link
    with _stage("search"):
        search = grid_search(
            raw,
            config.grids.a, config.grids.b, config.grids.rho, config.grids.tau,
            truth=truth,
            alias_map=data.alias_map,
            original_ids=data.original_ids,
            canonical_ids=[r.id for r in data.canonical_records],
            source_of=data.source_of,
            records_by_id=data.records_by_id,
            cross_source_only=link.cross_source_only if link else config.two_sources,
            verifier=linker.make_verifier(link.verifier) if link else None,
            skip_elimination=link.skip_elimination if link else False,
            k_cap=config.model.k_cap if config.model else 10_000,
            scope=scope,
            threads=threads,
        )
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / "tune_results.csv"
    with results_path.open("w", newline="", encoding="utf-8") as fh:
        write_results_csv(search, fh)
    best = search.best
    best_params_path = out / "best_params.yaml"
    best_params_path.write_text(
        yaml.safe_dump({
            "model": {"a": best.params.a, "b": best.params.b},
            "link": {"rho": best.params.rho, "tau": best.params.tau},
            "f_measure": round(best.metrics.f_measure, 6),
            "precision": round(best.metrics.precision, 6),
            "recall": round(best.metrics.recall, 6),
        }, sort_keys=False),
        encoding="utf-8",
    )
    return TuneResult(results_path=results_path, best_params_path=best_params_path,
                      search=search)


def run_synth(config: PipelineConfig, out_dir: Path | None = None) -> tuple[Path, Path]:
    """Generate the configured synthetic dataset and its ground truth."""
    _require(config, "synth", synth=config.synth)
    out = Path(out_dir) if out_dir is not None else config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    s = config.synth
    rows, truth = generate_dataset(
        s.n_entities, s.records_per_entity, s.corruption_rate, s.seed
    )
    records_path, truth_path = out / "records.csv", out / "truth.csv"
    write_dataset(rows, truth, records_path, truth_path)
    return records_path, truth_path


def run_index_dump(config: PipelineConfig, out_dir: Path | None = None) -> Path:
    """Build the inverted index and write its diagnostic dump."""
    _require(config, "index-dump", inputs=config.inputs, templates=config.templates,
             model=config.model, link=config.link)
    out = Path(out_dir) if out_dir is not None else config.output_dir
    with _stage("load"):
        data = prepare(config)
    with _stage("index"):
        stats = IndexStats()
        raw = build_raw_postings(data.canonical_records, config.templates,
                                 config.extract_options, stats)
        index = index_from_postings(raw, config.model, config.link.rho, stats)
    out.mkdir(parents=True, exist_ok=True)
    dump_path = out / "index.tsv"
    with dump_path.open("w", encoding="utf-8") as fh:
        n = dump_index(index, fh)
    log.info("wrote %d index entries (k_max=%d, pruned %d of %d keys)",
             n, index.k_max, stats.keys_pruned_by_rho, stats.total_keys_seen)
    return dump_path
