"""Evaluation metrics and the fixture experiment driver.

Metric arithmetic is exact: AP over relevant ranks {1,3} is 0.8333..., not
a rounded 0.8.  The experiment driver runs the full pipeline per fixture
and emits one row per bug with the standard column set (BRk, SRk, Rank,
ORnk, Rec, MAP, Suc, NoR, Time); wall time belongs to human-readable
output only, never to structured artifacts, which stay byte-deterministic.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog as catalog_mod
from . import harness as harness_mod
from . import mining, retrieval
from .catalog import Catalog, KeySystemCalls
from .csource import SourceIndex, index_tree
from .mining import InstrumentationPoint, PairRanking, RankEntry, locate
from .reports import BugReport, load_report
from .retrieval import RankedFiles

DEFAULT_RECALL_K = 20

MODE_BASIC_IR = "basic-ir"
MODE_STRUCTURED_IR = "structured-ir"
MODE_NO_APRIORI = "no-apriori"
MODE_APRIORI = "apriori"
MODE_RANDOM_BASELINE = "random-baseline"
MODE_PERTURBED = "perturbed"

MODES = (
    MODE_BASIC_IR,
    MODE_STRUCTURED_IR,
    MODE_NO_APRIORI,
    MODE_APRIORI,
    MODE_RANDOM_BASELINE,
    MODE_PERTURBED,
)


class ConfigError(ValueError):
    """Configuration problems that should surface as usage errors (exit 2)."""


# --- ranked-retrieval metrics -----------------------------------------------

def average_precision(ranked: list, relevant: set) -> float:
    """Mean over relevant items of (relevant seen so far) / rank.

    Relevant items missing from the ranking contribute 0.
    """
    if not relevant:
        raise ValueError("relevant set must be non-empty")
    hits = 0
    total = 0.0
    for rank, item in enumerate(ranked, start=1):
        if item in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def recall_at_k(ranked: list, relevant: set, k: int = DEFAULT_RECALL_K) -> float:
    """|relevant in the top k| / |relevant|."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not relevant:
        raise ValueError("relevant set must be non-empty")
    top = set(ranked[:k])
    return len(top & relevant) / len(relevant)


def annotator_agreement(agreements: int, total: int) -> float:
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= agreements <= total:
        raise ValueError(f"agreements must be in [0, {total}], got {agreements}")
    return agreements / total


# --- report perturbation ----------------------------------------------------

def perturb_report(report: BugReport, fraction: float, seed: int) -> BugReport:
    """Remove floor(fraction * wordcount) body words, uniformly per seed.

    The subject is untouched.  When no words are removed the report is
    returned unchanged; otherwise the body is rejoined with single spaces.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    words = report.body.split()
    n_remove = int(fraction * len(words))
    if n_remove == 0:
        return report
    rng = random.Random(seed)
    removed = set(rng.sample(range(len(words)), n_remove))
    kept = [w for i, w in enumerate(words) if i not in removed]
    return BugReport.from_parts(report.id, report.subject, " ".join(kept))


# --- ground truth -----------------------------------------------------------

SiteId = tuple[str, str, str, int]  # (syscall, file, function, line)


@dataclass
class GroundTruth:
    bug_id: str
    expected_files: list[str]
    expected_syscalls: list[SiteId]

    def __post_init__(self) -> None:
        if not self.expected_syscalls:
            raise ValueError("ground truth needs at least one expected syscall")


def load_ground_truth(path: str | Path) -> GroundTruth:
    data = json.loads(Path(path).read_text("utf-8"))
    return GroundTruth(
        bug_id=str(data["id"]),
        expected_files=[str(f) for f in data["files"]],
        expected_syscalls=[
            (s["syscall"], s["file"], s["function"], int(s["line"]))
            for s in data["syscalls"]
        ],
    )


def location_ranking(points: list[InstrumentationPoint]) -> list[SiteId]:
    """Ranked distinct syscall locations implied by the point list.

    A between-pair point contributes its anchor first, then its partner;
    repeat visits of a site (before/after twins, later files) keep the
    first occurrence.
    """
    seen: set[SiteId] = set()
    out: list[SiteId] = []
    for point in points:
        ids = [(point.syscall, point.file, point.function, point.line)]
        if point.pair_partner is not None:
            p = point.pair_partner
            ids.append((p.syscall, p.file, p.function, p.line))
        for site_id in ids:
            if site_id not in seen:
                seen.add(site_id)
                out.append(site_id)
    return out


# --- experiment driver ------------------------------------------------------

@dataclass
class FixtureBundle:
    bug_id: str
    report_path: Path
    src_root: Path
    scenario_path: Path
    ground_truth_path: Path | None = None
    man_dir: Path | None = None

    def __post_init__(self) -> None:
        self.report_path = Path(self.report_path)
        self.src_root = Path(self.src_root)
        self.scenario_path = Path(self.scenario_path)
        if self.ground_truth_path is not None:
            self.ground_truth_path = Path(self.ground_truth_path)
        if self.man_dir is not None:
            self.man_dir = Path(self.man_dir)


@dataclass
class ExperimentConfig:
    mode: str = MODE_STRUCTURED_IR
    perturb_fraction: float | None = None
    seed: int | None = None
    n_derived: int = catalog_mod.DEFAULT_DERIVED_N
    top_files: int = retrieval.DEFAULT_TOP_FILES
    recall_k: int = DEFAULT_RECALL_K
    max_attempts: int = harness_mod.DEFAULT_MAX_ATTEMPTS
    include_subject: bool = False


def parse_mode(text: str) -> tuple[str, float | None]:
    """Parse a mode flag; ``perturbed@0.5`` carries its removal fraction."""
    if text.startswith(MODE_PERTURBED + "@"):
        raw = text[len(MODE_PERTURBED) + 1 :]
        try:
            fraction = float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad perturbation fraction: {raw!r}") from exc
        if not 0.0 <= fraction <= 1.0:
            raise ConfigError(f"perturbation fraction must be in [0, 1], got {fraction}")
        return MODE_PERTURBED, fraction
    if text == MODE_PERTURBED:
        raise ConfigError("perturbed mode needs a fraction: perturbed@<f>")
    if text not in MODES:
        raise ConfigError(f"unknown mode {text!r}; expected one of {', '.join(MODES)}")
    return text, None


def _validate_config(config: ExperimentConfig) -> None:
    if config.mode not in MODES:
        raise ConfigError(f"unknown mode {config.mode!r}")
    if config.mode == MODE_PERTURBED and config.perturb_fraction is None:
        raise ConfigError("perturbed mode needs perturb_fraction")
    stochastic = config.mode in (MODE_RANDOM_BASELINE, MODE_PERTURBED)
    if stochastic and config.seed is None:
        raise ConfigError(f"mode {config.mode!r} is stochastic and requires a seed")
    for name in ("n_derived", "top_files", "recall_k", "max_attempts"):
        if getattr(config, name) < 1:
            raise ConfigError(f"{name} must be >= 1")


def no_apriori_ranking(keys: KeySystemCalls) -> PairRanking:
    """Ablation: singletons by raw mention count, no pair formation."""
    counts = {entry.name: entry.count for entry in keys.entries}
    entries = [
        RankEntry(items=(name,), frequency=count)
        for name, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    ]
    return PairRanking(entries=entries)


@dataclass
class ExperimentRow:
    bug_id: str
    mode: str
    brk: int | None = None  # best BasicIR rank of an expected file
    srk: int | None = None  # best structured rank of an expected file
    rank: list[int | None] = field(default_factory=list)  # GT locations, apriori
    ornk: list[int | None] = field(default_factory=list)  # GT locations, no-apriori
    rec: float | None = None
    map_score: float | None = None
    suc: str = "N"
    nor: int = 0
    time_s: float = 0.0  # human output only; never serialized into artifacts
    unscored: bool = False
    notes: str = ""


def _best_file_rank(ranked: RankedFiles, expected_files: list[str]) -> int | None:
    ranks = [r for f in expected_files if (r := ranked.rank_of(f)) is not None]
    return min(ranks) if ranks else None


def _gt_location_ranks(
    points: list[InstrumentationPoint], truth: GroundTruth
) -> list[int | None]:
    ranking = location_ranking(points)
    positions = {site_id: i for i, site_id in enumerate(ranking, start=1)}
    return [positions.get(site_id) for site_id in truth.expected_syscalls]


def run_fixture(
    bundle: FixtureBundle, config: ExperimentConfig, catalog: Catalog | None = None
) -> ExperimentRow:
    """Run the pipeline on one fixture and score it against its ground truth."""
    _validate_config(config)
    start = time.perf_counter()
    row = ExperimentRow(bug_id=bundle.bug_id, mode=config.mode)

    report = load_report(bundle.report_path)
    if config.mode == MODE_PERTURBED:
        report = perturb_report(report, config.perturb_fraction, config.seed)
    if catalog is None:
        catalog = (
            catalog_mod.load_catalog(bundle.man_dir)
            if bundle.man_dir is not None
            else catalog_mod.bundled_catalog()
        )
    index: SourceIndex = index_tree(bundle.src_root, frozenset(catalog.entries))
    scenario = harness_mod.load_scenario(bundle.scenario_path)
    truth = (
        load_ground_truth(bundle.ground_truth_path)
        if bundle.ground_truth_path is not None and bundle.ground_truth_path.exists()
        else None
    )

    keys = catalog_mod.extract(report, catalog, config.n_derived)
    basic = retrieval.rank_basic(report, index.docs)
    structured = retrieval.rank_structured(report, keys, index.docs)
    file_ranking = basic if config.mode == MODE_BASIC_IR else structured

    apriori = mining.rank_interleavings(report, keys, config.include_subject)
    ablation = no_apriori_ranking(keys)
    active = ablation if config.mode == MODE_NO_APRIORI else apriori
    points = locate(active, file_ranking, index, config.top_files)

    if config.mode == MODE_RANDOM_BASELINE:
        result = harness_mod.random_baseline(scenario, config.max_attempts, config.seed)
    else:
        result = harness_mod.reproduce(scenario, points, config.max_attempts)
    row.suc = "Y" if result.reproduced else "N"
    row.nor = result.attempts

    if truth is None:
        row.unscored = True
        row.notes = "no ground truth"
    else:
        row.brk = _best_file_rank(basic, truth.expected_files)
        row.srk = _best_file_rank(structured, truth.expected_files)
        row.rank = _gt_location_ranks(
            locate(apriori, file_ranking, index, config.top_files), truth
        )
        row.ornk = _gt_location_ranks(
            locate(ablation, file_ranking, index, config.top_files), truth
        )
        ranking = location_ranking(points)
        relevant = set(truth.expected_syscalls)
        row.rec = recall_at_k(ranking, relevant, config.recall_k)
        row.map_score = average_precision(ranking, relevant)

    row.time_s = time.perf_counter() - start
    return row


def run_experiment(
    corpus: list[FixtureBundle],
    config: ExperimentConfig,
    catalog: Catalog | None = None,
) -> list[ExperimentRow]:
    """One scored row per fixture; an empty corpus gives an empty table."""
    return [run_fixture(bundle, config, catalog) for bundle in corpus]


# --- rendering --------------------------------------------------------------

def _fmt_ranks(ranks: list[int | None]) -> str:
    if not ranks:
        return "-"
    return ",".join(str(r) if r is not None else "inf" for r in ranks)


def render_table(rows: list[ExperimentRow], include_time: bool = True) -> str:
    """Tab-separated table mirroring the results-table column structure."""
    header = ["Bug", "Mode", "BRk", "SRk", "Rank", "ORnk", "Rec", "MAP", "Suc", "NoR"]
    if include_time:
        header.append("Time(s)")
    lines = ["\t".join(header)]
    for row in rows:
        cells = [
            row.bug_id,
            row.mode,
            str(row.brk) if row.brk is not None else "-",
            str(row.srk) if row.srk is not None else "-",
            _fmt_ranks(row.rank),
            _fmt_ranks(row.ornk),
            f"{row.rec:.4f}" if row.rec is not None else "-",
            f"{row.map_score:.4f}" if row.map_score is not None else "-",
            row.suc,
            str(row.nor),
        ]
        if include_time:
            cells.append(f"{row.time_s:.3f}")
        lines.append("\t".join(cells))
    return "\n".join(lines)


def row_to_json(row: ExperimentRow) -> dict:
    """Structured row for artifact files; deterministic (wall time excluded)."""
    return {
        "bug_id": row.bug_id,
        "mode": row.mode,
        "brk": row.brk,
        "srk": row.srk,
        "rank": row.rank,
        "ornk": row.ornk,
        "rec": row.rec,
        "map": row.map_score,
        "suc": row.suc,
        "nor": row.nor,
        "unscored": row.unscored,
        "notes": row.notes,
    }
