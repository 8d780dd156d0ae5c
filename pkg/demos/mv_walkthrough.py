"""Walk the full pipeline on the bundled mv fixture, stage by stage.

Run from the repository root:

    python3 demos/mv_walkthrough.py
"""

from __future__ import annotations

import logging
from pathlib import Path

from racerepro.catalog import bundled_catalog, extract
from racerepro.csource import index_tree
from racerepro.harness import format_schedule, load_scenario, reproduce
from racerepro.mining import locate, rank_interleavings
from racerepro.reports import load_report
from racerepro.retrieval import rank_structured

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "mv_438076"


def main() -> None:
    report = load_report(FIXTURE / "mv_438076.txt")
    catalog = bundled_catalog()
    print(f"report: {report.id}")
    print(f"subject: {report.subject}")
    print()

    # --- stage 1: key system calls ---------------------------------------
    keys = extract(report, catalog)
    print(f"key system calls ({keys.path} path):")
    for entry in keys.entries:
        print(f"  {entry.name:8s} mentioned {entry.count}x")
    print()

    # --- stage 2: interleaving candidates ---------------------------------
    ranking = rank_interleavings(report, keys)
    print("mined interleaving candidates (pairs first, then singletons):")
    for entry in ranking.entries[:5]:
        print(f"  {{{', '.join(entry.items)}}} = {entry.frequency}")
    print()

    # --- stage 3: file ranking --------------------------------------------
    index = index_tree(FIXTURE / "src", frozenset(catalog.entries))
    ranked = rank_structured(report, keys, index)
    print("structured file ranking:")
    for rank_no, (path, score) in enumerate(ranked.entries[:3], 1):
        print(f"  {rank_no}. {path:10s} {score:.4f}")
    print()

    # --- stage 4: instrumentation points -----------------------------------
    points = locate(ranking, ranked, index)
    print(f"{len(points)} instrumentation points; the first three:")
    for point in points[:3]:
        partner = ""
        if point.pair_partner is not None:
            partner = f" (pairs with {point.pair_partner.syscall}@{point.pair_partner.line})"
        print(
            f"  {point.rank:3d}. {point.placement:12s} {point.syscall} "
            f"{point.file}:{point.function}:{point.line}{partner}"
        )
    print()

    # --- stage 5: reproduction ---------------------------------------------
    scenario = load_scenario(FIXTURE / "scenario.json")
    result = reproduce(scenario, points)
    print(f"reproduced: {result.reproduced} after {result.attempts} attempt(s)")
    print("failing schedule (the delay opens the unlink/rename window):")
    for line in format_schedule(scenario, result.schedule):
        print(f"  {line}")


if __name__ == "__main__":
    logging.basicConfig(level=logging.ERROR)
    main()
