"""Reproduce the worked pair-mining table from three report sentences.

The miner treats each sentence's syscall mentions as one transaction,
counts singleton occurrences and pairwise co-occurring transactions,
prunes pairs that never co-occur, and ranks pairs above singletons.

    python3 demos/worked_table.py
"""

from __future__ import annotations

import logging

from racerepro.mining import TransactionDB, mine_pairs

TRANSACTIONS = [
    (0, ["unlink", "rename"]),
    (1, ["link", "rename", "rename", "rename"]),
    (2, ["unlink", "rename"]),
]


def main() -> None:
    print("transactions (one per sentence):")
    for idx, items in TRANSACTIONS:
        print(f"  t{idx}: [{' '.join(items)}]")
    print()

    ranking = mine_pairs(TransactionDB(transactions=TRANSACTIONS))

    print("singleton support (total mentions):")
    for entry in ranking.singletons:
        print(f"  {{{entry.items[0]}}} = {entry.frequency}")
    print()

    print("pair support (transactions containing both members):")
    for entry in ranking.pairs:
        print(f"  {{{', '.join(entry.items)}}} = {entry.frequency}")
    print("  {unlink, link} pruned: never co-occurs")
    print()

    print("final ranking (pairs first, frequency descending):")
    for rank_no, entry in enumerate(ranking.entries, 1):
        print(f"  {rank_no}. {{{', '.join(entry.items)}}} = {entry.frequency}")


if __name__ == "__main__":
    logging.basicConfig(level=logging.ERROR)
    main()
