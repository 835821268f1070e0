#!/usr/bin/env python3
"""Generate the bundled desk-scale restaurant corpus.

Writes data/toy/{parallel.tsv,unlabeled.txt,test.tsv}.  References
verbalize the core slots (name, food, eattype) reliably but mention the
trailing segments (customer rating, pricerange, area, near) only part
of the time, the way crowd-sourced references skip slots.  A few-shot
generator trained on this therefore under-covers exactly like the real
thing, which is what the repair search and second training stage exist
to fix.

Deterministic: fixed seed, committed outputs.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabletext.corpusio import (  # noqa: E402
    write_outputs,
    write_parallel,
    write_unlabeled,
)
from tabletext.tabular import Slot, Table, tokenize  # noqa: E402

SEED = 20240917

NAMES = [
    "The Mill", "Aromi", "Blue Spice", "The Eagle", "Cotto", "Loch Fyne",
    "The Punter", "Zizzi", "The Wrestlers", "Strada", "The Cricketers",
    "Giraffe", "The Vaults", "Alimentum", "Bibimbap House", "Fitzbillies",
    "Midsummer House", "The Golden Curry", "Taste of Cambridge",
    "The Olive Grove",
]
EATTYPES = ["pub", "coffee shop", "restaurant"]
FOODS = ["Italian", "French", "English", "Japanese", "Chinese", "Indian",
         "Fast food"]
PRICERANGES = ["cheap", "moderate", "less than £20", "£20-25", "more than £30"]
RATINGS = ["low", "average", "high", "1 out of 5", "3 out of 5", "5 out of 5"]
AREAS = ["riverside", "city centre"]
NEARS = ["Café Rouge", "Café Sicilia", "Clare Hall", "Crowne Plaza Hotel",
         "The Sorrento", "Burger King", "Rainbow Vegetarian Café",
         "Raja Indian Cuisine", "The Bakers", "Express by Holiday Inn"]

# probability that a slot is present in a table at all
P_SLOT = {
    "eattype": 0.8, "food": 0.85, "customer rating": 0.6,
    "pricerange": 0.6, "area": 0.6, "near": 0.55,
}
# probability that a present slot is verbalized in the reference
P_MENTION = {
    "eattype": 0.95, "food": 0.95, "customer rating": 0.45,
    "pricerange": 0.4, "area": 0.4, "near": 0.35,
}


def sample_table(rng, sample_id):
    slots = [Slot("name", rng.choice(NAMES))]
    if rng.random() < P_SLOT["eattype"]:
        slots.append(Slot("eattype", rng.choice(EATTYPES)))
    if rng.random() < P_SLOT["food"]:
        slots.append(Slot("food", rng.choice(FOODS)))
    if rng.random() < P_SLOT["customer rating"]:
        slots.append(Slot("customer rating", rng.choice(RATINGS)))
    if rng.random() < P_SLOT["pricerange"]:
        slots.append(Slot("pricerange", rng.choice(PRICERANGES)))
    if rng.random() < P_SLOT["area"]:
        slots.append(Slot("area", rng.choice(AREAS)))
    if rng.random() < P_SLOT["near"]:
        slots.append(Slot("near", rng.choice(NEARS)))
    return Table(tuple(slots), sample_id=sample_id)


def reference(rng, table):
    by_name = {s.name: s.value for s in table.slots}
    mentioned = {
        name: name in by_name and rng.random() < P_MENTION[name]
        for name in P_MENTION
    }
    parts = [by_name["name"]]
    food = by_name.get("food") if mentioned["food"] else None
    eattype = by_name.get("eattype") if mentioned["eattype"] else None
    if food and eattype:
        parts += ["is", "a", food, eattype]
    elif food:
        parts += ["serves", food, "food"]
    elif eattype:
        parts += ["is", "a", eattype]
    else:
        parts += ["is", "a", "popular", "spot"]
    # Trailing segments open with the slot value itself and close with a
    # distinct anchor word.  A few-shot decoder conditioned by
    # placeholder restriction can then skip a segment whose slot the
    # table lacks, and every boundary has the full stop as a trained
    # continuation.
    if mentioned["customer rating"]:
        parts += [by_name["customer rating"], "customer", "rating"]
    if mentioned["pricerange"]:
        parts += [by_name["pricerange"], "price", "range"]
    if mentioned["area"]:
        parts += [by_name["area"], "area"]
    if mentioned["near"]:
        parts += [by_name["near"], "nearby"]
    return tokenize(" ".join(parts) + " .")


def main():
    out_dir = Path(__file__).resolve().parent.parent / "data" / "toy"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    parallel = []
    for i in range(100):
        table = sample_table(rng, f"p{i + 1}")
        parallel.append((table, reference(rng, table)))
    write_parallel(out_dir / "parallel.tsv", parallel)

    unlabeled = [sample_table(rng, f"u{i + 1}") for i in range(400)]
    write_unlabeled(out_dir / "unlabeled.txt", unlabeled)

    test = []
    for i in range(60):
        table = sample_table(rng, f"t{i + 1}")
        test.append((table, reference(rng, table)))
    write_parallel(out_dir / "test.tsv", test)
    # tables-only and refs-only views for the infer / eval commands
    write_unlabeled(out_dir / "test_tables.txt", [t for t, _ in test])
    write_outputs(out_dir / "test_refs.txt", [s for _, s in test])

    n_slots = sum(len(t.slots) for t, _ in parallel)
    print(f"parallel: 100 pairs, {n_slots} slots")
    print(f"unlabeled: {len(unlabeled)} tables")
    print(f"test: {len(test)} pairs")


if __name__ == "__main__":
    main()
