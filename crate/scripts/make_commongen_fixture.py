"""Writes a synthetic CommonGen-style training file and the expected
enumeration outputs from a brute-force subset oracle."""
import itertools
import json
import random
import sys
from pathlib import Path

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures/commongen")

VOCAB = ["dog", "run", "field", "ball", "throw", "catch", "boy", "girl", "kick", "tree", "climb", "apple", "eat",
         "water", "drink", "horse", "ride", "car", "drive", "road", "book", "read", "sit", "chair", "table",
         "cook", "kitchen", "food", "snow", "ski", "mountain", "wave", "surf", "beach", "sand", "play", "guitar",
         "sing", "song", "stage", "paint", "wall", "brush", "cut", "knife", "bread", "swim", "pool", "jump",
         "rope", "fish", "lake", "boat", "walk", "street", "bike", "look", "stand", "hold", "hand"]
TARGETS = ["A dog runs across the field.", "The boy kicks a ball.", "She reads a book at the table."]


def normalize(concepts):
    return sorted({c.lower() for c in concepts})


def main():
    rng = random.Random(11)
    OUT.mkdir(parents=True, exist_ok=True)
    lines = []
    for _ in range(200):
        if lines and rng.random() < 0.15:
            concepts = list(rng.choice(lines)["concepts"])
            rng.shuffle(concepts)
        else:
            size = rng.choices([2, 3, 4, 5, 6], weights=[10, 55, 20, 12, 3])[0]
            concepts = rng.sample(VOCAB, size)
            if rng.random() < 0.05:
                concepts.append(concepts[0])
        if rng.random() < 0.05:
            concepts = [c.capitalize() for c in concepts]
        line = {"concepts": concepts}
        if rng.random() < 0.5:
            line["target"] = rng.choice(TARGETS)
        lines.append(line)

    with open(OUT / "train200.jsonl", "w") as f:
        for line in lines:
            f.write(json.dumps(line) + "\n")
    with open(OUT / "train10.jsonl", "w") as f:
        for line in lines[:10]:
            f.write(json.dumps(line) + "\n")

    sets = [normalize(line["concepts"]) for line in lines]
    pairs = sorted({pair for s in sets for pair in itertools.combinations(s, 2)})
    unique_sets = sorted({tuple(s) for s in sets if 3 <= len(s) <= 5})
    with open(OUT / "pairs.expected.jsonl", "w") as f:
        for p in pairs:
            f.write(json.dumps({"concepts": list(p)}) + "\n")
    with open(OUT / "sets.expected.jsonl", "w") as f:
        for s in unique_sets:
            f.write(json.dumps({"concepts": list(s)}) + "\n")
    per_size = {}
    for s in unique_sets:
        per_size[len(s)] = per_size.get(len(s), 0) + 1
    print(len(pairs), "pairs;", len(unique_sets), "sets", per_size)


if __name__ == "__main__":
    main()
