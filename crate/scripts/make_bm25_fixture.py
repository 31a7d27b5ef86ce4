"""Writes a 1,000-sentence CleanSentence fixture and brute-force index stats."""
import json
import random
import sys
from collections import Counter
from pathlib import Path

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures/bm25")

NOUNS = ["dog", "dogs", "cat", "cats", "ball", "balls", "park", "child", "children", "tree", "trees", "river",
         "boat", "boats", "man", "woman", "field", "horse", "horses", "car", "road", "book", "books", "table"]
VERBS = ["run", "runs", "running", "ran", "throw", "throws", "threw", "catch", "catches", "caught", "sit",
         "sits", "walk", "walks", "walked", "play", "plays", "playing", "read", "reads", "drive", "drives"]
FUNCTION = ["the", "a", "in", "on", "with", "and", "near", "of", "to", "by"]
RARE = [f"term{i}" for i in range(300)]


def main():
    rng = random.Random(2024)
    OUT.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(1000):
        n = rng.randint(3, 18)
        tokens = []
        for _ in range(n):
            r = rng.random()
            if r < 0.35:
                tokens.append(rng.choice(FUNCTION))
            elif r < 0.6:
                tokens.append(rng.choice(NOUNS[: rng.randint(1, len(NOUNS))]))
            elif r < 0.85:
                tokens.append(rng.choice(VERBS[: rng.randint(1, len(VERBS))]))
            else:
                tokens.append(RARE[int(rng.paretovariate(1.2)) % len(RARE)])
        text = " ".join(tokens).capitalize() + "."
        rows.append({"doc_id": i // 4, "sent_idx": i % 4, "text": text, "tokens": tokens})
    with open(OUT / "sentences.jsonl", "w") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")

    df = Counter()
    total = 0
    for row in rows:
        total += len(row["tokens"])
        df.update(set(row["tokens"]))
    stats = {"n": len(rows), "total_len": total, "avgdl": total / len(rows), "n_terms": len(df),
             "df": dict(sorted(df.items()))}
    (OUT / "stats.json").write_text(json.dumps(stats, indent=1) + "\n")
    print(stats["n"], stats["total_len"], stats["n_terms"])


if __name__ == "__main__":
    main()
