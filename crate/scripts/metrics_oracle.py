"""Writes the golden evaluation fixture and scores it with independent scorers.

BLEU-4 comes from nltk's corpus_bleu. CIDEr takes n-gram counts and document
frequencies from pycocoevalcap's CiderScorer but applies the original plain
cosine (the package's own score is CIDEr-D: clipped, length-penalized).
ROUGE-L, METEOR (exact + stem) and coverage are written out here from their
definitions, with stems taken from a hand-made table.
"""
import json
import math
import re
import sys
from pathlib import Path

from nltk.translate.bleu_score import corpus_bleu
from pycocoevalcap.cider.cider_scorer import CiderScorer

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures/eval")

DATA = [
    (["dog", "frisbee", "catch", "throw"],
     "A dog catches the frisbee that a man throws.",
     ["The dog catches a frisbee thrown by the man.", "A man throws a frisbee and his dog catches it.",
      "Dogs love to catch a frisbee when you throw it."]),
    (["ball", "boy", "kick"], "The boy kicks a ball across the field.",
     ["A boy kicks the ball.", "The boy kicked a ball over the fence."]),
    (["field", "look", "stand"], "A girl stands in the field under the sky.",
     ["She stands in a field looking around.", "A man standing in a field looks at the camera."]),
    (["cat", "sleep", "sofa"], "The cat sleeps on the sofa all day long.",
     ["A cat is sleeping on the sofa.", "The cat sleeps on a sofa in the living room."]),
    (["eat", "apple", "tree"], "A child eats an apple under the tree.",
     ["The children are eating apples under a tree.", "A boy eats an apple beneath the apple tree."]),
    (["water", "drink", "horse"], "Horses drink water from the river in the morning.",
     ["The horse drinks water from a bucket.", "A horse is drinking water at the lake."]),
    (["car", "drive", "road"], "A man drives his car down the road.",
     ["The car drives along the empty road.", "People drive cars on the road every day."]),
    (["book", "read", "library"], "Students read books in the quiet library.",
     ["A student reads a book in the library.", "Reading books at the library is fun."]),
    (["snow", "ski", "mountain"], "Skiers ski down the mountain through fresh snow.",
     ["People ski on the snow of the mountain.", "A man skis down a snowy mountain.",
      "The mountain is covered with snow for skiing."]),
    (["guitar", "play", "stage"], "A musician plays the guitar on stage.",
     ["The man plays a guitar on the stage.", "A woman is playing guitar on a stage."]),
    (["bread", "cut", "knife"], "She cuts the bread with a sharp knife.",
     ["A man cuts bread with a knife.", "Cutting the bread with a knife."]),
    (["bike", "ride", "street"], "Kids ride their bikes along the street.",
     ["A boy rides a bike down the street.", "People are riding bikes in the street."]),
    (["fish", "catch", "lake"], "A fisherman catches a large fish in the lake.",
     ["He caught a fish at the lake.", "The man catches fish in a lake."]),
    (["wave", "surf", "ocean"], "A surfer surfs a big wave in the ocean.",
     ["The man surfs the waves of the ocean.", "Surfing on a wave in the ocean."]),
    (["cake", "bake", "oven"], "Mother bakes a cake in the oven.",
     ["A woman bakes a cake in an oven.", "The cake is baking in the oven."]),
    (["flower", "garden", "water"], "A woman waters the flowers in her garden.",
     ["She is watering flowers in the garden.", "The gardener waters the flowers in a garden."]),
    (["train", "station", "arrive"], "The train arrives at the station on time.",
     ["A train arrives at a busy station.", "The train is arriving at the station."]),
    (["song", "sing", "crowd"], "A singer sings a song to the crowd.",
     ["The crowd sings a song together.", "She sang a song in front of the crowd."]),
    (["hill", "climb", "sun"], "They climb the hill while the sun rises.",
     ["Hikers climb a hill under the hot sun.", "The sun shines as we climb the hill."]),
    (["paint", "wall", "brush"], "A painter paints the old wall.",
     ["The man paints a wall with a brush.", "Painting the wall with a big brush."]),
]

# Hand-made stem table for every inflected token in the fixture.
STEMS = {
    "catches": "catch", "throws": "throw", "thrown": "throw", "dogs": "dog", "kicks": "kick",
    "kicked": "kick", "stands": "stand", "looks": "look", "looking": "look", "standing": "stand",
    "sleeps": "sleep", "sleeping": "sleep", "eats": "eat", "eating": "eat", "apples": "apple",
    "children": "child", "are": "be", "is": "be", "horses": "horse", "drinks": "drink",
    "drinking": "drink", "drives": "drive", "cars": "car", "students": "student",
    "reads": "read", "books": "book", "reading": "read", "skiers": "skier", "skis": "ski",
    "skiing": "ski", "plays": "play", "playing": "play", "cuts": "cut", "cutting": "cut",
    "kids": "kid", "bikes": "bike", "rides": "ride", "riding": "ride", "catches": "catch",
    "caught": "catch", "surfs": "surf", "surfing": "surf", "waves": "wave", "bakes": "bake",
    "baking": "bake", "waters": "water", "flowers": "flower", "watering": "water",
    "arrives": "arrive", "arriving": "arrive", "sings": "sing", "sang": "sing", "climb": "climb",
    "rises": "rise", "hikers": "hiker", "shines": "shine", "paints": "paint",
    "painting": "paint", "people": "person", "fishermen": "fisherman", "loves": "love",
}

TOKEN = re.compile(r"[^\W_]+(?:'[^\W_]+)?")


def tokenize(text):
    return [t.lower() for t in TOKEN.findall(text.replace("’", "'"))]


def stem(t):
    return STEMS.get(t, t)


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            table[i + 1][j + 1] = table[i][j] + 1 if x == y else max(table[i][j + 1], table[i + 1][j])
    return table[-1][-1]


def rouge_pair(h, r):
    l = lcs(h, r)
    if l == 0:
        return 0.0
    p, rec = l / len(h), l / len(r)
    return 2 * p * rec / (p + rec)


def meteor_pair(h, r):
    link = [None] * len(h)
    used = [False] * len(r)
    for key in (lambda t: t, stem):
        hk = [key(t) for t in h]
        rk = [key(t) for t in r]
        for i in range(len(h)):
            if link[i] is not None:
                continue
            ok = [j for j in range(len(r)) if not used[j] and rk[j] == hk[i]]
            if not ok:
                continue
            nxt = link[i - 1] + 1 if i > 0 and link[i - 1] is not None else None
            j = nxt if nxt in ok else ok[0]
            link[i] = j
            used[j] = True
    pairs = [(i, j) for i, j in enumerate(link) if j is not None]
    m = len(pairs)
    if m == 0:
        return 0.0
    chunks = 1 + sum(1 for a, b in zip(pairs, pairs[1:]) if not (b[0] == a[0] + 1 and b[1] == a[1] + 1))
    p, rec = m / len(h), m / len(r)
    fmean = 10 * p * rec / (rec + 9 * p)
    return fmean * (1 - 0.5 * (chunks / m) ** 3)


def coverage(concepts, text):
    forms = set()
    for t in tokenize(text):
        forms.add(t)
        forms.add(stem(t))
    return sum(c in forms for c in concepts) / len(concepts)


def original_cider(scorer):
    scorer.compute_doc_freq()
    log_n = math.log(len(scorer.crefs))

    def vec(counts):
        v = [{} for _ in range(4)]
        for gram, tf in counts.items():
            v[len(gram) - 1][gram] = tf * (log_n - math.log(max(1.0, scorer.document_frequency[gram])))
        return v

    def cos(a, b):
        na = math.sqrt(sum(x * x for x in a.values()))
        nb = math.sqrt(sum(x * x for x in b.values()))
        if na == 0 or nb == 0:
            return 0.0
        return sum(w * b.get(g, 0.0) for g, w in a.items()) / (na * nb)

    scores = []
    for test, refs in zip(scorer.ctest, scorer.crefs):
        hv = vec(test)
        total = 0.0
        for n in range(4):
            total += sum(cos(hv[n], vec(r)[n]) for r in refs) / len(refs)
        scores.append(10.0 * total / 4)
    return sum(scores) / len(scores)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "hyps.jsonl", "w") as f:
        for i, (concepts, hyp, _) in enumerate(DATA):
            f.write(json.dumps({"id": f"g{i:02}", "concepts": sorted(concepts), "hypothesis": hyp}) + "\n")
    with open(OUT / "refs.jsonl", "w") as f:
        for i, (_, _, refs) in enumerate(DATA):
            f.write(json.dumps({"id": f"g{i:02}", "references": refs}) + "\n")

    hyps = [tokenize(h) for _, h, _ in DATA]
    refs = [[tokenize(r) for r in rs] for _, _, rs in DATA]
    n = len(DATA)
    bleu = corpus_bleu(refs, hyps)
    rouge = sum(max(rouge_pair(h, r) for r in rs) for h, rs in zip(hyps, refs)) / n
    meteor = sum(max(meteor_pair(h, r) for r in rs) for h, rs in zip(hyps, refs)) / n
    scorer = CiderScorer(n=4, sigma=6.0)
    for h, rs in zip(hyps, refs):
        scorer += (" ".join(h), [" ".join(r) for r in rs])
    cider = original_cider(scorer)
    cov = sum(coverage(c, h) for c, h, _ in DATA) / n
    report = {"bleu4": bleu, "rouge_l": rouge, "meteor": meteor, "cider": float(cider), "coverage": cov, "n": n}
    (OUT / "golden_report.json").write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
