#!/usr/bin/env python3
"""Generate the bundled mini-treebank (universal 12-tag set).

Sentences come from a small seeded grammar of everyday scene descriptions.
Many words are noun/verb homographs (run, walk, play, watch, ...), so the
tagger has to use context to get them right.

Usage: python3 scripts/make_treebank.py crates/core/assets
"""

import random
import sys
from pathlib import Path

SEED = 13
TOTAL = 500
DEV = 100

# lemma: (3sg, past, gerund)
VERBS = {
    "run": ("runs", "ran", "running"),
    "chase": ("chases", "chased", "chasing"),
    "throw": ("throws", "threw", "throwing"),
    "catch": ("catches", "caught", "catching"),
    "kick": ("kicks", "kicked", "kicking"),
    "jump": ("jumps", "jumped", "jumping"),
    "walk": ("walks", "walked", "walking"),
    "play": ("plays", "played", "playing"),
    "watch": ("watches", "watched", "watching"),
    "ride": ("rides", "rode", "riding"),
    "swim": ("swims", "swam", "swimming"),
    "eat": ("eats", "ate", "eating"),
    "drink": ("drinks", "drank", "drinking"),
    "cook": ("cooks", "cooked", "cooking"),
    "cut": ("cuts", "cut", "cutting"),
    "paint": ("paints", "painted", "painting"),
    "climb": ("climbs", "climbed", "climbing"),
    "hold": ("holds", "held", "holding"),
    "carry": ("carries", "carried", "carrying"),
    "wash": ("washes", "washed", "washing"),
    "open": ("opens", "opened", "opening"),
    "push": ("pushes", "pushed", "pushing"),
    "pull": ("pulls", "pulled", "pulling"),
    "sing": ("sings", "sang", "singing"),
    "dance": ("dances", "danced", "dancing"),
    "read": ("reads", "read", "reading"),
    "write": ("writes", "wrote", "writing"),
    "drive": ("drives", "drove", "driving"),
    "fly": ("flies", "flew", "flying"),
    "bark": ("barks", "barked", "barking"),
    "fetch": ("fetches", "fetched", "fetching"),
    "hit": ("hits", "hit", "hitting"),
    "park": ("parks", "parked", "parking"),
    "fish": ("fishes", "fished", "fishing"),
    "surf": ("surfs", "surfed", "surfing"),
    "feed": ("feeds", "fed", "feeding"),
    "wear": ("wears", "wore", "wearing"),
    "wave": ("waves", "waved", "waving"),
    "smile": ("smiles", "smiled", "smiling"),
    "sleep": ("sleeps", "slept", "sleeping"),
    "sit": ("sits", "sat", "sitting"),
    "stand": ("stands", "stood", "standing"),
    "build": ("builds", "built", "building"),
    "fix": ("fixes", "fixed", "fixing"),
    "pet": ("pets", "petted", "petting"),
    "brush": ("brushes", "brushed", "brushing"),
    "look": ("looks", "looked", "looking"),
    "kiss": ("kisses", "kissed", "kissing"),
    "chop": ("chops", "chopped", "chopping"),
    "bake": ("bakes", "baked", "baking"),
}

TRANSITIVE = [
    "chase", "throw", "catch", "kick", "watch", "ride", "eat", "drink", "cook",
    "cut", "paint", "climb", "hold", "carry", "wash", "open", "push", "pull",
    "read", "write", "drive", "fetch", "hit", "park", "feed", "wear", "build",
    "fix", "pet", "brush", "kiss", "chop", "bake", "play", "sing",
]
INTRANSITIVE = [
    "run", "jump", "walk", "play", "swim", "dance", "fly", "bark", "fish", "surf",
    "wave", "smile", "sleep", "sit", "stand", "sing", "look",
]

# singular: plural
NOUNS = {
    "dog": "dogs", "cat": "cats", "boy": "boys", "girl": "girls", "man": "men",
    "woman": "women", "child": "children", "ball": "balls", "frisbee": "frisbees",
    "field": "fields", "park": "parks", "street": "streets", "river": "rivers",
    "tree": "trees", "car": "cars", "bike": "bikes", "horse": "horses",
    "table": "tables", "kitchen": "kitchens", "bowl": "bowls", "apple": "apples",
    "cake": "cakes", "water": "water", "snow": "snow", "beach": "beaches",
    "wave": "waves", "surfer": "surfers", "player": "players", "team": "teams",
    "game": "games", "guitar": "guitars", "song": "songs", "book": "books",
    "window": "windows", "door": "doors", "house": "houses", "city": "cities",
    "camera": "cameras", "picture": "pictures", "flower": "flowers",
    "garden": "gardens", "fish": "fish", "bird": "birds", "mountain": "mountains",
    "road": "roads", "bus": "buses", "train": "trains", "shirt": "shirts",
    "hat": "hats", "ladder": "ladders", "roof": "roofs", "wall": "walls",
    "brush": "brushes", "knife": "knives", "tomato": "tomatoes", "pan": "pans",
    "plate": "plates", "chair": "chairs", "student": "students",
    "teacher": "teachers", "phone": "phones", "baby": "babies", "bed": "beds",
    "crowd": "crowds", "stage": "stages", "bone": "bones", "grass": "grass",
    "dinner": "dinners", "boat": "boats", "lake": "lakes", "sheep": "sheep",
    "box": "boxes", "bench": "benches", "kite": "kites", "sky": "skies",
    "run": "runs", "walk": "walks", "play": "plays", "watch": "watches",
    "ride": "rides", "drink": "drinks", "look": "looks", "swim": "swims",
    "paint": "paints", "cook": "cooks", "dance": "dances", "jump": "jumps",
}
# Nouns that read naturally as the agent of an action.
AGENTS = ["dog", "cat", "boy", "girl", "man", "woman", "child", "surfer",
          "player", "team", "student", "teacher", "baby", "crowd", "horse", "bird"]
THINGS = [n for n in NOUNS if n not in AGENTS and n not in
          ("run", "walk", "play", "watch", "ride", "drink", "look", "swim",
           "paint", "cook", "dance", "jump")]
PLACES = ["field", "park", "street", "river", "kitchen", "beach", "garden",
          "mountain", "road", "house", "city", "stage", "lake", "snow", "grass",
          "water"]
ACTION_NOUNS = ["run", "walk", "swim", "ride", "drink", "look", "dance", "jump"]

ADJS = ["big", "small", "red", "young", "old", "happy", "tall", "green", "wet",
        "hot", "cold", "little", "white", "black", "brown", "new", "fast", "long"]
ADVS = ["quickly", "slowly", "fast", "happily", "together", "outside", "away",
        "again", "often", "never", "well", "here", "there", "very"]
SUBJ_PRONS = ["he", "she", "they", "we", "i", "you", "someone", "it"]
OBJ_PRONS = ["him", "her", "them", "it", "me", "us"]
POSS = ["his", "her", "their", "my", "our", "its"]
DETS = ["the", "a", "this", "that", "every", "some", "each"]
PL_DETS = ["the", "some", "these", "those", "many"]
ADPS = ["in", "on", "at", "near", "under", "across", "through", "behind",
        "along", "by", "with", "into", "over", "from"]
NUMS = ["two", "three", "four", "five", "ten", "2", "3", "12"]
INTERJ = ["oh", "wow", "hello", "hey", "ok", "um"]


def article(word):
    return "an" if word[0] in "aeiou" else "a"


class Gen:
    def __init__(self, rng):
        self.r = rng

    def choice(self, xs):
        return self.r.choice(xs)

    def maybe(self, p):
        return self.r.random() < p

    def np_sg(self, pool):
        noun = self.choice(pool)
        out = []
        kind = self.r.random()
        if kind < 0.2:
            out.append((self.choice(POSS), "PRON"))
        else:
            det = self.choice(DETS)
            adj = self.choice(ADJS) if self.maybe(0.3) else None
            if det == "a":
                det = article(adj or noun)
            out.append((det, "DET"))
            if adj:
                out.append((adj, "ADJ"))
            noun_tok = noun
            if self.maybe(0.06):
                noun_tok = noun + "'s"
                out.append((noun_tok, "NOUN"))
                noun = self.choice(THINGS)
            out.append((noun, "NOUN"))
            return out
        if self.maybe(0.25):
            out.append((self.choice(ADJS), "ADJ"))
        out.append((noun, "NOUN"))
        return out

    def np_pl(self, pool):
        noun = NOUNS[self.choice(pool)]
        out = []
        kind = self.r.random()
        if kind < 0.3:
            out.append((self.choice(NUMS), "NUM"))
        elif kind < 0.6:
            out.append((self.choice(PL_DETS), "DET"))
        if self.maybe(0.25):
            out.append((self.choice(ADJS), "ADJ"))
        out.append((noun, "NOUN"))
        return out

    def obj(self):
        r = self.r.random()
        if r < 0.15:
            return [(self.choice(OBJ_PRONS), "PRON")]
        if r < 0.35:
            return self.np_pl(THINGS)
        return self.np_sg(THINGS)

    def pp(self):
        return [(self.choice(ADPS), "ADP")] + self.np_sg(PLACES)

    def subject(self):
        r = self.r.random()
        if r < 0.2:
            return [(self.choice(SUBJ_PRONS), "PRON")], "pron"
        if r < 0.45:
            return self.np_pl(AGENTS), "pl"
        return self.np_sg(AGENTS), "sg"

    def verb_present(self, lemma, number):
        if number == "sg":
            return (VERBS[lemma][0], "VERB")
        return (lemma, "VERB")

    def sentence(self):
        t = self.r.random()
        words = []
        if t < 0.20:
            subj, num = self.subject()
            if num == "pron":
                num = "pl" if subj[0][0] in ("they", "we", "i", "you") else "sg"
            words = subj + [self.verb_present(self.choice(INTRANSITIVE), num)]
            if self.maybe(0.5):
                words.append((self.choice(ADVS), "ADV"))
            if self.maybe(0.4):
                words += self.pp()
        elif t < 0.42:
            subj, num = self.subject()
            if num == "pron":
                num = "pl" if subj[0][0] in ("they", "we", "i", "you") else "sg"
            words = subj + [self.verb_present(self.choice(TRANSITIVE), num)] + self.obj()
            if self.maybe(0.5):
                words += self.pp()
        elif t < 0.55:
            subj, _ = self.subject()
            words = subj + [(VERBS[self.choice(TRANSITIVE)][1], "VERB")] + self.obj()
            if self.maybe(0.3):
                words += [("and", "CONJ"), (VERBS[self.choice(TRANSITIVE)][1], "VERB")] + self.obj()
            elif self.maybe(0.4):
                words += self.pp()
            if self.maybe(0.2):
                words.append((self.choice(ADVS), "ADV"))
        elif t < 0.65:
            subj, num = self.subject()
            aux = "are" if num == "pl" or subj[0][0] in ("they", "we", "you") else "is"
            if subj[0][0] == "i":
                aux = "am"
            v = self.choice(list(VERBS))
            words = subj + [(aux, "VERB"), (VERBS[v][2], "VERB")]
            if v in TRANSITIVE and self.maybe(0.7):
                words += self.obj()
            if self.maybe(0.5):
                words += self.pp()
        elif t < 0.72:
            subj, _ = self.subject()
            verb = self.choice(["goes", "went", "takes", "took", "enjoys", "wants", "has"])
            action = self.choice(ACTION_NOUNS)
            if verb in ("goes", "went"):
                words = subj + [(verb, "VERB"), ("for", "ADP"), (article(action), "DET"), (action, "NOUN")]
            else:
                words = subj + [(verb, "VERB"), (self.choice(["a", "the"]), "DET"), (action, "NOUN")]
            if self.maybe(0.5):
                words += self.pp()
        elif t < 0.78:
            subj, _ = self.subject()
            words = subj + [(self.choice(["wants", "likes", "tries", "wanted", "likes"]), "VERB"),
                            ("to", "PRT"), (self.choice(TRANSITIVE), "VERB")] + self.obj()
        elif t < 0.83:
            subj, num = self.subject()
            particle = self.choice(["up", "down", "off", "out"])
            v = self.choice(["pick", "put", "take", "turn"])
            form = {"pick": "picks", "put": "puts", "take": "takes", "turn": "turns"}[v]
            if num != "sg":
                form = v
            words = subj + [(form, "VERB"), (particle, "PRT")] + self.obj()
        elif t < 0.87:
            subj, num = self.subject()
            aux = "does" if num == "sg" else "do"
            words = subj + [(aux, "VERB"), ("not", "PRT"), (self.choice(TRANSITIVE), "VERB")] + self.obj()
        elif t < 0.91:
            place = self.pp()
            be = self.choice(["is", "was"])
            words = [("there", "DET"), (be, "VERB")] + self.np_sg(THINGS) + place
        elif t < 0.95:
            words = self.np_pl(AGENTS) + [(self.choice(INTRANSITIVE), "VERB")]
            if self.maybe(0.5):
                words += [("and", "CONJ"), (self.choice(INTRANSITIVE), "VERB")]
            words += self.pp()
        else:
            words = [(self.choice(INTERJ), "X")]
            if self.maybe(0.5):
                words.append((self.choice(["there", "again", "here"]), "ADV"))
            words.append(("!", "PUNCT"))
            if self.maybe(0.5):
                words += [(self.choice(INTERJ), "X"), ("!", "PUNCT")]
            return words
        if self.maybe(0.5):
            # Mid-sentence comma before a trailing adverb, then a final stop.
            if self.maybe(0.2):
                words += [(",", "PUNCT"), (self.choice(ADVS), "ADV")]
            words.append((self.choice([".", ".", ".", "!", "?"]), "PUNCT"))
        return words


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/assets")
    rng = random.Random(SEED)
    gen = Gen(rng)
    seen = set()
    sentences = []
    while len(sentences) < TOTAL:
        s = gen.sentence()
        key = tuple(s)
        if key in seen:
            continue
        seen.add(key)
        sentences.append(s)

    def write(path, rows):
        with open(path, "w", newline="\n") as f:
            for i, s in enumerate(rows):
                if i:
                    f.write("\n")
                for tok, tag in s:
                    f.write(f"{tok}\t{tag}\n")

    write(out_dir / "treebank_train.tsv", sentences[: TOTAL - DEV])
    write(out_dir / "treebank_dev.tsv", sentences[TOTAL - DEV:])


if __name__ == "__main__":
    main()
