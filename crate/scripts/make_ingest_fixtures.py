"""Writes the synthetic dump fixtures and their expected page ids.

The expected ids come from a separate single-pass reader (ElementTree
iterparse): namespace 0, no <redirect>, stream order.
"""
import random
import sys
import xml.etree.ElementTree as ET
from pathlib import Path
from xml.sax.saxutils import escape

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures/ingest")
NS = "{http://www.mediawiki.org/xml/export-0.10/}"

HEADER = """<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/" version="0.10" xml:lang="en">
  <siteinfo>
    <sitename>Fixture</sitename>
    <namespaces>
      <namespace key="0" case="first-letter" />
      <namespace key="1" case="first-letter">Talk</namespace>
    </namespaces>
  </siteinfo>
"""

SUBJECTS = ["The dog", "A farmer", "The river", "An old bridge", "The team", "A young girl", "The city council",
            "The horse", "A small boat", "The choir"]
VERBS = ["crosses", "builds", "watches", "follows", "paints", "carries", "opens", "finds", "visits", "cleans"]
OBJECTS = ["the [[valley]]", "a [[wooden fence|fence]]", "the old mill", "a red ball", "the market square",
           "the northern hills", "a long road", "the small church", "the harbour", "a quiet lake"]


def sentence(rng):
    s = f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)}"
    if rng.random() < 0.3:
        s += " {{citation needed}}"
    if rng.random() < 0.3:
        s += "<ref>Source " + str(rng.randint(1, 99)) + "</ref>"
    return s + "."


def page(pid, title, ns, body, redirect=None):
    red = f'    <redirect title="{escape(redirect)}" />\n' if redirect else ""
    return (f"  <page>\n    <title>{escape(title)}</title>\n    <ns>{ns}</ns>\n    <id>{pid}</id>\n{red}"
            f"    <revision>\n      <id>{pid * 10 + 1}</id>\n      <timestamp>2021-03-01T00:00:00Z</timestamp>\n"
            f"      <text bytes=\"{len(body)}\" xml:space=\"preserve\">{escape(body)}</text>\n    </revision>\n  </page>\n")


def big_dump(rng):
    parts = [HEADER]
    pid = 10
    articles = 0
    while articles < 100:
        pid += rng.randint(1, 7)
        roll = rng.random()
        if roll < 0.05:
            parts.append(page(pid, f"Redirect {pid}", 0, f"#REDIRECT [[Article {pid - 1}]]", f"Article {pid - 1}"))
        elif roll < 0.10:
            parts.append(page(pid, f"Talk:Article {pid}", 1, sentence(rng)))
        else:
            body = "'''Article''' & more.\n" + " ".join(sentence(rng) for _ in range(rng.randint(2, 6)))
            parts.append(page(pid, f"Article {pid}", 0, body))
            articles += 1
    parts.append("</mediawiki>\n")
    return "".join(parts)


def oracle_ids(path):
    ids = []
    for _, elem in ET.iterparse(path, events=("end",)):
        if elem.tag == NS + "page":
            ns = elem.findtext(NS + "ns")
            if ns == "0" and elem.find(NS + "redirect") is None:
                ids.append(int(elem.findtext(NS + "id")))
            elem.clear()
    return ids


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(7)
    (OUT / "dump100.xml").write_text(big_dump(rng))
    ids = oracle_ids(OUT / "dump100.xml")
    (OUT / "dump100.ids").write_text("".join(f"{i}\n" for i in ids))
    mini = HEADER + page(1, "Fox", 0, "The '''fox''' is a [[mammal]]. It hunts at night.") + \
        page(2, "Foxes", 0, "#REDIRECT [[Fox]]", "Fox") + "</mediawiki>\n"
    (OUT / "mini.xml").write_text(mini)
    (OUT / "header_only.xml").write_text(HEADER + "</mediawiki>\n")
    print(len(ids), "articles")


if __name__ == "__main__":
    main()
