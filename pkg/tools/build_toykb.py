#!/usr/bin/env python3
"""Regenerate the bundled toy knowledge base and training fixtures.

Writes every file of the model directory under src/texkit/data/toykb/ plus
the column-format training fixtures under tests/fixtures/. Deterministic:
embeddings use a fixed seed and model training is seeded, so reruns produce
byte-identical artifacts.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from texkit.core import Language  # noqa: E402
from texkit.knowledge import ClusterIndex, IsaMap, TermCluster  # noqa: E402
from texkit.ner import train_coarse  # noqa: E402
from texkit.postag import TrainConfig, train_log_linear  # noqa: E402
from texkit.segmentation import build_collocation_stats  # noqa: E402

TOYKB = REPO / "src" / "texkit" / "data" / "toykb"
FIXTURES = REPO / "tests" / "fixtures"

DIM = 8
SEED = 20201223

# axis index per semantic field
AXES = {
    "movie": 0, "city": 1, "fruit": 2, "company": 3,
    "language": 4, "function": 5, "temporal": 6, "misc": 7,
}

VOCAB: dict[str, str] = {
    # movie field
    "captain": "movie", "marvel": "movie", "spider-man": "movie",
    "america": "movie", "black": "movie", "panther": "movie", "iron": "movie",
    "man": "movie", "star": "movie", "wars": "movie", "titanic": "movie",
    "avatar": "movie", "premiered": "movie", "movie": "movie", "film": "movie",
    "movies": "movie", "watched": "movie", "actor": "movie",
    # city field
    "los": "city", "angeles": "city", "san": "city", "francisco": "city",
    "york": "city", "new": "city", "paris": "city", "london": "city",
    "beijing": "city", "tokyo": "city", "city": "city", "cities": "city",
    "stayed": "city", "lived": "city", "visited": "city",
    # fruit field
    "banana": "fruit", "bananas": "fruit", "orange": "fruit", "pear": "fruit",
    "peach": "fruit", "juice": "fruit", "drank": "fruit", "ate": "fruit",
    "fruit": "fruit", "fresh": "fruit", "tasty": "fruit",
    # company field
    "google": "company", "microsoft": "company", "amazon": "company",
    "facebook": "company", "company": "company", "companies": "company",
    "hired": "company", "software": "company", "sells": "company",
    "office": "company", "works": "company",
    # language field
    "python": "language", "java": "language", "go": "language",
    "ruby": "language", "rust": "language", "english": "language",
    "french": "language", "spanish": "language", "language": "language",
    "code": "language",
    # function words
    "the": "function", "a": "function", "an": "function", "he": "function",
    "she": "function", "they": "function", "we": "function", "i": "function",
    "it": "function", "was": "function", "were": "function", "is": "function",
    "are": "function", "in": "function", "to": "function", "of": "function",
    "and": "function", "with": "function", "on": "function", "at": "function",
    "met": "function", "moved": "function", "opened": "function",
    "bought": "function", "likes": "function", "will": "function",
    "can": "function", "big": "function", "great": "function",
    "good": "function",
    # temporal field
    "months": "temporal", "month": "temporal", "ago": "temporal",
    "day": "temporal", "days": "temporal", "week": "temporal",
    "year": "temporal", "years": "temporal", "today": "temporal",
    "tomorrow": "temporal", "yesterday": "temporal",
    # mixed-sense terms get a custom vector below
    "apple": "misc",
}

# explicit multiword vocabulary rows (exercise multiword loading)
MULTIWORD = {
    "captain marvel": "movie", "captain america": "movie",
    "black panther": "movie", "iron man": "movie", "star wars": "movie",
    "los angeles": "city", "san francisco": "city", "new york": "city",
}


def _vector(field: str, rng: random.Random) -> list[float]:
    vec = [rng.gauss(0.0, 0.05) for _ in range(DIM)]
    vec[AXES[field]] += 1.0
    return vec


def _apple_vector(rng: random.Random) -> list[float]:
    # apple: genuinely ambiguous between the fruit and the company senses
    vec = [rng.gauss(0.0, 0.05) for _ in range(DIM)]
    vec[AXES["fruit"]] += 0.7
    vec[AXES["company"]] += 0.7
    return vec


def write_embeddings() -> None:
    for table, seed_offset in (("in", 1), ("out", 2)):
        rng = random.Random(SEED + seed_offset)
        rows: list[tuple[str, list[float]]] = []
        for term in sorted(VOCAB):
            field = VOCAB[term]
            vec = _apple_vector(rng) if term == "apple" else _vector(field, rng)
            rows.append((term, vec))
        for term in sorted(MULTIWORD):
            rows.append((term, _vector(MULTIWORD[term], rng)))
        path = TOYKB / f"embeddings.{table}.txt"
        with path.open("w", encoding="utf-8") as fh:
            fh.write(f"{len(rows)} {DIM}\n")
            for term, vec in rows:
                fh.write(term + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
        print(f"wrote {path} ({len(rows)} terms)")


ONTOLOGY = [
    # roots
    ("person.generic", None, ["person", "people"], ["Alice", "Bob"]),
    ("loc.generic", None, ["location", "place"], []),
    ("org.generic", None, ["organization", "organisation"], []),
    ("work.generic", None, ["work", "creative work"], []),
    ("food.generic", None, ["food"], []),
    ("time.generic", None, ["time", "date"], []),
    ("quantity.generic", None, ["quantity", "amount", "number"], []),
    ("language.generic", None, ["language"], []),
    ("animal.generic", None, ["animal", "creature"], []),
    ("product.generic", None, ["product"], []),
    ("event.generic", None, ["event"], []),
    ("color.generic", None, ["color", "colour"], []),
    # second level
    ("loc.city", "loc.generic", ["city", "town"], ["Paris", "London", "Beijing"]),
    ("loc.country", "loc.generic", ["country", "nation"], ["France", "China", "Japan"]),
    ("loc.state", "loc.generic", ["state", "province"], ["California", "Texas"]),
    ("work.movie", "work.generic", ["movie", "film"], ["Star Wars", "Titanic", "Avatar"]),
    ("work.book", "work.generic", ["book", "novel"], ["Dune", "Emma"]),
    ("work.song", "work.generic", ["song"], ["Hey Jude"]),
    ("food.fruit", "food.generic", ["fruit"], ["banana", "orange", "pear"]),
    ("food.vegetable", "food.generic", ["vegetable"], ["carrot", "spinach"]),
    ("food.drink", "food.generic", ["drink", "beverage"], ["coffee", "tea"]),
    ("org.company", "org.generic", ["company", "firm", "corporation"], ["Google", "Microsoft", "Amazon"]),
    ("org.university", "org.generic", ["university", "college"], ["MIT", "Stanford"]),
    ("org.government", "org.generic", ["government", "agency"], []),
    ("person.actor", "person.generic", ["actor", "actress"], []),
    ("person.politician", "person.generic", ["politician"], []),
    ("person.scientist", "person.generic", ["scientist"], []),
    ("language.human_lang", "language.generic", ["language"], ["English", "French", "Spanish"]),
    ("language.programming", "language.generic", ["language", "programming language"], ["Python", "Java", "Rust"]),
    ("animal.bird", "animal.generic", ["bird"], ["sparrow", "eagle"]),
    ("product.phone", "product.generic", ["phone", "smartphone"], []),
]


def write_ontology() -> None:
    import json

    path = TOYKB / "ontology.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for type_id, parent, names, instances in ONTOLOGY:
            fh.write(
                json.dumps(
                    {"type_id": type_id, "parent": parent, "names": names, "instances": instances},
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"wrote {path} ({len(ONTOLOGY)} types)")


CLUSTERS = [
    (1, ["movie"], ["Captain Marvel", "Spider-Man", "Captain America", "Black Panther", "Iron Man"]),
    (2, ["city"], ["Los Angeles", "San Francisco", "New York", "Paris", "London", "Beijing"]),
    (3, ["fruit"], ["apple", "banana", "orange", "pear", "peach"]),
    (4, ["company"], ["apple", "google", "microsoft", "amazon", "facebook"]),
    (5, ["country"], ["France", "China", "Japan", "Germany"]),
    (6, ["language"], ["Python", "Java", "Go", "Ruby"]),
    (7, ["movie"], ["Star Wars", "Titanic", "Avatar"]),
]


def write_clusters() -> None:
    index = ClusterIndex([TermCluster(cid, hypers, members) for cid, hypers, members in CLUSTERS])
    index.save(TOYKB / "clusters.jsonl")
    print(f"wrote {TOYKB / 'clusters.jsonl'} ({len(index)} clusters)")


def write_isa() -> None:
    isa = IsaMap()
    for _, hypers, members in CLUSTERS:
        for hyper in hypers:
            for member in members:
                isa.add(member.lower(), hyper, 3)
    isa.add("apple", "fruit", 2)  # keep the double-sense term visibly ambiguous
    isa.save(TOYKB / "isa.tsv")
    print(f"wrote {TOYKB / 'isa.tsv'} ({len(isa)} pairs)")


STATS_CORPUS = [
    "He stayed in San Francisco last week .",
    "She lived in Los Angeles for a year .",
    "They watched a movie about New York .",
    "The company opened an office in Beijing .",
    "Alice drank apple juice in the park .",
    "Bob ate a banana and an orange .",
    "Google and Microsoft are companies .",
    "The movie premiered in Los Angeles .",
    "We visited Paris and London .",
    "Python and Java are languages .",
    "The students read books about machine learning .",
    "A fresh peach is tasty .",
]


def write_stats() -> None:
    stats = build_collocation_stats(STATS_CORPUS, Language.EN)
    stats.save(TOYKB / "stats.tsv")
    print(f"wrote {TOYKB / 'stats.tsv'} ({len(stats.unigram_counts)} unigrams)")


SYNONYMS = [
    ["big", "large", "huge"],
    ["movie", "film"],
    ["buy", "purchase"],
    ["quick", "fast", "rapid"],
    ["好", "棒"],
]


def write_synonyms() -> None:
    path = TOYKB / "synonyms.tsv"
    with path.open("w", encoding="utf-8") as fh:
        for group in SYNONYMS:
            fh.write("\t".join(group) + "\n")
    print(f"wrote {path}")


POS_SENTENCES = [
    "He/PRP stayed/VBD in/IN San/NNP Francisco/NNP ./.",
    "She/PRP lived/VBD in/IN Los/NNP Angeles/NNP ./.",
    "They/PRP moved/VBD to/TO New/NNP York/NNP ./.",
    "He/PRP visited/VBD Paris/NNP ./.",
    "She/PRP watched/VBD the/DT movie/NN ./.",
    "The/DT movie/NN was/VBD great/JJ ./.",
    "The/DT film/NN was/VBD good/JJ ./.",
    "Alice/NNP met/VBD Bob/NNP in/IN London/NNP ./.",
    "Google/NNP hired/VBD Alice/NNP ./.",
    "Microsoft/NNP opened/VBD an/DT office/NN in/IN Beijing/NNP ./.",
    "The/DT company/NN sells/VBZ software/NN ./.",
    "He/PRP likes/VBZ fresh/JJ fruit/NN ./.",
    "She/PRP drank/VBD apple/NN juice/NN ./.",
    "They/PRP ate/VBD fresh/JJ bananas/NNS ./.",
    "The/DT city/NN is/VBZ big/JJ ./.",
    "We/PRP will/MD visit/VB Tokyo/NNP ./.",
    "I/PRP can/MD watch/VB movies/NNS ./.",
    "The/DT students/NNS like/VBP books/NNS ./.",
    "A/DT teacher/NN reads/VBZ a/DT book/NN ./.",
    "The/DT movie/NN was/VBD premiered/VBN in/IN Los/NNP Angeles/NNP ./.",
    "Captain/NNP Marvel/NNP was/VBD premiered/VBN in/IN Los/NNP Angeles/NNP ./.",
    "Bob/NNP works/VBZ at/IN Amazon/NNP ./.",
    "Alice/NNP and/CC Bob/NNP visited/VBD Tokyo/NNP ./.",
    "The/DT weather/NN is/VBZ nice/JJ today/NN ./.",
    "He/PRP bought/VBD a/DT new/JJ phone/NN ./.",
    "The/DT quick/JJ fox/NN runs/VBZ fast/RB ./.",
    "She/PRP reads/VBZ books/NNS at/IN night/NN ./.",
    "We/PRP ate/VBD lunch/NN in/IN the/DT park/NN ./.",
    "They/PRP met/VBD 22/CD months/NNS ago/RB ./.",
    "I/PRP like/VBP tea/NN and/CC coffee/NN ./.",
    "They/PRP will/MD move/VB to/TO Paris/NNP ./.",
    "The/DT teacher/NN met/VBD the/DT students/NNS ./.",
    "Bob/NNP sells/VBZ software/NN in/IN Beijing/NNP ./.",
    "The/DT book/NN is/VBZ good/JJ ./.",
    "She/PRP watched/VBD Star/NNP Wars/NNP ./.",
    "Titanic/NNP is/VBZ a/DT movie/NN ./.",
    "The/DT fruit/NN is/VBZ fresh/JJ ./.",
    "He/PRP drank/VBD orange/NN juice/NN ./.",
    "Alice/NNP works/VBZ at/IN Google/NNP ./.",
    "The/DT office/NN opened/VBD in/IN March/NNP ./.",
    "We/PRP visited/VBD the/DT city/NN ./.",
    "The/DT students/NNS watched/VBD the/DT film/NN ./.",
    "I/PRP stayed/VBD at/IN home/NN ./.",
    "She/PRP likes/VBZ the/DT new/JJ book/NN ./.",
    "The/DT company/NN hired/VBD a/DT scientist/NN ./.",
    "Bob/NNP and/CC Alice/NNP met/VBD in/IN Paris/NNP ./.",
    "She/PRP visited/VBD Paris/NNP 3/CD days/NNS ago/RB ./.",
    "We/PRP moved/VBD 2/CD years/NNS ago/RB ./.",
    "They/PRP liked/VBD the/DT song/NN ./.",
    "The/DT movie/NN premiered/VBD yesterday/NN ./.",
]

NER_SENTENCES = [
    [("Captain", "O"), ("Marvel", "O"), ("was", "O"), ("premiered", "O"), ("in", "O"),
     ("Los", "B-loc.generic"), ("Angeles", "I-loc.generic"), ("22", "O"), ("months", "O"),
     ("ago", "O"), (".", "O")],
    [("He", "O"), ("stayed", "O"), ("in", "O"), ("San", "B-loc.generic"),
     ("Francisco", "I-loc.generic"), (".", "O")],
    [("Alice", "B-person.generic"), ("met", "O"), ("Bob", "B-person.generic"), ("in", "O"),
     ("Paris", "B-loc.generic"), (".", "O")],
    [("Google", "B-org.generic"), ("hired", "O"), ("Alice", "B-person.generic"), (".", "O")],
    [("Microsoft", "B-org.generic"), ("opened", "O"), ("an", "O"), ("office", "O"), ("in", "O"),
     ("Beijing", "B-loc.generic"), (".", "O")],
    [("Bob", "B-person.generic"), ("works", "O"), ("at", "O"), ("Amazon", "B-org.generic"),
     ("in", "O"), ("New", "B-loc.generic"), ("York", "I-loc.generic"), (".", "O")],
    [("She", "O"), ("visited", "O"), ("London", "B-loc.generic"), ("and", "O"),
     ("Paris", "B-loc.generic"), (".", "O")],
    [("Facebook", "B-org.generic"), ("bought", "O"), ("a", "O"), ("company", "O"), (".", "O")],
    [("Alice", "B-person.generic"), ("and", "O"), ("Bob", "B-person.generic"), ("moved", "O"),
     ("to", "O"), ("Tokyo", "B-loc.generic"), (".", "O")],
    [("Google", "B-org.generic"), ("and", "O"), ("Microsoft", "B-org.generic"), ("are", "O"),
     ("companies", "O"), (".", "O")],
]


def write_fixtures() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    pos_path = FIXTURES / "pos_en.tsv"
    with pos_path.open("w", encoding="utf-8") as fh:
        for sent in POS_SENTENCES:
            for pair in sent.split():
                word, _, tag = pair.rpartition("/")
                fh.write(f"{word}\t{tag}\n")
            fh.write("\n")
    print(f"wrote {pos_path} ({len(POS_SENTENCES)} sentences)")
    ner_path = FIXTURES / "ner_en.tsv"
    with ner_path.open("w", encoding="utf-8") as fh:
        for sent in NER_SENTENCES:
            for word, label in sent:
                fh.write(f"{word}\t{label}\n")
            fh.write("\n")
    print(f"wrote {ner_path} ({len(NER_SENTENCES)} sentences)")


def train_models() -> None:
    pos_model = train_log_linear(
        FIXTURES / "pos_en.tsv", TrainConfig(epochs=10, seed=7), tag_set_name="ptb", lang="en"
    )
    pos_model.save(TOYKB / "pos.model")
    print(f"wrote {TOYKB / 'pos.model'} (final loss {pos_model.loss_history[-1]:.4f})")
    ner_model = train_coarse(FIXTURES / "ner_en.tsv", TrainConfig(epochs=10, seed=7), lang="en")
    ner_model.save(TOYKB / "ner.model")
    print(f"wrote {TOYKB / 'ner.model'}")


def main() -> None:
    TOYKB.mkdir(parents=True, exist_ok=True)
    write_embeddings()
    write_ontology()
    write_clusters()
    write_isa()
    write_stats()
    write_synonyms()
    write_fixtures()
    train_models()


if __name__ == "__main__":
    main()
