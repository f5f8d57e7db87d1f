"""Acceptance criteria for the toolkit, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion. Criterion 10 (throughput) is informational and never fails; it
prints the measured rate.
"""

import itertools
import json
import random
import time

import jsonschema
import pytest
from importlib import resources

from texkit.analyzer import AnalyzeSettings
from texkit.core import Language, Span
from texkit.embeddings import EmbeddingStore
from texkit.expansion import MentionContext, cluster_score
from texkit.grammar import ReferenceTime, compile_grammar, parse_full, accepts, shift_months
from texkit.knowledge import TermCluster
from texkit.ner import (
    EntityMention,
    combine_hybrid,
    f1_variant,
    read_bio_corpus,
    tag_coarse,
    train_coarse,
)
from texkit.ontology import is_compatible
from texkit.postag import TrainConfig, accuracy, read_tagged_corpus, tag_pos, train_log_linear
from texkit.segmentation import segment_words
from texkit.service import analyze_payload
from texkit.cli import main as cli_main

from conftest import FIXTURES, make_tokens
from test_expansion import brute_force_score
from test_grammar import AMBIG_DSL, AMBIG_PROD, ANBN_DSL, ANBN_PROD, PARENS_DSL, PARENS_PROD
from test_grammar import count_derivations, enumerate_language

import numpy as np


def report(criterion: str, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {criterion}: PASS{suffix}")


def test_01_cluster_score_oracle_equivalence(store):
    rng = random.Random(20201223)
    started = time.perf_counter()
    for trial in range(200):
        m = rng.randint(2, 6)
        n = rng.randint(2, 10)
        terms = [f"t{trial}_{i}" for i in range(m + n)]
        table_in = {t: np.array([rng.gauss(0, 1) for _ in range(8)]) for t in terms}
        table_out = {t: np.array([rng.gauss(0, 1) for _ in range(8)]) for t in terms}
        fixture_store = EmbeddingStore(8, table_in, table_out)
        mention = terms[0]
        ctx = MentionContext(mention, tuple(terms[:m]))
        cluster = TermCluster(1, ["x"], [mention] + terms[m : m + n - 1])
        got = cluster_score(ctx, cluster, fixture_store)
        want = brute_force_score(ctx, cluster, fixture_store)
        assert got == pytest.approx(want, abs=1e-9)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("1 cluster-score oracle equivalence", f"200 fixtures in {elapsed:.3f}s")


def test_02_end_to_end_movie_sentence(engine):
    started = time.perf_counter()
    settings = AnalyzeSettings(
        lang=Language.EN, reference_time=ReferenceTime(2020, 12, 23, 0)
    )
    result = engine.analyze(
        "Captain Marvel was premiered in Los Angeles 22 months ago.", settings
    )
    by_surface = {m.surface: m for m in result.entity_list}
    movie = by_surface["Captain Marvel"]
    assert movie.type_id == "work.movie"
    assert "Spider-Man" in movie.related
    assert "Captain America" in movie.related
    city = by_surface["Los Angeles"]
    assert city.type_id == "loc.city"
    when = by_surface["22 months ago"]
    assert when.meaning == {"value": [2019, 2]}
    # the coarse-only path alone reports the generic location type
    words = segment_words(result.norm_text, Language.EN, engine.lexicon_for(Language.EN))
    coarse = tag_coarse(words, engine.ner_model)
    coarse_types = {m.surface: m.type_id for m in coarse}
    assert coarse_types.get("Los Angeles") == "loc.generic"
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("2 end-to-end movie sentence", f"{elapsed * 1000:.0f} ms")


def test_03_hybrid_policy_truth_table(ontology):
    def m(type_id, source):
        return EntityMention(Span(0, 5), "apple", type_id, source)

    # compatible fine + coarse -> fine
    out = combine_hybrid([m("food.fruit", "fine")], [m("food.generic", "coarse")], ontology)
    assert out[0].type_id == "food.fruit"
    # incompatible -> coarse
    out = combine_hybrid([m("org.company", "fine")], [m("food.generic", "coarse")], ontology)
    assert out[0].type_id == "food.generic"
    # fine only
    out = combine_hybrid([m("food.fruit", "fine")], [], ontology)
    assert out[0].type_id == "food.fruit"
    # coarse only
    out = combine_hybrid([], [m("loc.generic", "coarse")], ontology)
    assert out[0].type_id == "loc.generic"
    # exhaustive: result type is always one of the inputs and fine wins
    # exactly when compatible
    pairs = [("food.fruit", "food.generic"), ("org.company", "food.generic"),
             ("loc.city", "org.generic"), ("work.movie", "work.generic")]
    for fine_t, coarse_t in pairs:
        out = combine_hybrid([m(fine_t, "fine")], [m(coarse_t, "coarse")], ontology)
        expected = fine_t if is_compatible(fine_t, coarse_t, ontology) else coarse_t
        assert out[0].type_id == expected
    report("3 hybrid policy truth table")


def test_04_earley_exhaustive_correctness():
    started = time.perf_counter()
    cases = [
        ("ambiguous", AMBIG_DSL, AMBIG_PROD, ["a"]),
        ("parens", PARENS_DSL, PARENS_PROD, ["(", ")"]),
        ("anbn", ANBN_DSL, ANBN_PROD, ["a", "b"]),
    ]
    checked = 0
    for name, dsl, productions, alphabet in cases:
        grammar = compile_grammar(dsl)
        language = enumerate_language(productions, "S", 8)
        for n in range(0, 9):
            for string in itertools.product(alphabet, repeat=n):
                tokens = make_tokens(*string) if string else []
                got = accepts(tokens, grammar)
                assert got == (tuple(string) in language), (name, string)
                checked += 1
    # ambiguity counts on the ambiguous grammar match the derivation DP
    grammar = compile_grammar(AMBIG_DSL)
    for n in range(1, 9):
        tokens = make_tokens(*["a"] * n)
        trees = parse_full(tokens, grammar)
        assert len(trees) == count_derivations(AMBIG_PROD, "S", ["a"] * n)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report("4 earley exhaustive correctness", f"{checked} strings in {elapsed:.1f}s")


def test_05_calendar_properties(engine):
    for month in range(1, 13):
        for n in range(1, 49):
            y, m = shift_months(2020, month, -n)
            assert shift_months(y, m, n) == (2020, month)
    settings = AnalyzeSettings(
        lang=Language.EN, reference_time=ReferenceTime(2020, 12, 23, 0)
    )
    result = engine.analyze("please book a ticket at 4 pm the day after tomorrow", settings)
    meanings = [m.meaning for m in result.entity_list if m.meaning]
    assert {"value": [2020, 12, 25, 16]} in meanings
    report("5 calendar properties")


def test_06_f1_variant_metric(ontology):
    def m(offset, type_id):
        return EntityMention(Span(offset, 4), "xxxx", type_id, "fine")

    assert f1_variant([m(0, "food.fruit")], [m(0, "food.fruit")], ontology) == (1.0, 1.0, 1.0)
    assert f1_variant([m(0, "food.fruit")], [m(0, "food.generic")], ontology) == (0.5, 0.5, 0.5)
    assert f1_variant([m(0, "food.fruit")], [], ontology) == (0.0, 0.0, 0.0)
    # all-fine predictions reduce to standard exact-match F1
    gold = [m(0, "food.fruit"), m(10, "work.movie"), m(20, "loc.city")]
    pred = [m(0, "food.fruit"), m(10, "loc.city"), m(30, "work.movie")]
    p, r, f1 = f1_variant(gold, pred, ontology)
    matches = 1  # exact span+type agreements
    assert (p, r) == (matches / len(pred), matches / len(gold))
    assert f1 == pytest.approx(2 * p * r / (p + r))
    report("6 f1 variant metric")


def test_07_api_conformance(engine):
    schema = json.loads(
        resources.files("texkit.data.schemas")
        .joinpath("analyze_response.schema.json")
        .read_text(encoding="utf-8")
    )
    fields = ["header", "norm_str", "word_list", "phrase_list", "entity_list",
              "syntactic_parsing_str", "srl_str", "cat_list"]
    # success, disabled modules, and semantic errors all validate and carry
    # every field
    bodies = [
        {"str": "He stayed in San Francisco."},
        {"str": "x", "options": {"word_seg": {"enable": False}}},
        {"str": "x", "options": {"pos_tagging": {"enable": False}}},
        {"str": "x", "options": {"ner": {"enable": False}}},
        {"missing": True},
        {"str": "x", "options": {"pos_tagging": {"alg": "crf"}}},
    ]
    for body in bodies:
        payload = analyze_payload(engine, body)
        jsonschema.validate(payload, schema)
        assert list(payload.keys()) == fields
    # disabled modules yield empty values
    payload = analyze_payload(engine, {"str": "He stayed.", "options": {"word_seg": {"enable": False}}})
    assert payload["word_list"] == [] and payload["entity_list"] == []
    payload = analyze_payload(engine, {"str": "He stayed.", "options": {"pos_tagging": {"enable": False}}})
    assert all(t["tag"] == "" for t in payload["word_list"])
    assert payload["syntactic_parsing_str"] == "" and payload["srl_str"] == ""
    # batch of n returns res_list of n, consistent with single mode
    texts = ["one", "二", "three"]
    batch = analyze_payload(engine, {"str": texts})
    jsonschema.validate(batch, schema)
    assert len(batch["res_list"]) == len(texts)
    for text, item in zip(texts, batch["res_list"]):
        single = analyze_payload(engine, {"str": text})
        item = {**item, "header": {**item["header"], "time_cost_ms": 0, "core_time_cost_ms": 0}}
        single = {**single, "header": {**single["header"], "time_cost_ms": 0, "core_time_cost_ms": 0}}
        assert item == single
    # declared-but-unsupported algorithms fail loudly
    for options in [{"pos_tagging": {"alg": "dnn"}}, {"ner": {"alg": "coarse.lua"}},
                    {"ner": {"alg": "fine.high_acc"}}, {"pos_tagging": {"alg": "crf"}}]:
        payload = analyze_payload(engine, {"str": "x", "options": options})
        assert payload["header"]["ret_code"] == "error.unsupported_alg"
    report("7 api conformance")


def test_08_artifact_determinism(tmp_path, model_dir):
    isa = tmp_path / "isa.tsv"
    isa.write_text(
        "apple\tfruit\t5\nbanana\tfruit\t5\npear\tfruit\t4\n"
        "apple\tcompany\t5\ngoogle\tcompany\t5\nmicrosoft\tcompany\t4\n"
    )
    outputs = []
    for tag in ("a", "b"):
        clusters_out = tmp_path / f"clusters_{tag}.jsonl"
        pos_out = tmp_path / f"pos_{tag}.model"
        ner_out = tmp_path / f"ner_{tag}.model"
        assert cli_main([
            "build-clusters", "--isa", str(isa),
            "--embeddings-in", str(model_dir / "embeddings.in.txt"),
            "--embeddings-out", str(model_dir / "embeddings.out.txt"),
            "--threshold", "0.4", "--seed", "11", "--out", str(clusters_out),
        ]) == 0
        assert cli_main([
            "train-pos", "--corpus", str(FIXTURES / "pos_en.tsv"),
            "--epochs", "5", "--seed", "7", "--out", str(pos_out),
        ]) == 0
        assert cli_main([
            "train-ner", "--corpus", str(FIXTURES / "ner_en.tsv"),
            "--epochs", "5", "--seed", "7", "--out", str(ner_out),
        ]) == 0
        outputs.append((clusters_out.read_bytes(), pos_out.read_bytes(), ner_out.read_bytes()))
    assert outputs[0] == outputs[1]
    report("8 artifact determinism")


def test_09_trainability_smoke():
    sentences = read_tagged_corpus(FIXTURES / "pos_en.tsv")
    assert len(sentences) == 50
    model = train_log_linear(sentences, TrainConfig(epochs=10, seed=7))
    acc = accuracy(model, sentences)
    assert acc >= 0.99
    bio = read_bio_corpus(FIXTURES / "ner_en.tsv")
    assert len(bio) == 10
    ner_model = train_coarse(bio, TrainConfig(epochs=10, seed=7))
    from texkit.ner import _spans_from_bio

    tp = fp = fn = 0
    for sent in bio:
        tokens = make_tokens(*[w for w, _ in sent])
        pred = {(m.span.offset, m.span.length, m.type_id) for m in tag_coarse(tokens, ner_model)}
        gold = set()
        for s, e, t in _spans_from_bio([lab for _, lab in sent]):
            first, last = tokens[s], tokens[e - 1]
            gold.add((first.span.offset, last.span.end - first.span.offset, t))
        tp += len(pred & gold)
        fp += len(pred - gold)
        fn += len(gold - pred)
    assert fp == 0 and fn == 0
    report("9 trainability smoke", f"pos acc {acc:.3f}, ner span F1 1.0")


def test_10_throughput_informational(engine):
    pool = [
        "He stayed in San Francisco last week .",
        "Alice met Bob in Paris yesterday .",
        "The movie was great and the city was big .",
        "Google hired a scientist from London .",
        "She watched the film about New York .",
    ]
    sentences = [pool[i % len(pool)] for i in range(1500)]
    lexicon = engine.lexicon_for(Language.EN)
    started = time.perf_counter()
    for text in sentences:
        words = segment_words(text, Language.EN, lexicon)
        tag_pos(words, engine.pos_model)
    elapsed = time.perf_counter() - started
    rate = len(sentences) / elapsed
    status = "meets the 500/s reference" if rate >= 500 else "below the 500/s reference"
    report("10 throughput (informational)", f"{rate:.0f} sentences/s, {status}")
