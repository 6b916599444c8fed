import json
import pathlib

import pytest

import corpusforge as cf

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="module")
def corpus():
    normalizer = cf.Normalizer()
    return [normalizer.normalize_document(d) for d in cf.read_corpus(DATA / "fixture_corpus.jsonl")]


@pytest.fixture(scope="module")
def tokenizer(corpus):
    return cf.WordPieceTokenizer(cf.train_wordpiece(corpus, vocab_size=1000))


def test_normalize_maps_arabic_yeh_and_kaf():
    n = cf.Normalizer()
    assert n.normalize("يك") == "یک"
    text, stats = n.normalize_with_stats("كتاب ۱۲")
    assert text == "کتاب <NUM>"
    assert stats["chars_mapped"] == 1
    assert stats["numbers_replaced"] == 1
    assert n.normalize(text) == text


def test_custom_config_round_trips():
    config = cf.NormalizationConfig.parse(cf.NormalizationConfig.default().dump())
    assert config.dump() == cf.NormalizationConfig.default().dump()


def test_corpus_round_trip_and_split(tmp_path):
    docs = [cf.Document(str(i), "متن " + str(i), {"source": "s"}) for i in range(200)]
    path = tmp_path / "c.jsonl"
    assert cf.write_corpus(docs, path) == 200
    assert cf.read_corpus(path) == docs
    train, val = cf.split_corpus(docs, 0.1, 7)
    assert len(train) + len(val) == 200
    assert {d.id for d in val} == {d.id for d in docs if cf.assign_to_validation(d.id, 0.1, 7)}


def test_bad_input_raises_typed_errors(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id":"1"}\n', encoding="utf-8")
    with pytest.raises(cf.DataError, match="line 1"):
        cf.read_corpus(bad)
    with pytest.raises(cf.CorpusIoError):
        cf.read_corpus(tmp_path / "missing.jsonl")
    with pytest.raises(cf.ContractError):
        cf.split_corpus([], 1.5, 0)


def test_tokenizer_encode_decode(tokenizer):
    vocab = tokenizer.vocab
    assert vocab.tokens[:5] == cf.Vocab.special_tokens()
    assert "<NUM>" in vocab
    ids, word_ids = tokenizer.encode("ما به دریا", add_specials=True)
    assert ids[0] == 2 and ids[-1] == 3
    assert word_ids[0] == -1 and word_ids[-1] == -1
    assert 1 not in ids
    assert tokenizer.decode(ids) == "ما به دریا"


def test_training_is_reproducible(corpus, tokenizer):
    again = cf.train_wordpiece(corpus, vocab_size=1000, threads=2)
    assert again.serialize() == tokenizer.vocab.serialize()


def test_masking_epoch(corpus, tokenizer):
    config = cf.MaskingConfig()
    config.epoch_seed = 3
    examples = cf.build_epoch(corpus[:50], tokenizer, config, 0)
    assert examples == cf.build_epoch(corpus[:50], tokenizer, config, 0, threads=4)
    assert examples != cf.build_epoch(corpus[:50], tokenizer, config, 1)
    for ex in examples:
        assert len(ex.input_ids) == len(ex.labels) == len(ex.word_ids)
        assert ex.input_ids[0] == 2 and ex.input_ids[-1] == 3
        labeled = [i for i, y in enumerate(ex.labels) if y != cf.IGNORE_LABEL]
        assert labeled
        words = {ex.word_ids[i] for i in labeled}
        for i, w in enumerate(ex.word_ids):
            assert (w in words) == (i in labeled)
        assert cf.parse_example(ex.to_json_line()) == ex
        record = json.loads(ex.to_json_line())
        assert record["input_ids"] == list(ex.input_ids)


def test_summarize_half_integer_median():
    d = cf.summarize([1, 2, 3, 4])
    assert d["median"] == 2.5
    assert d["q1"] == 1.5
    assert d["q3"] == 3.5


def test_count_dataset(tokenizer):
    d = cf.count_dataset("nli=" + str(DATA / "tokstats" / "nli.jsonl") + ":premise,hypothesis", tokenizer)
    assert d["n"] == 151
    assert d["q1"] <= d["median"] <= d["q3"]


def test_discriminator_prefers_persian():
    normalizer = cf.Normalizer()

    def load(name):
        lines = (DATA / "discriminator" / name).read_text(encoding="utf-8").splitlines()
        return [normalizer.normalize_document(cf.Document(f"{name}:{i}", t)) for i, t in enumerate(lines) if t]

    model = cf.train_char_model(load("persian_train.txt"))
    persian, arabic = load("persian_heldout.txt"), load("arabic_heldout.txt")
    kept, rejected = cf.filter(persian + arabic, model)
    assert sum(d.id.startswith("persian") for d in kept) >= 9
    assert sum(d.id.startswith("arabic") for d in rejected) >= 9
    assert all("reject_reason" in d.meta for d in rejected)
    assert cf.score(persian[0].text, model)["lm_logprob_per_char"] > cf.score(arabic[0].text, model)["lm_logprob_per_char"]
