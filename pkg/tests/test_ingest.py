from datetime import datetime, timezone
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opiniontrack.ingest import (FeedError, FeedItem, detect_language,
                                 feed_item_to_document, load_jsonl, load_profile,
                                 parse_feed, profile_from_text)
from opiniontrack.store import DocumentStore

PROFILE_DIR = Path(__file__).parents[1] / "src" / "opiniontrack" / "data" / "profiles"

RSS_MINIMAL = b"""<?xml version="1.0"?>
<rss version="2.0"><channel><title>c</title>
<item><title>t</title><link>u</link></item>
</channel></rss>"""

ATOM_MINIMAL = b"""<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom">
<entry><title>t</title><link href="u"/></entry>
</feed>"""


def test_parse_rss_minimal():
    items = parse_feed(RSS_MINIMAL)
    assert items == [FeedItem(title="t", link="u")]


def test_parse_atom_minimal():
    items = parse_feed(ATOM_MINIMAL)
    assert len(items) == 1
    assert items[0].title == "t" and items[0].link == "u"


def test_truncated_xml_is_parse_error():
    with pytest.raises(FeedError):
        parse_feed(b"<rss><channel><item><title>t</title>")


def test_unsupported_root():
    with pytest.raises(FeedError, match="root"):
        parse_feed(b"<html><body>hi</body></html>")


def test_items_without_link_dropped():
    xml = b"""<rss version="2.0"><channel>
    <item><title>no link</title></item>
    <item><title>ok</title><link>u</link></item>
    </channel></rss>"""
    items = parse_feed(xml)
    assert [i.title for i in items] == ["ok"]


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=300))
def test_parse_feed_total_on_arbitrary_bytes(data):
    try:
        items = parse_feed(data)
        assert isinstance(items, list)
    except FeedError:
        pass


def test_rss_pubdate_parsed():
    xml = b"""<rss version="2.0"><channel><item>
    <title>t</title><link>u</link>
    <pubDate>Sun, 01 Mar 2015 10:00:00 GMT</pubDate>
    </item></channel></rss>"""
    item = parse_feed(xml)[0]
    assert item.published == datetime(2015, 3, 1, 10, tzinfo=timezone.utc)


# --- feed item -> document ---------------------------------------------


def test_feed_item_text_concatenation():
    doc = feed_item_to_document(FeedItem(title="A", link="u", summary="B"), "news")
    assert doc.text == "A\n\nB"


def test_feed_item_id_deterministic():
    item = FeedItem(title="A", link="http://x/y")
    d1 = feed_item_to_document(item, "news")
    d2 = feed_item_to_document(item, "news")
    assert d1.id == d2.id


def test_feed_item_clock_fallback():
    now = datetime(2020, 5, 5, tzinfo=timezone.utc)
    doc = feed_item_to_document(FeedItem(title="A", link="u"), "blog", now=now)
    assert doc.timestamp == now


# --- jsonl batch loading ------------------------------------------------


def write_lines(tmp_path, lines):
    path = tmp_path / "docs.jsonl"
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


VALID = '{{"id":"d{0}","source":"news","timestamp":"2015-03-0{0}T10:00:00Z","text":"x"}}'


def test_load_jsonl_all_valid(tmp_path):
    path = write_lines(tmp_path, [VALID.format(i) for i in (1, 2, 3)])
    store = DocumentStore(tmp_path / "s")
    stored, bad = load_jsonl(store, path)
    assert stored == 3 and bad == []


def test_load_jsonl_reports_bad_line(tmp_path):
    path = write_lines(tmp_path, [VALID.format(1), "{bad", VALID.format(3)])
    store = DocumentStore(tmp_path / "s")
    stored, bad = load_jsonl(store, path)
    assert stored == 2 and bad == [2]


def test_load_jsonl_empty(tmp_path):
    path = write_lines(tmp_path, [])
    store = DocumentStore(tmp_path / "s")
    assert load_jsonl(store, path) == (0, [])


def test_load_jsonl_missing_file(tmp_path):
    store = DocumentStore(tmp_path / "s")
    with pytest.raises(OSError):
        load_jsonl(store, tmp_path / "nope.jsonl")


# --- language detection -------------------------------------------------


@pytest.fixture(scope="module")
def profiles():
    return [load_profile(PROFILE_DIR / f"{lang}.tsv") for lang in ("pt", "en")]


def test_self_similarity():
    text = "uma frase de treino para o perfil de teste da língua portuguesa"
    profile = profile_from_text("pt", text)
    lang, confidence = detect_language(text, [profile])
    assert lang == "pt"
    assert confidence == pytest.approx(1.0, abs=1e-9)


def test_too_short_is_indeterminate(profiles):
    assert detect_language("ab", profiles) == (None, 0.0)


def test_held_out_accuracy(profiles, fixtures):
    correct = total = 0
    for lang in ("pt", "en"):
        for line in (fixtures / "lang" / f"{lang}_test.txt").read_text().splitlines():
            total += 1
            if detect_language(line, profiles)[0] == lang:
                correct += 1
    assert correct / total >= 0.90


def test_duplication_invariance(profiles, fixtures):
    lines = (fixtures / "lang" / "pt_test.txt").read_text().splitlines()[:10]
    for line in lines:
        assert detect_language(line, profiles)[0] == detect_language(line + line, profiles)[0]
