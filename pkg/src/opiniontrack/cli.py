"""Batch-mode command line driver wiring all pipeline stages."""

from __future__ import annotations

import json
import sys
import urllib.request
from datetime import date, datetime, timezone
from pathlib import Path

import click

from . import __version__
from . import disambig as disambig_mod
from . import sentiment as sentiment_mod
from .indicators import compute_indicators, render_indicators_json
from .ingest import FeedError, feed_item_to_document, load_jsonl, load_profile, parse_feed
from .kalman import PRESETS
from .models import KbError, load_kb
from .pipeline import (DEFAULT_ALLOWED_LANGS, disambiguate_stage, extract_stage,
                       sentiment_stage)
from .store import DocumentStore, StoreConflictError
from .train import (InsufficientClassesError, train_disambig_from_annotations,
                    train_sentiment_from_annotations)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class DataError(click.ClickException):
    exit_code = EXIT_DATA


def _progress(msg: str):
    click.echo(msg, err=True)


def _load_config_file(path: str | None) -> dict:
    """Optional key=value config file; flags given on the command line win."""
    if not path:
        return {}
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _check_range(date_from: date, date_to: date):
    if date_from > date_to:
        raise click.UsageError(f"--from {date_from} is after --to {date_to}")


def _load_resources(clusters, embeddings, lexicon) -> sentiment_mod.SentimentResources:
    return sentiment_mod.SentimentResources(
        clusters=sentiment_mod.load_clusters(clusters) if clusters
        else sentiment_mod.ClusterMap({}),
        embeddings=sentiment_mod.load_embeddings(embeddings) if embeddings
        else sentiment_mod.EmbeddingTable(2, {}),
        lexicon=sentiment_mod.load_lexicon(lexicon) if lexicon
        else sentiment_mod.SentimentLexicon({}),
    )


def _load_profiles(profile_dir: str | None):
    if not profile_dir:
        return None
    return [load_profile(p) for p in sorted(Path(profile_dir).glob("*.tsv"))]


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__)
def cli():
    """Opinion tracking pipeline: ingest documents, extract entity
    mentions, classify sentiment, aggregate daily indicators."""


# --- ingest ------------------------------------------------------------


@cli.group()
def ingest():
    """Bring documents into the store."""


@ingest.command("jsonl")
@click.argument("file", type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path())
def ingest_jsonl(file, store_path):
    """Load a JSONL batch of documents."""
    store = DocumentStore(store_path)
    stored, bad = load_jsonl(store, file)
    for lineno in bad:
        _progress(f"{file}:{lineno}: skipped malformed line")
    _progress(f"stored {stored} documents")
    click.echo(json.dumps({"stored": stored, "bad_lines": bad}))


@ingest.command("feed")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--url", "urls", multiple=True, help="Feed URL or local file path.")
@click.option("--source", default="news", type=click.Choice(["news", "blog"]))
@click.option("--feeds", "feeds_file", type=click.Path(exists=True),
              help="Feed list file: one 'URL SOURCE' per line.")
def ingest_feed(store_path, urls, source, feeds_file):
    """Fetch RSS/Atom feeds once and store their items as documents."""
    targets = [(u, source) for u in urls]
    if feeds_file:
        for line in Path(feeds_file).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            targets.append((parts[0], parts[1] if len(parts) > 1 else "news"))
    if not targets:
        raise click.UsageError("give --url or --feeds")
    store = DocumentStore(store_path)
    now = datetime.now(timezone.utc)
    stored = 0
    for url, src in targets:
        try:
            if url.startswith(("http://", "https://")):
                with urllib.request.urlopen(url, timeout=30) as resp:
                    data = resp.read()
            else:
                data = Path(url).read_bytes()
            items = parse_feed(data)
        except (OSError, FeedError) as exc:
            _progress(f"{url}: {exc}")
            continue
        for item in items:
            doc = feed_item_to_document(item, src, now=now)
            try:
                if store.put_document(doc):
                    stored += 1
            except StoreConflictError:
                pass  # same link, changed content: keep the first version
        _progress(f"{url}: {len(items)} items")
    click.echo(json.dumps({"stored": stored}))


# --- pipeline stages ---------------------------------------------------


def _stage_options(fn):
    fn = click.option("--to", "date_to", required=True, type=_date)(fn)
    fn = click.option("--from", "date_from", required=True, type=_date)(fn)
    fn = click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))(fn)
    fn = click.option("--store", "store_path", required=True, type=click.Path())(fn)
    return fn


@cli.command()
@_stage_options
@click.option("--langs", default=",".join(DEFAULT_ALLOWED_LANGS),
              help="Comma-separated language allow-list; empty disables the filter.")
@click.option("--profiles", "profile_dir", type=click.Path(exists=True),
              help="Directory of language profile TSV files.")
def extract(store_path, kb_path, date_from, date_to, langs, profile_dir):
    """Detect entity mentions in stored documents."""
    _check_range(date_from, date_to)
    store = DocumentStore(store_path)
    kb = _load_kb(kb_path)
    allowed = tuple(l for l in langs.split(",") if l) if langs else ()
    n = extract_stage(store, kb, date_from, date_to, allowed_langs=allowed,
                      profiles=_load_profiles(profile_dir))
    _progress(f"extracted {n} mentions")
    click.echo(json.dumps({"mentions": n}))


def _load_kb(kb_path):
    try:
        return load_kb(kb_path)
    except KbError as exc:
        raise DataError(str(exc))


@cli.command()
@_stage_options
@click.option("--model", "model_path", type=click.Path(exists=True),
              help="Disambiguation model JSON; without it every mention is Related.")
def disambiguate(store_path, kb_path, date_from, date_to, model_path):
    """Attach Related/Unrelated verdicts to twitter mentions."""
    _check_range(date_from, date_to)
    store = DocumentStore(store_path)
    kb = _load_kb(kb_path)
    model = disambig_mod.load_model(model_path) if model_path else None
    n = disambiguate_stage(store, kb, model, date_from, date_to)
    _progress(f"disambiguated {n} mentions")
    click.echo(json.dumps({"classified": n}))


@cli.command()
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--from", "date_from", required=True, type=_date)
@click.option("--to", "date_to", required=True, type=_date)
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--clusters", type=click.Path(exists=True))
@click.option("--embeddings", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True))
def sentiment(store_path, date_from, date_to, model_path, clusters, embeddings, lexicon):
    """Classify tweet sentiment and attach labels to Related mentions."""
    _check_range(date_from, date_to)
    store = DocumentStore(store_path)
    model = sentiment_mod.load_model(model_path)
    res = _load_resources(clusters, embeddings, lexicon)
    if res.embeddings.dim != model.dim:
        raise DataError(
            f"embedding dimension {res.embeddings.dim} does not match model "
            f"dimension {model.dim}")
    n = sentiment_stage(store, model, res, date_from, date_to)
    _progress(f"labeled {n} mentions")
    click.echo(json.dumps({"labeled": n}))


@cli.command()
@_stage_options
@click.option("--smoothing", default="default",
              type=click.Choice([*PRESETS, "none"]))
@click.option("--out", type=click.Path())
def aggregate(store_path, kb_path, date_from, date_to, smoothing, out):
    """Compute daily indicator series and write them as JSON."""
    _check_range(date_from, date_to)
    store = DocumentStore(store_path)
    kb = _load_kb(kb_path)
    series = compute_indicators(store, kb, date_from, date_to, smoothing=smoothing)
    _write_out(render_indicators_json(series), out)


# --- training ----------------------------------------------------------


@cli.command()
@click.argument("task", type=click.Choice(["sentiment", "disambig"]))
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--kb", "kb_path", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--clusters", type=click.Path(exists=True))
@click.option("--embeddings", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True))
@click.option("--lam", default=1e-3, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--min-df", default=2, show_default=True)
def train(task, store_path, kb_path, out, clusters, embeddings, lexicon,
          lam, seed, min_df):
    """Train a model from the store's annotation log."""
    store = DocumentStore(store_path)
    try:
        if task == "sentiment":
            res = _load_resources(clusters, embeddings, lexicon)
            model, metrics = train_sentiment_from_annotations(
                store, res, lam=lam, seed=seed, min_df=min_df)
            sentiment_mod.save_model(model, out)
        else:
            if not kb_path:
                raise click.UsageError("train disambig requires --kb")
            kb = _load_kb(kb_path)
            model, metrics = train_disambig_from_annotations(
                store, kb, lam=lam, seed=seed)
            disambig_mod.save_model(model, out)
    except InsufficientClassesError as exc:
        raise DataError(str(exc))
    _progress(f"wrote model to {out}")
    click.echo(json.dumps({"task": task, "metrics": metrics}))


# --- serve -------------------------------------------------------------


@cli.command()
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8600, show_default=True)
@click.option("--sentiment-model", type=click.Path())
@click.option("--disambig-model", type=click.Path())
@click.option("--clusters", type=click.Path(exists=True))
@click.option("--embeddings", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True))
@click.option("--langs", default=",".join(DEFAULT_ALLOWED_LANGS))
@click.option("--token", help="Static API token; unset disables auth.")
@click.option("--seed", default=42, show_default=True)
def serve(store_path, kb_path, host, port, sentiment_model, disambig_model,
          clusters, embeddings, lexicon, langs, token, seed):
    """Run the REST/JSON service."""
    from .api import ApiConfig, serve as run_server
    config = ApiConfig(
        store_path=store_path,
        kb_path=kb_path,
        sentiment_model_path=sentiment_model,
        disambig_model_path=disambig_model,
        clusters_path=clusters,
        embeddings_path=embeddings,
        lexicon_path=lexicon,
        allowed_langs=tuple(l for l in langs.split(",") if l),
        api_token=token,
        seed=seed,
    )
    run_server(config, host=host, port=port)


# --- pipeline ----------------------------------------------------------


@cli.command()
@_stage_options
@click.option("--docs", "docs_path", type=click.Path(exists=True),
              help="JSONL document batch to ingest first.")
@click.option("--sentiment-model", type=click.Path(exists=True))
@click.option("--disambig-model", type=click.Path(exists=True))
@click.option("--clusters", type=click.Path(exists=True))
@click.option("--embeddings", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True))
@click.option("--langs", default=",".join(DEFAULT_ALLOWED_LANGS))
@click.option("--profiles", "profile_dir", type=click.Path(exists=True))
@click.option("--smoothing", default="default",
              type=click.Choice([*PRESETS, "none"]))
@click.option("--seed", default=42, show_default=True)
@click.option("--out", type=click.Path())
def pipeline(store_path, kb_path, date_from, date_to, docs_path,
             sentiment_model, disambig_model, clusters, embeddings, lexicon,
             langs, profile_dir, smoothing, seed, out):
    """Run every stage over a date range: ingest, extract, disambiguate,
    sentiment, aggregate."""
    _check_range(date_from, date_to)
    store = DocumentStore(store_path)
    kb = _load_kb(kb_path)
    if docs_path:
        stored, bad = load_jsonl(store, docs_path)
        _progress(f"ingested {stored} documents ({len(bad)} bad lines)")
    allowed = tuple(l for l in langs.split(",") if l) if langs else ()
    n = extract_stage(store, kb, date_from, date_to, allowed_langs=allowed,
                      profiles=_load_profiles(profile_dir))
    _progress(f"extracted {n} mentions")
    dmodel = disambig_mod.load_model(disambig_model) if disambig_model else None
    n = disambiguate_stage(store, kb, dmodel, date_from, date_to)
    _progress(f"disambiguated {n} mentions")
    if sentiment_model:
        smodel = sentiment_mod.load_model(sentiment_model)
        res = _load_resources(clusters, embeddings, lexicon)
        n = sentiment_stage(store, smodel, res, date_from, date_to)
        _progress(f"labeled {n} mentions")
    series = compute_indicators(store, kb, date_from, date_to, smoothing=smoothing)
    _write_out(render_indicators_json(series), out)


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False) or EXIT_OK
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return EXIT_USAGE
    except DataError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_DATA
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
