"""Command-line interface: recommend, evaluate, extract, serve."""

from __future__ import annotations

import json
import os
import sys
from typing import Optional, Tuple

import click

from .app import Engine, RequestError, new_pr_from_files, render_table
from .cache import RecommendationCache
from .evaluate import STRATEGIES, compare_strategies, retrospective_evaluate
from .extract import (
    build_project_module_index,
    classify_with_provenance,
    default_config,
    extract_imports,
    parse_pattern_file,
    tokenbag_of_pr,
)
from .history import HistoryError, load_history, make_file_reader
from .model import Language


def _build_config(k, window, tech_lexicon, stoplists, fallback=True):
    overrides = {"k": k, "window_size": window, "fallback_enabled": fallback}
    if tech_lexicon:
        with open(tech_lexicon, "r", encoding="utf-8") as fh:
            overrides["tech_lexicon"] = parse_pattern_file(fh.read())
    cfg = default_config(**overrides)
    if stoplists:
        merged = dict(cfg.stdlib_stoplists)
        for spec in stoplists:
            lang, _, path = spec.partition("=")
            if not path:
                raise click.UsageError("--stoplist takes LANGUAGE=PATH")
            try:
                lang_key = Language(lang).value
            except ValueError:
                raise click.UsageError(f"unknown stoplist language {lang!r}")
            with open(path, "r", encoding="utf-8") as fh:
                merged[lang_key] = frozenset(parse_pattern_file(fh.read()))
        cfg = cfg.replace(stdlib_stoplists=merged)
    return cfg


def _load(history_path, repo_path):
    try:
        return load_history(history_path, repo_path)
    except HistoryError as exc:
        raise click.UsageError(str(exc))


@click.group()
def main():
    """Code-reviewer recommendation for pull requests."""


@main.command("recommend")
@click.option("--repo", required=True, type=click.Path(), help="local repository path")
@click.option("--history", "history_path", required=True, type=click.Path(), help="PR metadata file (NDJSON)")
@click.option("--pr", "pr_id", default=None, help="existing PR id to recommend for")
@click.option("--files", multiple=True, help="changed file paths (new-PR use case)")
@click.option("--author", default=None, help="author of the new PR")
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--window", default=30, show_default=True, type=int)
@click.option("--tech-lexicon", default=None, type=click.Path(exists=True))
@click.option("--stoplist", "stoplists", multiple=True, help="LANGUAGE=PATH stoplist override")
@click.option("--strategy", default="correct", type=click.Choice(sorted(STRATEGIES)), show_default=True)
@click.option("--refresh", is_flag=True, help="bypass and invalidate the recommendation cache")
@click.option("--out", default=None, type=click.Path(), help="write the machine-readable recommendation here")
@click.option("--cache-dir", default=None, type=click.Path(), help="persist the cache on disk")
def cli_recommend(repo, history_path, pr_id, files, author, k, window, tech_lexicon, stoplists, strategy, refresh, out, cache_dir):
    """Rank candidate reviewers for a pull request."""
    if pr_id is None and not files:
        raise click.UsageError("provide --pr or --files with --author")
    if files and not author:
        raise click.UsageError("--files requires --author")
    cfg = _build_config(k, window, tech_lexicon, stoplists)
    history = _load(history_path, repo)
    engine = Engine(
        history=history,
        cfg=cfg,
        strategy=strategy,
        cache=RecommendationCache(persist_dir=cache_dir),
    )
    try:
        recommendation = engine.recommend_request(
            pr_id=pr_id, files=list(files) or None, author=author, refresh=refresh
        )
    except RequestError as exc:
        raise click.UsageError(str(exc))
    click.echo(render_table(recommendation), nl=False)
    if not recommendation.entries:
        click.echo("notice: no candidates could be ranked")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(recommendation.to_json())


@main.command("evaluate")
@click.option("--repo", required=True, type=click.Path())
@click.option("--history", "history_path", required=True, type=click.Path())
@click.option("--strategy", "strategies", multiple=True, type=click.Choice(sorted(STRATEGIES)), default=("correct",), show_default=True)
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--window", default=30, show_default=True, type=int)
@click.option("--k-values", default="1,3,5", show_default=True, help="comma-separated report Ks")
@click.option("--tech-lexicon", default=None, type=click.Path(exists=True))
@click.option("--stoplist", "stoplists", multiple=True)
@click.option("--out", default=None, type=click.Path(), help="directory for report files")
def cli_evaluate(repo, history_path, strategies, k, window, k_values, tech_lexicon, stoplists, out):
    """Replay the history and score one or more strategies."""
    cfg = _build_config(k, window, tech_lexicon, stoplists)
    history = _load(history_path, repo)
    if not history.prs:
        raise click.UsageError("history file contains no pull requests")
    try:
        ks = tuple(int(v) for v in k_values.split(","))
    except ValueError:
        raise click.UsageError(f"bad --k-values: {k_values!r}")
    reports = {}
    for name in strategies:
        report = retrospective_evaluate(
            history, STRATEGIES[name], cfg, k_values=ks, strategy_name=name
        )
        reports[name] = report
        click.echo(report.to_table())
        if out:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, f"report_{name}.json"), "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
    if len(reports) == 2:
        (name_a, rep_a), (name_b, rep_b) = reports.items()
        if rep_a.rr_samples and rep_b.rr_samples:
            comparison = compare_strategies(rep_a.rr_samples, rep_b.rr_samples)
            click.echo(f"comparison ({name_a} vs {name_b}):")
            for key, value in comparison.items():
                click.echo(f"  {key}: {value}")
            if out:
                with open(os.path.join(out, f"comparison_{name_a}_vs_{name_b}.json"), "w", encoding="utf-8") as fh:
                    json.dump(comparison, fh, indent=2)
                    fh.write("\n")


@main.command("extract")
@click.option("--repo", required=True, type=click.Path())
@click.option("--history", "history_path", default=None, type=click.Path())
@click.option("--pr", "pr_id", default=None, help="PR id to extract tokens from")
@click.option("--files", multiple=True, help="working-tree files to extract from")
@click.option("--tech-lexicon", default=None, type=click.Path(exists=True))
@click.option("--stoplist", "stoplists", multiple=True)
def cli_extract(repo, history_path, pr_id, files, tech_lexicon, stoplists):
    """Show a PR's (or files') token bag with per-token classification."""
    cfg = _build_config(5, 30, tech_lexicon, stoplists)
    try:
        index = build_project_module_index(repo)
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc))
    if pr_id is not None:
        if history_path is None:
            raise click.UsageError("--pr requires --history")
        history = _load(history_path, repo)
        try:
            pr = history.by_id(pr_id)
        except KeyError:
            raise click.UsageError(f"unknown PR id: {pr_id}")
        bag, warnings = tokenbag_of_pr(pr, make_file_reader(repo), index, cfg)
        for warning in warnings:
            click.echo(f"warning: {warning}", err=True)
        _print_bag(bag)
    elif files:
        reader = make_file_reader(repo)
        decisions = []
        for path in files:
            language = Language.from_path(path)
            if language is Language.OTHER:
                click.echo(f"{path}: skipped (unsupported language)")
                continue
            from .model import ChangedFile

            text = reader(ChangedFile(path=path, language=language))
            imports = extract_imports(text, language)
            decisions.extend(classify_with_provenance(imports, index, cfg))
        if not decisions:
            click.echo("no tokens")
        for token, decision in decisions:
            click.echo(f"{decision:<10} {token}")
    else:
        raise click.UsageError("provide --pr or --files")


def _print_bag(bag):
    if bag.is_empty():
        click.echo("no tokens")
        return
    click.echo("libraries:")
    for token in sorted(bag.libraries):
        click.echo(f"  {token} x{bag.libraries[token]}")
    click.echo("technologies:")
    for token in sorted(bag.technologies):
        click.echo(f"  {token} x{bag.technologies[token]}")


@main.command("serve")
@click.option("--repo", required=True, type=click.Path())
@click.option("--history", "history_path", required=True, type=click.Path())
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--window", default=30, show_default=True, type=int)
@click.option("--tech-lexicon", default=None, type=click.Path(exists=True))
@click.option("--stoplist", "stoplists", multiple=True)
@click.option("--strategy", default="correct", type=click.Choice(sorted(STRATEGIES)), show_default=True)
@click.option("--serve-addr", default=None, help="bind address HOST:PORT (env: REVREC_ADDR)")
@click.option("--cache-dir", default=None, type=click.Path())
def cli_serve(repo, history_path, k, window, tech_lexicon, stoplists, strategy, serve_addr, cache_dir):
    """Run the HTTP recommendation service."""
    from .service import serve

    addr = serve_addr or os.environ.get("REVREC_ADDR", "127.0.0.1:8080")
    cfg = _build_config(k, window, tech_lexicon, stoplists)
    history = _load(history_path, repo)
    engine = Engine(
        history=history,
        cfg=cfg,
        strategy=strategy,
        cache=RecommendationCache(persist_dir=cache_dir),
    )
    serve(engine, addr)


if __name__ == "__main__":
    main()
