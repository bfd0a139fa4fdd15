"""Command-line entry points: analyze, compare, render.

Exit codes: 0 success, 1 usage or configuration error, 2 analysis error,
3 scorer error. DRAMATURG_CONFIG names a default config file.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import report as report_mod
from .errors import AnalysisError, ConfigError, DramaturgError, ScorerError

EXIT_USAGE = 1
EXIT_ANALYSIS = 2
EXIT_SCORER = 3

CONFIG_ENV_VAR = "DRAMATURG_CONFIG"


@click.group()
def cli() -> None:
    """Stage-minute analytics for dramatic texts."""


@cli.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON config file (default: $DRAMATURG_CONFIG).")
@click.option("--scorer", "scorer_spec", default="lexicon", show_default=True,
              help="'lexicon' or 'external:<command line or host:port or URL>'.")
@click.option("--out", "out_dir", default="out", show_default=True,
              help="Output directory; results cache lives beside it.")
@click.option("--format", "formats", default="json,csv,svg", show_default=True,
              help="Comma-separated subset of json,csv,svg.")
@click.option("--top-n", type=int, default=None, help="Frequency table size (default 10).")
@click.option("--window", type=int, default=None, help="Words per stage minute (default 150).")
@click.option("--no-cache", is_flag=True, help="Recompute even when a cached result exists.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Plays analyzed concurrently (lexicon scorers are pure).")
def analyze(files, config_path, scorer_spec, out_dir, formats, top_n, window,
            no_cache, jobs) -> None:
    """Analyze play FILES into per-play reports and rendered outputs."""
    config_path = config_path or os.environ.get(CONFIG_ENV_VAR) or None
    config = report_mod.load_config(config_path, top_n=top_n, window=window)
    if scorer_spec != "lexicon":
        if not scorer_spec.startswith("external:"):
            raise ConfigError(
                f"--scorer must be 'lexicon' or 'external:<endpoint>', got {scorer_spec!r}"
            )
        config = report_mod.with_external_scorer(config, scorer_spec[len("external:"):])
    format_list = [f.strip() for f in formats.split(",") if f.strip()]
    for fmt in format_list:
        if fmt not in ("json", "csv", "svg"):
            raise ConfigError(f"unknown output format {fmt!r}")

    def run_one(path: str) -> str:
        result = report_mod.analyze_play(
            path, config, out_dir=out_dir, use_cache=not no_cache
        )
        report_mod.render(result, format_list, out_dir)
        return result.title

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            titles = list(pool.map(run_one, files))
    else:
        titles = [run_one(path) for path in files]
    for title in titles:
        target = os.path.join(out_dir, report_mod._safe_dirname(title))
        click.echo(f"analyzed: {title} -> {target}")


@cli.command()
@click.argument("report_files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", default=None,
              help="Directory for comparative.json (default: print to stdout).")
def compare(report_files, out_dir) -> None:
    """Rank plays in two or more saved report.json files."""
    if len(report_files) < 2:
        raise ConfigError("compare needs at least two report files")
    reports = []
    for path in report_files:
        with open(path, "r", encoding="utf-8") as handle:
            reports.append(report_mod.report_from_dict(json.load(handle)))
    comparative = report_mod.compare_plays(reports)
    rendered = report_mod.canonical_json(report_mod.comparative_to_dict(comparative))
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        target = os.path.join(out_dir, "comparative.json")
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(rendered)
        click.echo(f"wrote {target}")
    else:
        click.echo(rendered, nl=False)


@cli.command("render")
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "formats", default="svg", show_default=True,
              help="Comma-separated subset of json,csv,svg.")
@click.option("--out", "out_dir", default="out", show_default=True)
def render_cmd(report_file, formats, out_dir) -> None:
    """Re-render outputs from a saved report.json without recomputing."""
    with open(report_file, "r", encoding="utf-8") as handle:
        loaded = report_mod.report_from_dict(json.load(handle))
    format_list = [f.strip() for f in formats.split(",") if f.strip()]
    written = report_mod.render(loaded, format_list, out_dir)
    for path in written:
        click.echo(f"wrote {path}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except AnalysisError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_SCORER if exc.stage == "score" else EXIT_ANALYSIS
    except ScorerError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_SCORER
    except DramaturgError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
