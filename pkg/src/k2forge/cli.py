"""``k2forge`` command line: ``verify`` runs claims, ``cache`` manages stored D_1 results."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import __version__
from .cache import CacheCorrupted, D1Cache, default_cache_dir
from .claims import (RINGS, Context, NoClaimsSelected, UnknownClaim, exit_code, render_json, render_markdown, run,
                     select)
from .galg import algebra


@click.group()
@click.version_option(__version__, prog_name="k2forge")
@click.option("-v", "--verbose", is_flag=True, help="Log progress of long computations.")
def main(verbose: bool) -> None:
    """Exact checks of K_2 computations for small group algebras over F_2."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(name)s: %(message)s")


@main.command()
@click.option("--ring", type=click.Choice(RINGS), default="d4", show_default=True)
@click.option("--claims", "pattern", default="all", show_default=True,
              help="Comma-separated claim ids or globs, e.g. 'C-L2-*'; 'all' selects every claim.")
@click.option("--deep", is_flag=True, help="Run the full D_4 symbol presentation (several minutes).")
@click.option("--mod-exp", type=click.IntRange(1, 20), default=3, show_default=True,
              help="Work modulo 2^E and 2^(E+1).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled checks.")
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the report here instead of standard output.")
@click.option("--format", "fmt", type=click.Choice(["json", "md"]), default="json", show_default=True)
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True,
              help="Claims of one stage run on this many threads.")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="D_1 cache location (default: $K2FORGE_CACHE_DIR or ~/.cache/k2forge).")
@click.option("--no-cache", is_flag=True, help="Recompute D_1 instead of using the cache.")
def verify(ring, pattern, deep, mod_exp, seed, report, fmt, jobs, cache_dir, no_cache) -> None:
    """Run the selected claims and report pass/fail per claim.

    Exit status: 0 if nothing failed, 1 if a claim failed, 2 on an internal error.
    """
    try:
        chosen = select(pattern)
    except (NoClaimsSelected, UnknownClaim) as exc:
        click.echo(f"error: {exc.args[0]}", err=True)
        sys.exit(2)
    cache = None if no_cache else D1Cache(cache_dir)
    ctx = Context(ring=ring, seed=seed, deep=deep, mod_exp=mod_exp, cache=cache)
    records = run(chosen, ctx, jobs=jobs)
    text = render_json(records, ring) if fmt == "json" else render_markdown(records, ring)
    if report is None:
        click.echo(text, nl=False)
    else:
        try:
            report.write_text(text)
        except OSError as exc:
            click.echo(f"error: cannot write report: {exc}", err=True)
            sys.exit(2)
    for r in records:
        click.echo(f"{r.id:16s} {r.status}", err=True)
    sys.exit(exit_code(records))


@main.command()
@click.option("--dir", "directory", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Cache location (default: $K2FORGE_CACHE_DIR or ~/.cache/k2forge).")
@click.option("--ring", "rings", type=click.Choice(RINGS), multiple=True,
              help="Rings to build (default: all).")
@click.option("--mod-exp", type=click.IntRange(1, 20), default=3, show_default=True)
@click.argument("action", type=click.Choice(["build", "clear"]))
def cache(directory, rings, mod_exp, action) -> None:
    """Build or clear the D_1 cache."""
    store = D1Cache(directory or default_cache_dir())
    if action == "clear":
        n = store.clear()
        click.echo(f"removed {n} cached result(s) from {store.directory}")
        return
    for ring in rings or RINGS:
        try:
            d1 = store.get(algebra(ring), mod_exp)
        except CacheCorrupted as exc:
            click.echo(f"error: {exc}; run 'k2forge cache clear'", err=True)
            sys.exit(2)
        click.echo(f"{ring}: D_1 = {d1.group} ({store.path(ring, mod_exp)})")


if __name__ == "__main__":
    main()
