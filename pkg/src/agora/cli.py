"""Command-line pipeline: collect, followers, graph, polarize, layout, plot, serve.

Machine-readable results go to stdout as one JSON line per command; human
logs and errors go to stderr. Exit codes: 0 success, 1 user/input error,
2 internal error.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import traceback
from pathlib import Path

import click

from . import collect as collect_mod
from . import fixtures as fixtures_mod
from .config import AppConfig, load_config
from .errors import AgoraError, AuthError
from .formats import read_graph, write_graph
from .graph import EDGE_KINDS, GraphOptions, create_graph
from .layout import LayoutParams, create_layout
from .opinion import label_nodes
from .polarization import get_polarization
from .sources import HttpTweetSource, open_replay
from .store import Store


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")
    sys.stdout.flush()


def _open_store(config: AppConfig) -> Store:
    return Store(config.store.path)


def _source(config: AppConfig, replay: str | None, faults: str | None = None):
    if replay:
        return open_replay(replay, faults=faults)
    token = os.environ.get(config.api.token_env, "")
    if not token:
        raise AuthError(
            f"no bearer token: set {config.api.token_env} or use --replay"
        )
    return HttpTweetSource(
        base_url=config.api.base_url, token=token, page_size=config.collect.page_size
    )


def _parse_kinds(kinds: str | None) -> tuple[str, ...]:
    if not kinds:
        return EDGE_KINDS
    out = tuple(k.strip() for k in kinds.split(",") if k.strip())
    unknown = set(out) - set(EDGE_KINDS)
    if unknown:
        raise click.UsageError(
            f"unknown edge kinds {sorted(unknown)}; choose from {', '.join(EDGE_KINDS)}"
        )
    return out


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML configuration file.")
@click.option("-v", "--verbose", is_flag=True, help="More logging on stderr.")
@click.pass_context
def cli(ctx, config_path, verbose):
    """Discussion graph mining, polarization analysis, and sharing."""
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = load_config(config_path)


@cli.command("collect")
@click.argument("query")
@click.option("--replay", type=str, default=None, help="NDJSON replay file instead of the live API.")
@click.option("--faults", type=str, default=None, help="Injected replay faults, e.g. '429@2:1'.")
@click.pass_obj
def cmd_collect(config: AppConfig, query, replay, faults):
    """Collect all tweets matching QUERY into the store, resuming where it stopped."""
    store = _open_store(config)
    source = _source(config, replay, faults)
    since = store.newest_tweet_id(query)
    retry = collect_mod.RetryPolicy(max_retries=config.collect.max_retries)
    report = collect_mod.search_tweets(
        source, query, since_id=since, sink=store.sink(query), retry=retry
    )
    _emit(report.to_json())


@cli.command("followers")
@click.argument("account")
@click.option("--replay", type=str, default=None, help="NDJSON replay file instead of the live API.")
@click.option("--faults", type=str, default=None, help="Injected replay faults.")
@click.pass_obj
def cmd_followers(config: AppConfig, account, replay, faults):
    """Collect the follower ids of ACCOUNT into the store."""
    store = _open_store(config)
    source = _source(config, replay, faults)
    retry = collect_mod.RetryPolicy(max_retries=config.collect.max_retries)
    ids = list(collect_mod.get_followers(source, account, retry=retry))
    total = store.save_followers(account, ids)
    _emit({"account": account, "fetched": len(ids), "total": total})


@cli.command("graph")
@click.argument("query")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output file; format from extension (.gexf/.gml/.json).")
@click.option("--kinds", type=str, default=None,
              help="Comma-separated edge kinds (default: all).")
@click.option("--min-weight", type=int, default=1, show_default=True)
@click.option("--drop-isolated", is_flag=True, default=False)
@click.option("--seeds", type=str, default=None,
              help="Comma-separated seed accounts whose stored followers label nodes.")
@click.pass_obj
def cmd_graph(config: AppConfig, query, out_path, kinds, min_weight, drop_isolated, seeds):
    """Build the interaction graph of QUERY and write it to --out."""
    store = _open_store(config)
    options = GraphOptions(
        edge_kinds=_parse_kinds(kinds), min_weight=min_weight, drop_isolated=drop_isolated
    )
    graph = create_graph(query, store, options)
    stats = None
    if seeds:
        accounts = [a.strip() for a in seeds.split(",") if a.strip()]
        stats = label_nodes(graph, [(a, store.load_followers(a)) for a in accounts])
    write_graph(graph, out_path)
    payload = {"query": query, "out": str(out_path), **graph.summary()}
    if stats is not None:
        payload["labels"] = stats.to_json()
    _emit(payload)


@cli.command("polarize")
@click.argument("query")
@click.option("--seeds", required=True, type=str,
              help="Comma-separated seed accounts (two for the fj metric).")
@click.option("--metrics", type=str, default="fj,rwc", show_default=True)
@click.option("--kinds", type=str, default=None)
@click.option("--k-top", type=int, default=None, help="Absorbing nodes per side.")
@click.option("--rwc-method", type=click.Choice(["exact", "monte-carlo"]),
              default="exact", show_default=True)
@click.option("--walk-seed", type=int, default=0, show_default=True,
              help="Random seed for the monte-carlo estimator.")
@click.pass_obj
def cmd_polarize(config: AppConfig, query, seeds, metrics, kinds, k_top, rwc_method, walk_seed):
    """Compute polarization scores for QUERY using stored follower sets."""
    store = _open_store(config)
    graph = create_graph(query, store, GraphOptions(edge_kinds=_parse_kinds(kinds)))
    accounts = [a.strip() for a in seeds.split(",") if a.strip()]
    stats = label_nodes(graph, [(a, store.load_followers(a)) for a in accounts])
    names = [m.strip() for m in metrics.split(",") if m.strip()]
    result = get_polarization(
        graph, names, k_top=k_top, k_top_fraction=config.polarize.k_top_fraction,
        rwc_method=rwc_method, walks_per_side=config.polarize.walks, seed=walk_seed,
    )
    _emit({**result.to_json(), "labels": stats.to_json()})


@cli.command("layout")
@click.argument("graph_file", type=click.Path())
@click.option("--seed", type=int, default=None, help="Layout random seed.")
@click.option("--iterations", type=int, default=None)
@click.option("--width", type=float, default=None)
@click.option("--height", type=float, default=None)
@click.option("--use-weights", is_flag=True, default=None)
@click.pass_obj
def cmd_layout(config: AppConfig, graph_file, seed, iterations, width, height, use_weights):
    """Rewrite GRAPH_FILE with positions, sizes, and opinion colors."""
    defaults = config.layout
    params = LayoutParams(
        width=width if width is not None else defaults.width,
        height=height if height is not None else defaults.height,
        iterations=iterations if iterations is not None else defaults.iterations,
        force_constant=defaults.force_constant,
        seed=seed if seed is not None else defaults.seed,
        use_weights=use_weights if use_weights is not None else defaults.use_weights,
    )
    doc = create_layout(graph_file, params)
    _emit({"file": str(graph_file), "nodes": len(doc.nodes), "seed": params.seed})


@cli.command("plot")
@click.argument("graph_file", type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Figure file (.png/.pdf/.svg).")
@click.option("--dpi", type=int, default=150, show_default=True)
@click.pass_obj
def cmd_plot(config: AppConfig, graph_file, out_path, dpi):
    """Render GRAPH_FILE to a static figure."""
    from .plot import render_figure  # matplotlib import is slow; keep it lazy

    doc = read_graph(graph_file)
    render_figure(doc, out_path, dpi=dpi)
    _emit({"file": str(graph_file), "out": str(out_path), "nodes": len(doc.nodes)})


@cli.command("export")
@click.argument("query")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="NDJSON file of search-response-shaped pages.")
@click.pass_obj
def cmd_export(config: AppConfig, query, out_path):
    """Export a stored discussion as a replayable NDJSON page stream."""
    store = _open_store(config)
    pages = 0
    tweets = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for page in store.export_pages(query):
            fh.write(json.dumps(page, ensure_ascii=False) + "\n")
            pages += 1
            tweets += len(page["data"])
    _emit({"query": query, "out": str(out_path), "pages": pages, "tweets": tweets})


@cli.command("genfixture")
@click.option("--users", type=int, default=40, show_default=True)
@click.option("--per-side", type=int, default=None,
              help="Seed followers per side (default: the whole side).")
@click.option("--p-cross", type=float, default=0.1, show_default=True)
@click.option("--tweets", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def cmd_genfixture(users, per_side, p_cross, tweets, seed, out_dir):
    """Generate a synthetic two-community replay fixture."""
    spec = fixtures_mod.FixtureSpec(
        users=users, per_side=per_side, p_cross=p_cross, tweets=tweets, seed=seed
    )
    manifest = fixtures_mod.generate_fixture(spec, out_dir)
    _emit({"out": str(out_dir), **{k: manifest[k] for k in ("users", "tweets", "p_cross", "seeds")}})


@cli.command("serve")
@click.option("--addr", type=str, default=None, help="host:port to listen on.")
@click.pass_obj
def cmd_serve(config: AppConfig, addr):
    """Run the upload-and-view HTTP service."""
    import uvicorn

    from .share import create_app

    listen = addr or config.share.listen_addr
    host, _, port = listen.partition(":")
    token = os.environ.get(config.share.token_env, "")
    if not token:
        raise AuthError(f"no upload token: set {config.share.token_env}")
    viewer = Path(config.share.viewer_dist) if config.share.viewer_dist else None
    app = create_app(Path(config.share.data_dir), token, viewer_dist=viewer)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8745), log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="agora", standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except (AgoraError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except Exception:  # noqa: BLE001 - anything else is an internal error
        traceback.print_exc(file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
