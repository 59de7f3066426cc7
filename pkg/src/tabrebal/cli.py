"""Command-line client for the rebalancing toolkit.

Every data command goes through the HTTP service layer: by default an
in-process application instance, or a remote server when --server is
given.  Responses are printed as JSON so runs can be scripted.
"""

from __future__ import annotations

import json
import sys

import click


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _call(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    try:
        body = resp.json()
    except ValueError:
        click.echo(f"error: service returned {resp.status_code}", err=True)
        sys.exit(2)
    if resp.status_code != 200:
        error = body.get("error", "error") if isinstance(body, dict) else "error"
        detail = body.get("detail", body) if isinstance(body, dict) else body
        click.echo(f"{error}: {detail}", err=True)
        sys.exit(2)
    return body


def _emit(body: dict) -> None:
    click.echo(json.dumps(body, indent=2))


@click.group()
@click.option(
    "--server",
    default=None,
    metavar="URL",
    help="Base URL of a running service; defaults to an in-process instance.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Rebalance highly imbalanced tabular data and benchmark the result."""
    ctx.obj = server


@main.command()
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--output-dir", required=True)
@click.option("--k-folds", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def split(server, dataset, schema_path, output_dir, k_folds, seed):
    """Write stratified train/test fold files."""
    _emit(
        _call(
            server,
            "/split",
            {
                "dataset_path": dataset,
                "schema_path": schema_path,
                "output_dir": output_dir,
                "k_folds": k_folds,
                "seed": seed,
            },
        )
    )


@main.command()
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--output", required=True)
@click.option("--fraction", type=float, required=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def imbalance(server, dataset, schema_path, output, fraction, seed):
    """Downsample the minority class to a target fraction."""
    _emit(
        _call(
            server,
            "/imbalance",
            {
                "dataset_path": dataset,
                "schema_path": schema_path,
                "output_path": output,
                "fraction": fraction,
                "seed": seed,
            },
        )
    )


@main.command()
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--output", required=True)
@click.option(
    "--method",
    type=click.Choice(["naive", "smotenc", "hybrid"]),
    required=True,
)
@click.option("--seed", default=0, show_default=True)
@click.option("--k-neighbors", default=5, show_default=True)
@click.option("--argn-epochs", type=int, default=None)
@click.option("--argn-batch-size", type=int, default=None)
@click.option("--argn-lr", type=float, default=None)
@click.option("--argn-embed-dim", type=int, default=None)
@click.option("--argn-hidden-dim", type=int, default=None)
@click.option("--argn-max-bins", type=int, default=None)
@click.pass_obj
def upsample(
    server, dataset, schema_path, output, method, seed, k_neighbors,
    argn_epochs, argn_batch_size, argn_lr, argn_embed_dim, argn_hidden_dim,
    argn_max_bins,
):
    """Upsample the minority class to a 50:50 balance."""
    argn = {
        "epochs": argn_epochs,
        "batch_size": argn_batch_size,
        "learning_rate": argn_lr,
        "embed_dim": argn_embed_dim,
        "hidden_dim": argn_hidden_dim,
        "max_bins": argn_max_bins,
    }
    _emit(
        _call(
            server,
            "/upsample",
            {
                "dataset_path": dataset,
                "schema_path": schema_path,
                "output_path": output,
                "method": method,
                "seed": seed,
                "k_neighbors": k_neighbors,
                "argn": {k: v for k, v in argn.items() if v is not None},
            },
        )
    )


@main.command()
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--model-out", required=True)
@click.option("--learner", type=click.Choice(["rf", "gbm"]), required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--trees", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.option("--bins", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--reg-lambda", type=float, default=None)
@click.pass_obj
def train(server, dataset, schema_path, model_out, learner, seed, trees, depth, bins, lr, reg_lambda):
    """Fit a classifier and save it to disk."""
    params = {
        "n_trees": trees,
        "max_depth": depth,
        "n_bins": bins,
        "learning_rate": lr,
        "reg_lambda": reg_lambda,
    }
    _emit(
        _call(
            server,
            "/train",
            {
                "dataset_path": dataset,
                "schema_path": schema_path,
                "model_path": model_out,
                "learner": learner,
                "seed": seed,
                "params": {k: v for k, v in params.items() if v is not None},
            },
        )
    )


@main.command()
@click.option("--model", required=True)
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--roc-out", default=None)
@click.option("--pr-out", default=None)
@click.pass_obj
def evaluate(server, model, dataset, schema_path, roc_out, pr_out):
    """Score a saved model on a dataset and report AUCs."""
    _emit(
        _call(
            server,
            "/evaluate",
            {
                "model_path": model,
                "dataset_path": dataset,
                "schema_path": schema_path,
                "roc_path": roc_out,
                "pr_path": pr_out,
            },
        )
    )


@main.command()
@click.option("--dataset", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--predicate", default=None, help='e.g. "sex=Female & age=30..40"')
@click.option("--column", "columns", multiple=True, help="Entropy columns; default all features.")
@click.option("--frequency-column", default=None)
@click.option("--minority-only", is_flag=True)
@click.pass_obj
def report(server, dataset, schema_path, predicate, columns, frequency_column, minority_only):
    """Entropy and category-frequency tables for a data partition."""
    _emit(
        _call(
            server,
            "/report",
            {
                "dataset_path": dataset,
                "schema_path": schema_path,
                "predicate": predicate,
                "columns": list(columns) or None,
                "frequency_column": frequency_column,
                "minority_only": minority_only,
            },
        )
    )


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None, help="Key-value config file.")
@click.option("--seed", type=int, required=True)
@click.option("--dataset", default=None)
@click.option("--schema", "schema_path", default=None)
@click.option("--output", default=None)
@click.option("--name", default=None)
@click.option("--k-folds", type=int, default=None)
@click.option("--folds", default=None, help="Comma-separated fold subset.")
@click.option("--fractions", default=None, help="Comma-separated minority fractions.")
@click.option("--methods", default=None, help="Comma-separated subset of unbalanced,naive,smotenc,hybrid.")
@click.option("--learners", default=None, help="Comma-separated subset of rf,gbm.")
@click.option("--workers", type=int, default=None)
@click.option("--smotenc-k", type=int, default=None)
@click.option("--entropy-fraction", type=float, default=None)
@click.option("--set", "extra", multiple=True, metavar="KEY=VALUE", help="Any other config line.")
@click.pass_obj
def bench(
    server, config, seed, dataset, schema_path, output, name, k_folds, folds,
    fractions, methods, learners, workers, smotenc_k, entropy_fraction, extra,
):
    """Run the full benchmark grid and write results CSVs."""
    lines = []
    if config:
        with open(config, "r", encoding="utf-8") as fh:
            lines.append(fh.read())
    flag_lines = {
        "dataset": dataset,
        "schema": schema_path,
        "output": output,
        "name": name,
        "k_folds": k_folds,
        "folds": folds,
        "fractions": fractions,
        "methods": methods,
        "learners": learners,
        "workers": workers,
        "smotenc_k": smotenc_k,
        "entropy_fraction": entropy_fraction,
    }
    for key, value in flag_lines.items():
        if value is not None:
            lines.append(f"{key} = {value}")
    for kv in extra:
        if "=" not in kv:
            click.echo(f"--set expects KEY=VALUE, got {kv!r}", err=True)
            sys.exit(2)
        lines.append(kv)
    body = _call(server, "/bench", {"config_text": "\n".join(lines), "seed": seed})
    _emit(body)
    if body["n_failed"] > 0:
        sys.exit(1)


@main.command()
@click.option("--results", required=True)
@click.option("--output", required=True)
@click.pass_obj
def aggregate(server, results, output):
    """Summarize a results file into per-group means and deviations."""
    _emit(
        _call(
            server,
            "/aggregate",
            {"results_path": results, "output_path": output},
        )
    )


@main.command("demo-data")
@click.option("--csv", "csv_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--rows", default=20000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--positive-rate", default=0.25, show_default=True)
@click.pass_obj
def demo_data(server, csv_path, schema_path, rows, seed, positive_rate):
    """Generate the bundled synthetic demo dataset."""
    _emit(
        _call(
            server,
            "/demo-data",
            {
                "csv_path": csv_path,
                "schema_path": schema_path,
                "n_rows": rows,
                "seed": seed,
                "positive_rate": positive_rate,
            },
        )
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
