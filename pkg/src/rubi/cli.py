"""RUBI CLI - bilingual lexicon induction with a ranker learned on a pivot language."""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .alignment import load_alignment, orthogonality_error, save_alignment
from .config import LEDGER_FILE, PipelineConfig, config_hash, dump_config, load_config
from .db import RunLedger
from .errors import InputError, RubiError
from .ltr import load_model, read_features_csv, save_model, train
from .pipeline import (
    InductionResult,
    LanguageTriple,
    PipelineInputs,
    RunDirectory,
    align_languages,
    candidate_lists,
    evaluate_bli,
    evaluation_words,
    featurize,
    label_lists,
    load_dictionary,
    make_languages,
    neighborhood_stats_for,
    ranker_config,
    rerank,
    run_baseline,
    run_rubi,
    source_rows,
)
from .retrieval import (
    CandidateList,
    Criterion,
    read_candidates_tsv,
    write_candidates_tsv,
    write_features_csv,
)
from .utils import format_duration, format_path_list, format_percent

console = Console()
err_console = Console(stderr=True)


def handle_errors(func: Callable) -> Callable:
    """Print RubiError on the console and exit with its code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except RubiError as exc:
            err_console.print(f"[bold red]Error:[/bold red] {exc}")
            raise SystemExit(exc.exit_code) from None

    return wrapper


def parse_overrides(values: tuple[str, ...]) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip() or None
    return overrides


def build_pipeline_config(
    config: Optional[Path],
    overrides: tuple[str, ...],
    seed: Optional[int],
) -> PipelineConfig:
    cfg = load_config(config, parse_overrides(overrides))
    return cfg.with_seed(seed) if seed is not None else cfg


def config_options(func: Callable) -> Callable:
    """--config and --set, shared by every command that reads a PipelineConfig."""
    func = click.option(
        "--set", "overrides", multiple=True, metavar="KEY=VALUE",
        help="Override a config value (repeatable), e.g. --set wproc.epochs=2",
    )(func)
    func = click.option(
        "--config", "-c", "config", type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Flat key=value config file",
    )(func)
    return func


def print_result(result: InductionResult, title: str) -> None:
    if result.evaluation is None:
        console.print(Panel(
            f"Ranked {len(result.ranked)} words (no gold dictionary, no precision)",
            title=title,
            border_style="yellow",
        ))
        return
    ev = result.evaluation
    table = Table(title=title)
    table.add_column("Metric", style="bold")
    table.add_column("Value", justify="right")
    table.add_row("precision@1", format_percent(ev.precision_at_1))
    table.add_row("precision@5", format_percent(ev.precision_at_5))
    table.add_row("evaluated", str(ev.evaluated))
    table.add_row("missing gold", str(ev.missing_gold))
    table.add_row("missing target vocab", str(ev.missing_target_vocab))
    table.add_row("config hash", result.config_hash)
    console.print(table)


@click.group()
@click.version_option(version=__version__, prog_name="rubi")
@click.option("--verbose", "-v", is_flag=True, help="Log debug messages")
def main(verbose: bool):
    """RUBI - ranked unsupervised bilingual lexicon induction.

    Align embedding spaces without parallel data, learn a candidate ranker on
    a pivot language pair, and induce translations for a new pair.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@main.command()
@config_options
@click.option("--source", "-s", required=True, help="Source language tag")
@click.option("--target", "-t", required=True, help="Target language tag")
@click.option("--seed", type=int, required=True, help="Seed for every random choice")
@click.option("--out", "-o", type=click.Path(file_okay=False, path_type=Path), help="Run directory")
@click.option("--refine-dict", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Gold dictionary for RCSLS refinement after alignment")
@handle_errors
def align(config, overrides, source, target, seed, out, refine_dict):
    """Align SOURCE onto TARGET with Wasserstein-Procrustes."""
    cfg = build_pipeline_config(config, overrides, seed)
    if refine_dict is not None:
        cfg = cfg.model_copy(update={"refine": True})
    run_dir = RunDirectory(out or cfg.output_dir, config_hash(cfg))
    inputs = PipelineInputs()
    Xsrc, Ytgt = inputs.space(cfg, source), inputs.space(cfg, target)
    supervision = load_dictionary(refine_dict, source, target) if refine_dict else None

    run_dir.begin("align", {"source": source, "target": target}, cfg.seeds())
    try:
        alignment, log = align_languages(Xsrc, Ytgt, cfg, supervision)
        save_alignment(alignment, run_dir.alignment(source, target))
        log.to_csv(run_dir.convergence(source, target))
        run_dir.record(
            "align", [run_dir.alignment(source, target), run_dir.convergence(source, target)]
        )
    except RubiError:
        run_dir.finish("failed")
        raise
    run_dir.finish()

    final = f"{log.objectives[-1]:.5f}" if log.objectives else "n/a"
    console.print(Panel(
        f"Method: [bold]{alignment.method.value}[/bold]\n"
        f"Orthogonality error: {orthogonality_error(alignment.matrix):.2e}\n"
        f"Final batch objective: {final}\n"
        f"Saved: {run_dir.alignment(source, target)}",
        title=f"{source} → {target}",
        border_style="green",
    ))


@main.command()
@config_options
@click.option("--source", "-s", required=True)
@click.option("--target", "-t", required=True)
@click.option("--alignment", "-a", "alignment_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--words", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Dictionary whose keys are the query words (default: most frequent words)")
@click.option("--criterion", type=click.Choice([c.value for c in Criterion]), default=None,
              help="Retrieval criterion (default: candidate_criterion from the config)")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def candidates(config, overrides, source, target, alignment_path, words, criterion, out):
    """Write the top-q candidate translations of every query word as TSV."""
    cfg = build_pipeline_config(config, overrides, None)
    inputs = PipelineInputs()
    Xsrc, Ytgt = inputs.space(cfg, source), inputs.space(cfg, target)
    Q = load_alignment(alignment_path)
    gold = load_dictionary(words, source, target) if words else None
    rows, missing = source_rows(evaluation_words(cfg, Xsrc, gold), Xsrc)
    lists = candidate_lists(rows, Q, Xsrc, Ytgt, cfg, criterion or cfg.candidate_criterion)
    write_candidates_tsv(lists, out)
    console.print(f"Wrote {len(lists)} candidate lists to [bold]{out}[/bold]"
                  + (f" ({missing} words not in the {source} vocabulary)" if missing else ""))


@main.command(name="featurize")
@config_options
@click.option("--source", "-s", required=True)
@click.option("--target", "-t", required=True)
@click.option("--alignment", "-a", "alignment_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--candidates", "candidates_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--dictionary", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Gold dictionary used to label the candidates")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def featurize_command(
    config, overrides, source, target, alignment_path, candidates_path, dictionary, out
):
    """Compute cosine and CSLS(1..k_max) features for a candidate TSV."""
    cfg = build_pipeline_config(config, overrides, None)
    inputs = PipelineInputs()
    Xsrc, Ytgt = inputs.space(cfg, source), inputs.space(cfg, target)
    Q = load_alignment(alignment_path)
    lists = read_candidates_tsv(candidates_path)
    labels = None
    if dictionary is not None:
        gold = load_dictionary(dictionary, source, target)
        lists = [cl for cl in lists if cl.source_word in gold]
        lists, labels, _ = label_lists(lists, gold, cfg, Ytgt)
    stats = neighborhood_stats_for(cfg, Q, Xsrc, Ytgt)
    features = featurize(lists, Q, Xsrc, Ytgt, cfg, stats)
    write_features_csv(out, lists, features, labels)
    console.print(f"Wrote features for {len(lists)} queries to [bold]{out}[/bold]")


@main.command(name="train")
@config_options
@click.option("--features", "-f", "features_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--cv", "cv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Labelled cross-validation features")
@click.option("--seed", type=int, required=True)
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Model file")
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path),
              help="Training report CSV (step,train_loss,cv_ndcg1)")
@handle_errors
def train_command(config, overrides, features_path, cv_path, seed, out, report):
    """Train the groupwise ranker on a labelled feature CSV."""
    cfg = build_pipeline_config(config, overrides, seed)
    dataset = read_features_csv(features_path)
    cv_set = read_features_csv(cv_path) if cv_path else None
    try:
        model, training = train(dataset, ranker_config(cfg), cv_set)
    except RubiError as exc:
        raise exc.with_stage("train")
    save_model(model, out)
    if report is not None:
        training.to_csv(report)
    best = (
        "n/a" if training.best_step is None
        else f"{training.best_cv:.4f} at step {training.best_step}"
    )
    console.print(Panel(
        f"Queries: {len(dataset)} ({training.dropped_queries} dropped)\n"
        f"Best cv NDCG@{cfg.train.metric_k}: {best}\n"
        f"Saved: {out}",
        title="Ranker",
        border_style="green",
    ))


@main.command()
@click.option("--model", "-m", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--features", "-f", "features_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False, path_type=Path))
@handle_errors
def predict(model_path, features_path, out):
    """Rerank the candidates of a feature CSV with a trained model."""
    model = load_model(model_path)
    queries = read_features_csv(features_path)
    lists = [CandidateList(q.query_id, tuple((t, 0.0) for t in q.candidates)) for q in queries]
    ranked = rerank(model, lists, [q.features for q in queries])
    write_candidates_tsv(ranked, out)
    console.print(f"Wrote {len(ranked)} ranked lists to [bold]{out}[/bold]")


@main.command()
@config_options
@click.option("--ranked", "-r", "ranked_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--dictionary", "-d", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--target", "-t", default=None,
              help="Target language whose vocabulary filters the gold set")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Result JSON")
@handle_errors
def evaluate(config, overrides, ranked_path, dictionary, target, out):
    """Precision@1 and @5 of ranked lists against a gold dictionary."""
    cfg = build_pipeline_config(config, overrides, None)
    ranked = read_candidates_tsv(ranked_path)
    gold = load_dictionary(dictionary)
    target_space = PipelineInputs().space(cfg, target) if target else None
    evaluation = evaluate_bli(ranked, gold, target_space)
    result = InductionResult("evaluate", ranked, config_hash(cfg), cfg.seeds(), evaluation)
    if out is not None:
        result.write(out)
    print_result(result, "Evaluation")


@main.command(name="rubi")
@config_options
@click.option("--source", "-s", required=True, help="Language A (queries)")
@click.option("--target", "-t", required=True, help="Language B (translations to induce)")
@click.option("--pivot", "-p", required=True, help="Language C (learning pair A-C)")
@click.option("--seed", type=int, required=True)
@click.option("--out", "-o", type=click.Path(file_okay=False, path_type=Path), help="Run directory")
@click.option("--resume", is_flag=True, help="Reuse finished stages of an identical configuration")
@handle_errors
def rubi_command(config, overrides, source, target, pivot, seed, out, resume):
    """Run RUBI end to end: learn on SOURCE-PIVOT, predict SOURCE-TARGET."""
    cfg = build_pipeline_config(config, overrides, seed)
    if resume:
        cfg = cfg.model_copy(update={"resume": True})
    langs = LanguageTriple(source, target, pivot)
    run_dir = RunDirectory(out or cfg.output_dir, config_hash(cfg), cfg.resume)
    (run_dir.root / "config.txt").write_text(dump_config(cfg), encoding="utf-8")
    run_dir.begin("rubi", langs.as_dict(), cfg.seeds())
    try:
        result = run_rubi(cfg, langs, run_dir=run_dir)
    except RubiError:
        run_dir.finish("failed")
        raise
    run_dir.finish()
    print_result(result, f"RUBI {source} → {target} (pivot {pivot})")


@main.command()
@config_options
@click.option("--source", "-s", required=True)
@click.option("--target", "-t", required=True)
@click.option("--criterion", type=click.Choice([c.value for c in Criterion]), default="csls")
@click.option("--seed", type=int, default=None)
@click.option("--out", "-o", type=click.Path(file_okay=False, path_type=Path), help="Run directory")
@handle_errors
def baseline(config, overrides, source, target, criterion, seed, out):
    """Wasserstein-Procrustes alignment with NN, CSLS or ISF retrieval."""
    cfg = build_pipeline_config(config, overrides, seed)
    langs = LanguageTriple(source, target)
    run_dir = RunDirectory(out or cfg.output_dir, config_hash(cfg), cfg.resume)
    run_dir.begin(f"baseline-{criterion}", langs.as_dict(), cfg.seeds())
    try:
        result = run_baseline(cfg, langs, criterion, run_dir=run_dir)
    except RubiError:
        run_dir.finish("failed")
        raise
    run_dir.finish()
    print_result(result, f"{result.method} {source} → {target}")


@main.command()
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--langs", default="a,b,c", show_default=True,
              help="Comma-separated tags; dictionaries are written from the first to every other")
@click.option("--n", "n_words", default=2000, show_default=True)
@click.option("--dim", default=50, show_default=True)
@click.option("--noise", default=0.01, show_default=True)
@click.option("--seed", default=0, show_default=True)
@handle_errors
def synth(out_dir, langs, n_words, dim, noise, seed):
    """Write synthetic languages with exact gold dictionaries and a matching config."""
    tags = [t.strip() for t in langs.split(",") if t.strip()]
    if len(tags) < 2:
        raise InputError("synth needs at least two language tags")
    languages = make_languages(tags, n=n_words, dim=dim, noise=noise, seed=seed)
    pairs = [(tags[0], other) for other in tags[1:]]
    written = languages.write(out_dir, pairs)

    lines = [f"embeddings.{tag}={written[tag].name}" for tag in tags]
    lines += [f"dictionaries.{s}-{t}={written[f'{s}-{t}'].name}" for s, t in pairs]
    config_path = Path(out_dir) / "rubi.conf"
    config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    table = Table(title="Synthetic data")
    table.add_column("Artifact", style="bold")
    table.add_column("Path")
    for name, path in written.items():
        table.add_row(name, str(path))
    table.add_row("config", str(config_path))
    console.print(table)


@main.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--limit", "-l", default=10, help="Number of runs to show")
def status(run_dir: Path, limit: int):
    """Show the runs and stage artifacts recorded in RUN_DIR."""
    ledger_path = run_dir / LEDGER_FILE
    if not ledger_path.exists():
        console.print(f"No ledger in [bold]{run_dir}[/bold].")
        return
    ledger = RunLedger(ledger_path)
    runs = ledger.list_runs(limit=limit)
    if not runs:
        console.print("No runs recorded yet.")
        return

    table = Table(title=f"Runs in {run_dir}")
    table.add_column("ID", justify="right")
    table.add_column("Command", style="bold")
    table.add_column("Config hash")
    table.add_column("Started")
    table.add_column("Duration")
    table.add_column("Status")
    for run in runs:
        colour = {"ok": "green", "failed": "red"}.get(run.status, "yellow")
        table.add_row(
            str(run.id),
            run.command,
            run.config_hash,
            run.started_at.strftime("%Y-%m-%d %H:%M"),
            format_duration(run.started_at, run.finished_at),
            f"[{colour}]{run.status}[/{colour}]",
        )
    console.print(table)

    latest = runs[0]
    stages = ledger.get_stages(latest.id) if latest.id is not None else []
    if stages:
        console.print(Panel(
            format_path_list([f"{s.stage}: {s.artifact}" for s in stages], max_display=20),
            title=f"Stages of run {latest.id}",
            border_style="blue",
        ))


if __name__ == "__main__":
    main()
