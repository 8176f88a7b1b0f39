"""Command-line surface: one subcommand per pipeline stage.

Every command writes its artifact atomically (temp file + rename) so a fatal
failure never leaves a partial output, and prints a one-line summary. All
randomness flows from ``--seed``. Flags can also be set through environment
variables prefixed ``FAITHCTL_``.
"""

from __future__ import annotations

import contextlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from faithctl import analysis, control, corpus, entailment, sampling, textmeasures
from faithctl.errors import (
    FaithctlError,
    GeneratorUnavailableError,
    IngestError,
    JudgeUnavailableError,
)
from faithctl.measures import measure_example

EXIT_DATA_ERROR = 3
EXIT_ENDPOINT_ERROR = 4


@contextlib.contextmanager
def atomic_output(path: str):
    """Yield a writer for ``path``; discard the file if the body raises."""
    tmp = Path(str(path) + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


@contextlib.contextmanager
def command_errors():
    try:
        yield
    except IngestError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DATA_ERROR)
    except (JudgeUnavailableError, GeneratorUnavailableError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ENDPOINT_ERROR)
    except (FaithctlError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def judge_options(f):
    f = click.option(
        "--judge",
        "judge_backend",
        type=click.Choice(["heuristic", "remote"]),
        default="heuristic",
        show_default=True,
        help="Entailment backend (paper uses an MNLI model behind 'remote').",
    )(f)
    f = click.option("--judge-endpoint", default=None, help="Base URL of the /nli service.")(f)
    f = click.option(
        "--theta",
        type=float,
        default=0.8,
        show_default=True,
        help="Heuristic judge content-coverage threshold.",
    )(f)
    return f


def lexicon_option(f):
    return click.option(
        "--lexicon",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="First-person word list override, one token per line.",
    )(f)


def make_judge(judge_backend: str, judge_endpoint: str | None, theta: float) -> entailment.JudgeConfig:
    return entailment.JudgeConfig(
        backend=entailment.Backend(judge_backend),
        theta=theta,
        endpoint=judge_endpoint,
    )


def load_lexicon_flag(lexicon: str | None) -> frozenset[str]:
    if lexicon is None:
        return textmeasures.DEFAULT_FIRST_PERSON
    return textmeasures.load_lexicon(lexicon)


def read_examples(path: str) -> list[corpus.GroundedExample]:
    with open(path, encoding="utf-8") as fh:
        return corpus.ingest(fh, corpus.Format.CANONICAL)


@click.group()
@click.version_option()
def cli():
    """Faithfulness toolkit for knowledge-grounded dialogue."""


@cli.command("ingest")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["canonical", "native"]),
    default="native",
    show_default=True,
)
@click.option(
    "--split",
    type=click.Choice([s.value for s in corpus.Split]),
    default="train",
    show_default=True,
    help="Split label for native files (they carry none themselves).",
)
@click.option("--skip-bad-records", is_flag=True, help="Downgrade record errors to warnings.")
def cmd_ingest(data, out, fmt, split, skip_bad_records):
    """Convert a dataset file to canonical JSONL."""
    with command_errors():
        with open(data, encoding="utf-8") as fh:
            examples = corpus.ingest(
                fh,
                corpus.Format(fmt),
                split=corpus.Split(split),
                skip_bad_records=skip_bad_records,
            )
        with atomic_output(out) as fh:
            corpus.emit(examples, fh)
        click.echo(f"ingested {len(examples)} examples -> {out}")


@cli.command("stats")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@judge_options
@lexicon_option
def cmd_stats(data, out, judge_backend, judge_endpoint, theta, lexicon):
    """Corpus-level groundedness statistics (Table-1 style)."""
    with command_errors():
        examples = read_examples(data)
        stats = corpus.corpus_stats(
            examples,
            make_judge(judge_backend, judge_endpoint, theta),
            lexicon=load_lexicon_flag(lexicon),
        )
        with atomic_output(out) as fh:
            json.dump(stats.to_dict(), fh, indent=2)
            fh.write("\n")
        click.echo(
            f"{stats.n_examples} examples: first-person {100 * stats.pct_first_person:.1f}%, "
            f"mean precision {stats.mean_lex_precision:.3f}, "
            f"entailed {100 * stats.pct_entailed:.1f}% -> {out}"
        )


@cli.command("annotate")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@judge_options
@lexicon_option
@click.option("--jobs", type=int, default=0, show_default="auto", help="Parallel workers.")
def cmd_annotate(data, out, judge_backend, judge_endpoint, theta, lexicon, jobs):
    """Per-example measure reports as JSONL."""
    with command_errors():
        examples = read_examples(data)
        judge = make_judge(judge_backend, judge_endpoint, theta)
        lex = load_lexicon_flag(lexicon)
        workers = jobs if jobs > 0 else (os.cpu_count() or 1)
        if workers > 1 and len(examples) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(lambda ex: measure_example(ex, judge, lexicon=lex), examples))
        else:
            reports = [measure_example(ex, judge, lexicon=lex) for ex in examples]
        with atomic_output(out) as fh:
            for ex, report in zip(examples, reports):
                fh.write(json.dumps({"id": ex.id, **report.to_dict()}) + "\n")
        click.echo(f"annotated {len(examples)} examples -> {out}")


@cli.command("terciles")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_terciles(data, out):
    """Fit lexical-precision tercile boundaries on a training split."""
    with command_errors():
        examples = read_examples(data)
        values = [
            textmeasures.lexical_overlap(
                textmeasures.tokenize(ex.response), textmeasures.tokenize(ex.evidence)
            ).precision
            for ex in examples
        ]
        boundaries = control.fit_terciles(values)
        with atomic_output(out) as fh:
            control.write_boundaries(boundaries, fh)
        click.echo(
            f"fitted terciles on {boundaries.n_fitted} values: "
            f"t_low={boundaries.t_low:.4f} t_high={boundaries.t_high:.4f} -> {out}"
        )


@cli.command("augment")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--boundaries",
    "boundaries_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Reuse persisted training-split boundaries (required for dev/test).",
)
@click.option("--budget", type=int, default=1024, show_default=True, help="Input token budget.")
@judge_options
@lexicon_option
def cmd_augment(data, out, boundaries_path, budget, judge_backend, judge_endpoint, theta, lexicon):
    """Emit control-code training records; persists a boundaries sidecar."""
    with command_errors():
        examples = read_examples(data)
        boundaries = None
        if boundaries_path:
            with open(boundaries_path, encoding="utf-8") as fh:
                boundaries = control.read_boundaries(fh)
        fitted, records = control.augment(
            examples,
            make_judge(judge_backend, judge_endpoint, theta),
            boundaries=boundaries,
            budget=budget,
            lexicon=load_lexicon_flag(lexicon),
        )
        n = 0
        with atomic_output(out) as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
                n += 1
        sidecar = str(out) + ".boundaries.json"
        with atomic_output(sidecar) as fh:
            control.write_boundaries(fitted, fh)
        click.echo(f"augmented {n} examples -> {out} (boundaries: {sidecar})")


@cli.command("filter")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--boundaries",
    "boundaries_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@judge_options
@lexicon_option
def cmd_filter(data, out, boundaries_path, judge_backend, judge_endpoint, theta, lexicon):
    """Keep only examples whose gold response is already faithful."""
    with command_errors():
        examples = read_examples(data)
        with open(boundaries_path, encoding="utf-8") as fh:
            boundaries = control.read_boundaries(fh)
        kept = control.filter_faithful(
            examples,
            make_judge(judge_backend, judge_endpoint, theta),
            boundaries,
            lexicon=load_lexicon_flag(lexicon),
        )
        with atomic_output(out) as fh:
            corpus.emit(kept, fh)
        click.echo(f"kept {len(kept)} of {len(examples)} examples -> {out}")


@cli.command("resample")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--boundaries",
    "boundaries_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option(
    "--gen",
    "gen_backend",
    type=click.Choice(["simulated", "remote"]),
    default="simulated",
    show_default=True,
)
@click.option("--gen-endpoint", default=None, help="Base URL of the /generate service.")
@click.option(
    "--faithful-prob",
    type=float,
    default=0.5,
    show_default=True,
    help="Simulated generator mixture weight.",
)
@click.option("--top-p", type=float, default=0.6, show_default=True, help="Nucleus mass (paper default).")
@click.option("--min-tokens", type=int, default=5, show_default=True, help="Minimum generation length (paper default).")
@click.option("--gen-max-tokens", type=int, default=64, show_default=True)
@click.option("--max-draws", type=int, default=10, show_default=True, help="Resampling cutoff d (paper default).")
@click.option("--budget", type=int, default=1024, show_default=True, help="Input token budget (paper default).")
@click.option("--seed", type=int, default=0, show_default=True, help="Base seed; per-example streams derive from it.")
@click.option("--jobs", type=int, default=0, show_default="auto", help="Parallel workers across examples.")
@judge_options
@lexicon_option
def cmd_resample(
    data,
    out,
    boundaries_path,
    gen_backend,
    gen_endpoint,
    faithful_prob,
    top_p,
    min_tokens,
    gen_max_tokens,
    max_draws,
    budget,
    seed,
    jobs,
    judge_backend,
    judge_endpoint,
    theta,
    lexicon,
):
    """Resample each example until a candidate satisfies all criteria."""
    with command_errors():
        examples = read_examples(data)
        with open(boundaries_path, encoding="utf-8") as fh:
            boundaries = control.read_boundaries(fh)
        gen_cfg = sampling.GenerationConfig(
            nucleus_p=top_p, min_tokens=min_tokens, max_tokens=gen_max_tokens, seed=seed
        )
        rs_cfg = sampling.ResampleConfig(
            boundaries=boundaries,
            judge=make_judge(judge_backend, judge_endpoint, theta),
            max_draws=max_draws,
        )
        if gen_backend == "simulated":
            generator: sampling.Generator = sampling.SimulatedGenerator(
                sampling.SimulatedGeneratorConfig(faithful_prob=faithful_prob, seed=seed)
            )
        else:
            if not gen_endpoint:
                raise click.UsageError("--gen remote requires --gen-endpoint")
            generator = sampling.RemoteGenerator(gen_endpoint)
        lex = load_lexicon_flag(lexicon)

        def run_one(pair):
            ordinal, ex = pair
            return sampling.resample(
                ex,
                gen_cfg,
                rs_cfg,
                generator,
                seed=sampling.example_seed(seed, ordinal),
                budget=budget,
                lexicon=lex,
            )

        workers = jobs if jobs > 0 else (os.cpu_count() or 1)
        indexed = list(enumerate(examples))
        if workers > 1 and len(examples) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run_one, indexed))
        else:
            results = [run_one(pair) for pair in indexed]

        with atomic_output(out) as fh:
            for ex, res in zip(examples, results):
                fh.write(
                    json.dumps(
                        {
                            "id": ex.id,
                            "text": res.chosen.text,
                            "draws_used": res.draws_used,
                            "accepted": res.accepted,
                            "fallback": res.fallback,
                            "lex_precision": res.chosen.lex_precision,
                            "satisfied": {
                                c.value: v for c, v in res.chosen.satisfied.items()
                            },
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        n = len(results)
        accepted = sum(r.accepted for r in results)
        mean_draws = sum(r.draws_used for r in results) / n if n else 0.0
        click.echo(
            f"resampled {n} examples: accepted {100 * accepted / max(n, 1):.1f}%, "
            f"mean draws {mean_draws:.2f} -> {out}"
        )


@cli.command("evaluate")
@click.option(
    "--data",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="JSONL rows: id, system_response, reference_response, evidence.",
)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@judge_options
@lexicon_option
def cmd_evaluate(data, out, judge_backend, judge_endpoint, theta, lexicon):
    """BLEU-4 plus groundedness columns for system outputs."""
    with command_errors():
        rows = []
        with open(data, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    rows.append(
                        analysis.EvalRow(
                            id=rec["id"],
                            system_response=rec["system_response"],
                            reference_response=rec["reference_response"],
                            evidence=rec["evidence"],
                        )
                    )
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise IngestError(f"bad eval row: {exc}", line=lineno) from exc
        report = analysis.evaluate(
            rows,
            make_judge(judge_backend, judge_endpoint, theta),
            lexicon=load_lexicon_flag(lexicon),
        )
        with atomic_output(out) as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        click.echo(report.to_table())
        click.echo(f"evaluated {report.n} rows -> {out}")


@cli.command("correlate")
@click.option(
    "--ratings",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="CSV: item_id,rater_id,fluency,relevance,faithfulness,objectivity.",
)
@click.option(
    "--measures",
    "measures_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Annotate-style JSONL keyed by id.",
)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_correlate(ratings, measures_path, out):
    """Pearson table of automatic measures vs human ratings, plus alphas."""
    with command_errors():
        with open(ratings, encoding="utf-8") as fh:
            matrix = analysis.RatingsMatrix.from_csv(fh)
        measures: dict[str, dict[str, float]] = {}
        with open(measures_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    measures[rec["id"]] = {
                        "no_first_person": 1.0 if rec["objective_voice"] else 0.0,
                        "lex_precision": float(rec["lex_precision"]),
                        "lex_recall": float(rec["lex_recall"]),
                        "entailed": 1.0 if rec["entailed"] else 0.0,
                    }
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise IngestError(f"bad measures row: {exc}", line=lineno) from exc
        table = analysis.correlate(matrix, measures)
        alphas = {q: analysis.krippendorff_alpha(matrix, q) for q in matrix.qualities}
        payload = {
            "pearson": {
                f"{measure}|{quality}": {"r": cell.r, "n": cell.n, "error": cell.error}
                for (measure, quality), cell in sorted(table.items())
            },
            "krippendorff_alpha": alphas,
        }
        with atomic_output(out) as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        click.echo(
            "alphas: "
            + " ".join(f"{q}={a:.3f}" for q, a in alphas.items())
            + f" -> {out}"
        )


def main():
    cli(auto_envvar_prefix="FAITHCTL")


if __name__ == "__main__":
    main()
