"""Command-line driver: ``lebesgue-ud <command> [options]``.

An experiment is described by a JSON config file (``--config``) and/or flags;
flags win. Every command writes to ``--out`` (stdout by default) as JSON or
CSV. Module errors exit with status 1 and a JSON error record on stderr.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import diagnostics, discrepancy, estimator, integrands, sequences
from .errors import UDError

SCHEMA = 1


@dataclass
class ExperimentConfig:
    sequence: sequences.SequenceSpec = field(default_factory=sequences.Weyl.golden)
    integrand: str = "x"
    n: int = 10_000
    ratio: float = 1.1
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    seed: int = 0
    replicates: int = 100
    horizon: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise UDError(f"n must be >= 1, got {self.n}")
        if self.ratio <= 1:
            raise UDError(f"checkpoint ratio must exceed 1, got {self.ratio}")
        if self.format not in ("csv", "json"):
            raise UDError(f"format must be csv or json, got {self.format!r}")

    def resolve_integrand(self) -> integrands.Integrand:
        if self.integrand == "complement_indicator":
            return integrands.complement_indicator(self.sequence, self.horizon or self.n)
        return integrands.get(self.integrand)

    def resolve_tolerances(self) -> diagnostics.Tolerances:
        return diagnostics.Tolerances.default(self.n).override(**self.tolerances)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "sequence": sequences.spec_to_json(self.sequence),
            "integrand": self.integrand,
            "n": self.n,
            "checkpoints": self.ratio,
            "tolerances": self.tolerances,
            "seed": self.seed,
        }


def build_config(config_path, overrides: dict) -> ExperimentConfig:
    raw = {}
    if config_path:
        try:
            raw = json.loads(Path(config_path).read_text())
        except json.JSONDecodeError as exc:
            raise UDError(f"{config_path}: invalid JSON ({exc})") from None
    seq = dict(raw.get("sequence") or {"variant": "weyl", "alpha": "golden"})
    if overrides.get("sequence"):
        seq = {"variant": overrides["sequence"]}
    if overrides.get("alpha") is not None:
        seq.pop("alpha_fixed", None)
        seq.pop("rationality", None)
        seq["alpha"] = overrides["alpha"]
    if seq.get("variant") == "weyl" and "alpha" not in seq and "alpha_fixed" not in seq:
        seq["alpha"] = "golden"
    if overrides.get("base") is not None:
        seq["base"] = overrides["base"]
    if overrides.get("input") is not None:
        seq["path"] = overrides["input"]
    seed = overrides["seed"] if overrides.get("seed") is not None else int(raw.get("seed", 0))
    if seq.get("variant") == "prng" and (overrides.get("seed") is not None or "seed" not in seq):
        seq["seed"] = seed
    output = raw.get("output") or {}
    tolerances = dict(raw.get("tolerances") or {})
    for i in range(1, 5):
        value = overrides.get(f"tol_c{i}")
        if value is not None:
            tolerances[f"c{i}"] = value

    def pick(key, raw_key=None, default=None):
        if overrides.get(key) is not None:
            return overrides[key]
        return raw.get(raw_key or key, default)

    return ExperimentConfig(
        sequence=sequences.spec_from_json(seq),
        integrand=pick("integrand", default="x"),
        n=int(pick("n", default=10_000)),
        ratio=float(pick("ratio", "checkpoints", 1.1)),
        tolerances=tolerances,
        out=overrides.get("out") or output.get("path"),
        format=overrides.get("format") or output.get("format", "json"),
        seed=seed,
        replicates=int(pick("replicates", default=100)),
        horizon=pick("horizon"),
    )


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _fail(exc: Exception) -> None:
    record = {"schema": SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc)}}
    click.echo(json.dumps(record), err=True)
    sys.exit(1)


CONFIG_FLAGS = {
    "sequence", "alpha", "base", "input", "integrand", "n", "seed", "ratio", "horizon",
    "tol_c1", "tol_c2", "tol_c3", "tol_c4", "out", "format", "replicates",
}


def experiment_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON experiment config."),
        click.option(
            "--sequence", type=click.Choice(["weyl", "vdc", "prng", "hybrid_pi", "file"]), help="Sequence variant."
        ),
        click.option("--alpha", help='Weyl rotation: a decimal, or "golden", "sqrt2", "pi".'),
        click.option("--base", type=int, help="van der Corput base."),
        click.option("--input", type=click.Path(dir_okay=False), help="Sequence file for --sequence file."),
        click.option("--integrand", help="Catalog id, or complement_indicator (of the chosen sequence)."),
        click.option("--n", type=int, help="Number of sequence points."),
        click.option("--seed", type=int, help="PRNG / survey seed."),
        click.option("--ratio", type=float, help="Geometric checkpoint ratio."),
        click.option("--horizon", type=int, help="Membership horizon for complement_indicator (default n)."),
        click.option("--tol-c1", type=float),
        click.option("--tol-c2", type=float),
        click.option("--tol-c3", type=float),
        click.option("--tol-c4", type=float),
        click.option("--out", type=click.Path(dir_okay=False), help="Output path (default stdout)."),
        click.option("--format", type=click.Choice(["csv", "json"]), help="Output format."),
    ]
    for option in reversed(options):
        func = option(func)

    @functools.wraps(func)
    def wrapper(config_path, **kwargs):
        flags = {k: kwargs.pop(k) for k in list(kwargs) if k in CONFIG_FLAGS}
        try:
            return func(build_config(config_path, flags), **kwargs)
        except (UDError, OSError) as exc:
            _fail(exc)

    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Lebesgue integrals on (0, 1) along uniformly distributed sequences."""


@main.command()
@experiment_options
def generate(cfg: ExperimentConfig):
    """Write the first n points of a sequence."""
    values = sequences.values(cfg.sequence, cfg.n)
    if cfg.format == "csv":
        text = sequences.format_values(values, header=sequences.describe(cfg.sequence))
    else:
        text = _dump_json(
            {
                "schema": SCHEMA,
                "sequence": sequences.spec_to_json(cfg.sequence),
                "n": cfg.n,
                "values": values.tolist(),
            }
        )
    _emit(text, cfg.out)


@main.command("integrate")
@experiment_options
def integrate_cmd(cfg: ExperimentConfig):
    """Empirical mean of an integrand along a sequence, with a checkpoint trace."""
    f = cfg.resolve_integrand()
    run = estimator.integrate(cfg.sequence, f, cfg.n, ratio=cfg.ratio)
    exact = f.exact_integral
    trace = [(n, m, None if exact is None else abs(m - exact)) for n, m in run.trace]
    if cfg.format == "csv":
        text = _csv_text(["n", "mean", "abs_error"], [(n, repr(m), "" if e is None else repr(e)) for n, m, e in trace])
    else:
        text = _dump_json(
            {
                "schema": SCHEMA,
                "config": cfg.to_json(),
                "summary": run.summary.to_json(),
                "tainted": run.summary.tainted,
                "adjusted_points": run.adjusted,
                "trace": [{"n": n, "mean": m, "abs_error": e} for n, m, e in trace],
            }
        )
    _emit(text, cfg.out)


@main.command("discrepancy")
@click.option("--grid", type=int, default=100, show_default=True, help="Uniform grid size for interval defects.")
@experiment_options
def discrepancy_cmd(cfg: ExperimentConfig, grid: int = 100):
    """Star discrepancy and interval defects of a sequence prefix."""
    report = discrepancy.star_discrepancy(
        sequences.values(cfg.sequence, cfg.n), grid=discrepancy.uniform_grid(grid) if grid > 0 else None
    )
    if cfg.format == "csv":
        worst = max((d for _, d in report.defect_grid), default="") if report.defect_grid else ""
        text = _csv_text(
            ["sequence", "n", "d_star", "argmax_t", "argmax_closed", "max_grid_defect"],
            [
                (
                    sequences.describe(cfg.sequence),
                    report.n,
                    repr(report.d_star),
                    repr(report.argmax_interval[1]),
                    report.argmax_closed,
                    repr(worst) if worst != "" else "",
                )
            ],
        )
    else:
        text = _dump_json(
            {"schema": SCHEMA, "sequence": sequences.spec_to_json(cfg.sequence), "report": report.to_json()}
        )
    _emit(text, cfg.out)


CONDITION_HEADER = [
    "sequence",
    "integrand",
    "n",
    "mean",
    "c1_stat",
    "c2_stat",
    "c3_stat",
    "c4_stat",
    "v1",
    "v2",
    "v3",
    "v4",
    "consistent",
    "pattern",
]


def _stat(x) -> str:
    return "" if x is None else repr(float(x))


@main.command()
@experiment_options
def conditions(cfg: ExperimentConfig):
    """Assess conditions 1)-4) and their equivalence on one run."""
    f = cfg.resolve_integrand()
    report = diagnostics.assess(cfg.sequence, f, cfg.n, cfg.resolve_tolerances(), cfg.ratio)
    verdict = diagnostics.equivalence_check(report)
    if cfg.format == "csv":
        row = [
            report.sequence,
            report.integrand,
            report.n,
            _stat(report.mean),
            _stat(report.c1_stat),
            _stat(report.c2_stat),
            _stat(report.c3_stat),
            _stat(report.c4_stat),
            *report.verdicts,
            verdict.consistent,
            verdict.pattern or "",
        ]
        text = _csv_text(CONDITION_HEADER, [row])
    else:
        text = _dump_json(
            {"schema": SCHEMA, "config": cfg.to_json(), "report": report.to_json(), "equivalence": verdict.to_json()}
        )
    _emit(text, cfg.out)


SURVEY_HEADER = ["replicate_id", "seed", "c1_stat", "c2_stat", "c3_stat", "c4_stat", "v1", "v2", "v3", "v4", "all_true"]


@main.command()
@click.option("--replicates", type=int, help="Number of PRNG replicates (>= 30).")
@click.option("--workers", type=int, default=1, show_default=True)
@experiment_options
def survey(cfg: ExperimentConfig, workers: int = 1):
    """Fraction of PRNG sequences on which all four conditions hold."""
    f = cfg.resolve_integrand()
    result = diagnostics.measure_one_survey(f, cfg.replicates, cfg.n, cfg.seed, cfg.resolve_tolerances(), workers)
    rows = [
        [
            row.replicate_id,
            row.seed,
            _stat(row.report.c1_stat),
            _stat(row.report.c2_stat),
            _stat(row.report.c3_stat),
            _stat(row.report.c4_stat),
            *row.report.verdicts,
            row.all_true,
        ]
        for row in result.rows
    ]
    summary = {
        "schema": SCHEMA,
        "integrand": f.id,
        "n": cfg.n,
        "replicates": cfg.replicates,
        "seed": cfg.seed,
        "fraction": result.fraction,
    }
    if cfg.format == "csv":
        text = _csv_text(SURVEY_HEADER, rows) + f"# fraction={result.fraction!r}\n"
    else:
        summary["rows"] = [dict(zip(SURVEY_HEADER, r)) for r in rows]
        text = _dump_json(summary)
    _emit(text, cfg.out)
    if cfg.out:
        click.echo(json.dumps({k: v for k, v in summary.items() if k != "rows"}))


@main.command("list-integrands")
def list_integrands():
    """Print the integrand catalog as JSON."""
    entries = [f.to_json() for f in integrands.CATALOG.values()]
    entries.append(
        {
            "id": "complement_indicator",
            "description": "0 on the points of the chosen sequence (up to the horizon), 1 elsewhere",
            "exact_integral": 1.0,
            "singular_set": [],
            "flags": {
                "bounded": True,
                "riemann_integrable": False,
                "finite_variance": True,
                "monotone_near_singularities": True,
                "nonnegative": True,
                "singular_set_rational": True,
            },
            "variation": None,
        }
    )
    click.echo(_dump_json({"schema": SCHEMA, "integrands": entries}), nl=False)


if __name__ == "__main__":
    main()
