"""Command-line front end: build models, evaluate closed forms, cross-check them, emit figure data."""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
import structlog
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from censemble.config import DEFAULT_SETTINGS, BallConvention, Settings, load_settings
from censemble.config_validator import validate_all_on_startup
from censemble.correlators import CorrelatorSeries, c_two_point_series
from censemble.ensembles.cens import (
    build_diagonalizer,
    frame_potential2,
    frame_potential_exact,
    ipr_bar,
    plateau_exact,
)
from censemble.errors import CEnsembleError, ConfigValidationError, InvalidInputError
from censemble.linalg.tensors import EigenSystem, HermitianOperator, eigh
from censemble.models.builders import gue_sample, pauli_string
from censemble.models.factory import ModelFactory, ModelKind, ModelSpec
from censemble.otoc import otoc_direct, otoc_series
from censemble.plateau import solve_newton
from censemble.reporting.figures import entropy_table, formfactor_table, framepotential_table
from censemble.reporting.writer import (
    build_meta,
    read_matrix,
    read_matrix_csv,
    write_json,
    write_matrix,
    write_matrix_csv,
    write_table,
)
from censemble.runs import Command, RunConfig, TimeGrid
from censemble.spectral import FormFactor, FormFactorKind, form_factor_series, spacing_ratios
from censemble.validation.oracles import frame_potential_report, otoc_mc, two_point_mc
from censemble.volume import (
    GateSetSpec,
    cardinality,
    complexity_bound,
    complexity_bound_frame,
    complexity_bound_orbit,
    duality_check,
    haar_cardinality,
    log_volume,
)

cli = typer.Typer(
    context_settings={"help_option_names": ["-h", "--help"]},
    no_args_is_help=True,
)
log = structlog.get_logger()
console = Console()


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(sys.stderr),
    )


@cli.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Path to YAML settings."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug events."),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Log warnings and errors only."),
) -> None:
    """Eigenvector-ensemble numerics for fixed-spectrum Hamiltonians."""
    _configure_logging(verbose, quiet)
    try:
        settings = load_settings(config) if config else DEFAULT_SETTINGS
    except (OSError, ValidationError) as exc:
        log.error("cli.failed", error_type=type(exc).__name__, error=str(exc))
        raise typer.Exit(code=ConfigValidationError.exit_code) from exc
    ctx.obj = settings


def _settings(ctx: typer.Context) -> Settings:
    return ctx.obj if isinstance(ctx.obj, Settings) else DEFAULT_SETTINGS


def _guarded(command: str, body: Callable[[], None]) -> None:
    """Run a command body, mapping library errors onto exit codes."""
    log.info("cli.start", command=command)
    try:
        body()
    except ValidationError as exc:
        log.error("cli.failed", command=command, error_type="ConfigValidationError", error=str(exc))
        raise typer.Exit(code=ConfigValidationError.exit_code) from exc
    except CEnsembleError as exc:
        log.error("cli.failed", command=command, error_type=type(exc).__name__, error=str(exc))
        raise typer.Exit(code=exc.exit_code) from exc
    log.info("cli.finished", command=command)


def _run_config(ctx: typer.Context, command: Command, **fields: Any) -> RunConfig:
    settings = _settings(ctx)
    if fields.get("output") is None:
        fields["output"] = settings.output.directory
    if fields.get("format") is None:
        fields["format"] = settings.output.format
    if fields.get("threads") is None:
        fields["threads"] = settings.monte_carlo.threads
    run = RunConfig(command=command, **fields)
    validate_all_on_startup(
        settings, threads=run.threads, requested_dim=run.requested_dim, output_dir=run.output
    )
    return run


def _model_from_file(path: Path) -> ModelSpec:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read model document {path}: {exc}") from exc
    # accept both a bare ModelSpec and the document written by `model`
    if isinstance(data, dict) and "result" in data:
        data = data["result"]["model"]
    return ModelSpec.model_validate(data)


def _resolve_model(
    model: Optional[Path],
    kind: ModelKind,
    d: int,
    seed: int,
) -> ModelSpec:
    if model is not None:
        return _model_from_file(model)
    return ModelSpec(kind=kind, parameters={"d": d}, seed=seed)


def _spectrum(ctx: typer.Context, spec: ModelSpec) -> tuple[HermitianOperator, EigenSystem]:
    settings = _settings(ctx)
    h = ModelFactory(settings).build(spec)
    es = eigh(h, degeneracy_tol=settings.tolerances.degeneracy, max_dim=settings.caps.max_dim)
    return h, es


def _observable(label: str, d: int) -> HermitianOperator:
    """``random:<seed>``, ``pauli:<labels>`` or a path to a matrix file."""
    if label.startswith("random:"):
        return gue_sample(d, int(label.split(":", 1)[1]))
    if label.startswith("pauli:"):
        matrix = pauli_string(label.split(":", 1)[1])
        if matrix.shape[0] != d:
            raise InvalidInputError(f"Pauli string {label} has dimension {matrix.shape[0]}, model has {d}")
        return HermitianOperator(matrix)
    path = Path(label)
    if not path.exists():
        raise InvalidInputError(f"observable {label!r} is neither random:/pauli: nor an existing file")
    matrix = read_matrix_csv(path) if path.suffix == ".csv" else read_matrix(path)
    op = HermitianOperator(matrix)
    if op.dim != d:
        raise InvalidInputError(f"observable {label} has dimension {op.dim}, model has {d}")
    return op


def _summary(es: EigenSystem) -> dict[str, Any]:
    summary: dict[str, Any] = {
        "dimension": es.dim,
        "e_min": float(es.values[0]),
        "e_max": float(es.values[-1]),
        "mean_spacing": es.mean_spacing,
        "degenerate": es.is_degenerate,
    }
    if es.dim > 1:
        summary["spacing_min"] = float(np.min(es.spacings))
        summary["spacing_max"] = float(np.max(es.spacings))
    if es.dim >= 3 and not es.is_degenerate:
        summary["mean_ratio"] = spacing_ratios(es)[1]
    return summary


def _print_mapping(title: str, rows: dict[str, Any]) -> None:
    table = Table(title=title)
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in rows.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)


def _print_oracle(report: Any) -> None:
    table = Table(title=f"{report.name}: closed form vs Monte Carlo ({report.samples} samples)")
    for column in ("#", "closed form", "estimate", "stderr", "z"):
        table.add_column(column, justify="right")
    for i, (ref, est, err, z) in enumerate(
        zip(report.reference, report.estimate, report.stderr, report.z_scores)
    ):
        table.add_row(str(i), f"{ref:.6g}", f"{est:.6g}", f"{err:.2g}", f"{z:.2f}")
    console.print(table)
    if not report.passed:
        log.warning("oracle.threshold_exceeded", oracle=report.name, max_abs_z=report.max_abs_z)


def _write_series(run: RunConfig, stem: str, series: CorrelatorSeries, formula: str) -> Path:
    meta = build_meta(run.command.value, config=run.model_dump(mode="json"), seed=run.master_seed, formula=formula)
    meta["series"] = series.meta
    return write_table(run.output_path(stem), series.to_frame(), meta=meta, fmt=run.format)


@cli.command("model")
def cmd_model(
    ctx: typer.Context,
    kind: ModelKind = typer.Option(..., "--kind", help="Model family."),
    d: Optional[int] = typer.Option(None, "--d", help="Dimension (gue, equally-spaced, synthetic)."),
    seed: int = typer.Option(0, "--seed", help="Model seed."),
    sites: Optional[int] = typer.Option(None, "--L", help="Bose-Hubbard sites."),
    bosons: Optional[int] = typer.Option(None, "--N", help="Bose-Hubbard bosons."),
    hopping: Optional[float] = typer.Option(None, "--J", help="Bose-Hubbard hopping."),
    interaction: Optional[float] = typer.Option(None, "--U", help="Bose-Hubbard on-site interaction."),
    theta: Optional[float] = typer.Option(None, "--theta", help="Bose-Hubbard hopping phase."),
    parity: Optional[str] = typer.Option(None, "--parity", help="none, even or odd."),
    boundary: Optional[str] = typer.Option(None, "--boundary", help="open or periodic."),
    n_qubits: Optional[int] = typer.Option(None, "--n-qubits", help="k-local qubit count."),
    locality: Optional[int] = typer.Option(None, "--k", help="k-local locality."),
    real_only: bool = typer.Option(False, "--real-only", help="Keep only real Pauli strings."),
    distribution: Optional[str] = typer.Option(None, "--distribution", help="poisson, wigner_dyson, custom."),
    sigma2: Optional[float] = typer.Option(None, "--sigma2", help="Custom spacing variance."),
    spacing: Optional[float] = typer.Option(None, "--spacing", help="Equally-spaced level spacing."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output directory."),
    matrix_format: str = typer.Option("bin", "--matrix-format", help="bin or csv."),
) -> None:
    """Build a Hamiltonian, write its matrix and a spectrum summary."""

    def body() -> None:
        parameters = {
            "d": d,
            "L": sites,
            "N": bosons,
            "J": hopping,
            "U": interaction,
            "theta": theta,
            "parity": parity,
            "boundary": boundary,
            "n_qubits": n_qubits,
            "k": locality,
            "distribution": distribution,
            "sigma2": sigma2,
            "spacing": spacing,
        }
        if kind is ModelKind.KLOCAL_QUBIT:
            parameters["time_reversal_breaking"] = not real_only
        spec = ModelSpec(kind=kind, parameters={k: v for k, v in parameters.items() if v is not None}, seed=seed)
        run = _run_config(ctx, Command.MODEL, model=spec, output=output, seeds=[seed])
        h, es = _spectrum(ctx, spec)
        stem = f"model_{kind.value}_{h.dim}"
        if matrix_format == "csv":
            matrix_path = write_matrix_csv(run.output_path(stem, "matrix.csv"), h.matrix)
        elif matrix_format == "bin":
            matrix_path = write_matrix(run.output_path(stem, "censmat"), h.matrix)
        else:
            raise InvalidInputError(f"matrix format must be bin or csv, got {matrix_format!r}")
        summary = _summary(es)
        meta = build_meta("model", config=run.model_dump(mode="json"), seed=seed, formula="model")
        write_json(
            run.output_path(stem, "json"),
            {"model": spec.model_dump(mode="json"), "summary": summary, "matrix": matrix_path.name},
            meta=meta,
        )
        _print_mapping(f"{kind.value} spectrum", summary)

    _guarded("model", body)


@cli.command("sff")
def cmd_sff(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model", help="Model document (JSON)."),
    kind: ModelKind = typer.Option(ModelKind.GUE, "--kind", help="Model family when --model is absent."),
    d: int = typer.Option(64, "--d", help="Dimension when --model is absent."),
    seed: int = typer.Option(0, "--seed"),
    tmax: float = typer.Option(100.0, "--tmax"),
    steps: int = typer.Option(2000, "--steps"),
    beta: float = typer.Option(0.0, "--beta", help="β > 0 selects the thermal form factor."),
    form: FormFactor = typer.Option(FormFactor.INFINITE_T, "--form", help="Form-factor variant."),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
    fmt: Optional[str] = typer.Option(None, "--format", help="json or csv."),
) -> None:
    """Spectral form factor on a time grid."""

    def body() -> None:
        spec = _resolve_model(model, kind, d, seed)
        grid = TimeGrid(stop=tmax, steps=steps)
        run = _run_config(
            ctx, Command.SFF, model=spec, times=grid, beta=beta, output=output, format=fmt, seeds=[spec.seed],
            options={"form": form.value},
        )
        _, es = _spectrum(ctx, spec)
        variant = FormFactorKind(FormFactor.FINITE_T if beta > 0 and form is FormFactor.INFINITE_T else form, beta)
        times = grid.points()
        values = form_factor_series(es, variant, times)
        series = CorrelatorSeries(times, values, {"formula": "form_factor", "kind": variant.kind.value, "beta": beta})
        path = _write_series(run, "sff", series, "form_factor")
        late = values[len(values) // 2 :]
        _print_mapping("spectral form factor", {"d": es.dim, "K(0)": float(values[0]), "late mean": float(late.mean()), "file": str(path)})

    _guarded("sff", body)


@cli.command("twopoint")
def cmd_twopoint(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model"),
    kind: ModelKind = typer.Option(ModelKind.GUE, "--kind"),
    d: int = typer.Option(6, "--d"),
    seed: int = typer.Option(0, "--seed"),
    w: str = typer.Option("random:1", "--w", help="random:<seed>, pauli:<labels> or a matrix file."),
    v: str = typer.Option("random:2", "--v"),
    tmax: float = typer.Option(10.0, "--tmax"),
    steps: int = typer.Option(9, "--steps"),
    beta: float = typer.Option(0.0, "--beta"),
    plain: bool = typer.Option(False, "--plain", help="Non-regulated thermal ordering."),
    ensemble: str = typer.Option("c", "--ensemble", help="c or haar."),
    check_mc: bool = typer.Option(False, "--check-mc", help="Compare with a Monte-Carlo average."),
    samples: Optional[int] = typer.Option(None, "--samples"),
    threads: Optional[int] = typer.Option(None, "--threads"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
    fmt: Optional[str] = typer.Option(None, "--format"),
) -> None:
    """Ensemble-averaged two-point function, optionally checked against Monte Carlo."""

    def body() -> None:
        spec = _resolve_model(model, kind, d, seed)
        grid = TimeGrid(stop=tmax, steps=steps)
        run = _run_config(
            ctx, Command.TWOPOINT, model=spec, times=grid, beta=beta, output=output, format=fmt,
            threads=threads, seeds=[spec.seed],
            options={"w": w, "v": v, "plain": plain, "ensemble": ensemble, "check_mc": check_mc, "samples": samples},
        )
        _, es = _spectrum(ctx, spec)
        w_op, v_op = _observable(w, es.dim), _observable(v, es.dim)
        series = c_two_point_series(
            w_op, v_op, es, grid.points(), beta=beta, regulated=not plain, ensemble=ensemble
        )
        path = _write_series(run, "twopoint", series, f"{ensemble}_two_point")
        console.print(f"two-point series written to {path}")
        if check_mc:
            n = samples or _settings(ctx).monte_carlo.samples
            _, report = two_point_mc(
                w_op, v_op, es, grid.points(), n, run.master_seed,
                chunk_size=_settings(ctx).monte_carlo.chunk_size, threads=run.threads,
            )
            meta = build_meta("twopoint", config=run.model_dump(mode="json"), seed=run.master_seed, formula="two_point_mc")
            write_json(run.output_path("twopoint_mc", "json"), report.model_dump(mode="json"), meta=meta)
            _print_oracle(report)

    _guarded("twopoint", body)


@cli.command("otoc")
def cmd_otoc(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model"),
    kind: ModelKind = typer.Option(ModelKind.GUE, "--kind"),
    d: int = typer.Option(4, "--d"),
    seed: int = typer.Option(0, "--seed"),
    w: str = typer.Option("random:1", "--w"),
    v: str = typer.Option("random:2", "--v"),
    tmax: float = typer.Option(5.0, "--tmax"),
    steps: int = typer.Option(4, "--steps"),
    method: str = typer.Option("ensemble", "--method", help="ensemble (closed form) or direct."),
    normalized: bool = typer.Option(False, "--normalized", help="Divide the trace by d."),
    check_mc: bool = typer.Option(False, "--check-mc"),
    samples: Optional[int] = typer.Option(None, "--samples"),
    threads: Optional[int] = typer.Option(None, "--threads"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
    fmt: Optional[str] = typer.Option(None, "--format"),
) -> None:
    """Out-of-time-ordered correlator from the replica closed form or by direct evolution."""

    def body() -> None:
        spec = _resolve_model(model, kind, d, seed)
        grid = TimeGrid(stop=tmax, steps=steps)
        run = _run_config(
            ctx, Command.OTOC, model=spec, times=grid, output=output, format=fmt, threads=threads,
            seeds=[spec.seed],
            options={"w": w, "v": v, "method": method, "normalized": normalized, "check_mc": check_mc},
        )
        _, es = _spectrum(ctx, spec)
        w_op, v_op = _observable(w, es.dim), _observable(v, es.dim)
        times = grid.points()
        if method == "ensemble":
            values = otoc_series(w_op, v_op, es, times, normalized=normalized)
        elif method == "direct":
            scale = 1.0 if normalized else float(es.dim)
            values = np.array([otoc_direct(w_op, v_op, es, float(t)) * scale for t in times])
        else:
            raise InvalidInputError(f"method must be 'ensemble' or 'direct', got {method!r}")
        series = CorrelatorSeries(times, values, {"formula": f"otoc_{method}", "normalized": normalized})
        path = _write_series(run, "otoc", series, f"otoc_{method}")
        console.print(f"OTOC series written to {path}")
        if check_mc:
            n = samples or _settings(ctx).monte_carlo.samples
            report = otoc_mc(
                w_op, v_op, es, times, n, run.master_seed,
                chunk_size=_settings(ctx).monte_carlo.chunk_size, threads=run.threads,
            )
            meta = build_meta("otoc", config=run.model_dump(mode="json"), seed=run.master_seed, formula="otoc_mc")
            write_json(run.output_path("otoc_mc", "json"), report.model_dump(mode="json"), meta=meta)
            _print_oracle(report)

    _guarded("otoc", body)


@cli.command("plateau")
def cmd_plateau(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model"),
    kind: ModelKind = typer.Option(ModelKind.GUE, "--kind"),
    d: int = typer.Option(4, "--d"),
    seed: int = typer.Option(0, "--seed"),
    solve: bool = typer.Option(False, "--solve", help="Solve the plateau equation for Δφ."),
    strict: bool = typer.Option(False, "--strict", help="Fail when the solver does not converge."),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
) -> None:
    """Exact plateau operator invariants and, with --solve, its bootstrap reconstruction."""

    def body() -> None:
        spec = _resolve_model(model, kind, d, seed)
        run = _run_config(
            ctx, Command.PLATEAU, model=spec, output=output, format="json", seeds=[spec.seed],
            options={"solve": solve, "strict": strict},
        )
        h, es = _spectrum(ctx, spec)
        result: dict[str, Any] = {"invariants": plateau_exact(es).invariant_residuals()}
        if solve:
            phi, report = solve_newton(h, config=_settings(ctx).solver, strict=strict)
            result["solver"] = report.model_dump(mode="json")
            result["phi_eigenvalues"] = [float(x) for x in np.linalg.eigvalsh(phi.matrix)]
        meta = build_meta("plateau", config=run.model_dump(mode="json"), seed=run.master_seed, formula="plateau")
        write_json(run.output_path("plateau", "json"), result, meta=meta)
        rows = dict(result["invariants"])
        if solve:
            rows |= {key: result["solver"][key] for key in ("converged", "residual", "reconstruction_error", "dephasing_error")}
        _print_mapping(f"plateau operator, d={es.dim}", rows)

    _guarded("plateau", body)


@cli.command("frame")
def cmd_frame(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model"),
    kind: ModelKind = typer.Option(ModelKind.GUE, "--kind"),
    d: int = typer.Option(6, "--d"),
    seed: int = typer.Option(0, "--seed"),
    check_mc: bool = typer.Option(False, "--check-mc", help="Pair-sample |Tr U†V|⁴."),
    samples: Optional[int] = typer.Option(None, "--samples"),
    threads: Optional[int] = typer.Option(None, "--threads"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
) -> None:
    """Two-frame potential of the C-ensemble: closed form, enumeration value and optional sampling."""

    def body() -> None:
        spec = _resolve_model(model, kind, d, seed)
        run = _run_config(
            ctx, Command.FRAME, model=spec, output=output, format="json", threads=threads,
            seeds=[spec.seed], options={"check_mc": check_mc, "samples": samples},
        )
        _, es = _spectrum(ctx, spec)
        dz = build_diagonalizer(es)
        result: dict[str, Any] = {
            "ipr_bar": ipr_bar(dz),
            "critical_ipr_bar": 2 / (es.dim + 1),
            "f2_closed_form": frame_potential2(dz),
            "f2_enumeration": float(frame_potential_exact(es.dim)),
        }
        if check_mc:
            n = samples or _settings(ctx).monte_carlo.samples
            report = frame_potential_report(
                dz, n, run.master_seed, chunk_size=_settings(ctx).monte_carlo.chunk_size, threads=run.threads
            )
            result["pair_sampled"] = report.model_dump(mode="json")
            _print_oracle(report)
        meta = build_meta("frame", config=run.model_dump(mode="json"), seed=run.master_seed, formula="frame_potential")
        write_json(run.output_path("frame", "json"), result, meta=meta)
        _print_mapping(f"frame potential, d={es.dim}", {k: v for k, v in result.items() if k != "pair_sampled"})

    _guarded("frame", body)


@cli.command("volume")
def cmd_volume(
    ctx: typer.Context,
    model: Optional[Path] = typer.Option(None, "--model"),
    kind: ModelKind = typer.Option(ModelKind.EQUALLY_SPACED, "--kind"),
    d: int = typer.Option(8, "--d"),
    seed: int = typer.Option(0, "--seed"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Ball radius ε."),
    ball: Optional[BallConvention] = typer.Option(None, "--ball", help="real (d²) or gl (2d²)."),
    gates: int = typer.Option(2, "--gates", help="Gate-set cardinality |G|."),
    locality: int = typer.Option(2, "--locality", help="Gate locality q."),
    qubits: Optional[int] = typer.Option(None, "--qubits", help="Qubit count N (default log2 d)."),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
) -> None:
    """Partition function, cardinality and complexity lower bounds of the C-ensemble."""

    def body() -> None:
        settings = _settings(ctx)
        spec = _resolve_model(model, kind, d, seed)
        eps = settings.volume.epsilon if epsilon is None else epsilon
        convention = settings.volume.ball if ball is None else ball
        run = _run_config(
            ctx, Command.VOLUME, model=spec, output=output, format="json", seeds=[spec.seed],
            options={"epsilon": eps, "ball": BallConvention(convention).value, "gates": gates, "locality": locality, "qubits": qubits},
        )
        _, es = _spectrum(ctx, spec)
        n_qubits = qubits or max(1, int(np.ceil(np.log2(es.dim))))
        gate_set = GateSetSpec(cardinality=gates, locality=min(locality, n_qubits), qubits=n_qubits)
        card = cardinality(es, eps, ball=convention)
        haar = haar_cardinality(es.dim, eps, ball=convention)
        dz = build_diagonalizer(es)
        result: dict[str, Any] = {
            "d": es.dim,
            "log_volume": log_volume(es).log_magnitude,
            "log_volume_normalized": log_volume(es, normalized=True).log_magnitude,
            "log_cardinality": card.log_magnitude,
            "log_haar_cardinality": haar.log_magnitude,
            "ratio_to_haar": card.log_magnitude / haar.log_magnitude,
            "bound": complexity_bound(card, gate_set),
            "bound_orbit": complexity_bound_orbit(es.dim, gate_set),
            "bound_frame": complexity_bound_frame(frame_potential2(dz), es.dim, gate_set),
        }
        if np.all(es.values > 0):
            result["duality_residual"] = duality_check(es)
        meta = build_meta("volume", config=run.model_dump(mode="json"), seed=run.master_seed, formula="volume")
        write_json(run.output_path("volume", "json"), result, meta=meta)
        _print_mapping(f"C-ensemble volume, d={es.dim}", result)

    _guarded("volume", body)


@cli.command("figures")
def cmd_figures(
    ctx: typer.Context,
    which: str = typer.Argument(..., help="formfactor, framepotential or entropy."),
    d: int = typer.Option(8, "--d"),
    seed: int = typer.Option(0, "--seed"),
    tmax: float = typer.Option(50.0, "--tmax"),
    steps: int = typer.Option(1000, "--steps"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
    fmt: Optional[str] = typer.Option(None, "--format"),
) -> None:
    """Emit the tables behind the form-factor, frame-potential and entropy figures."""

    def body() -> None:
        run = _run_config(
            ctx, Command.FIGURES, output=output, format=fmt, seeds=[seed],
            options={"which": which, "d": d, "tmax": tmax, "steps": steps},
        )
        settings = _settings(ctx)
        if which == "formfactor":
            _, es = _spectrum(ctx, ModelSpec(kind=ModelKind.GUE, parameters={"d": d}, seed=seed))
            frame = formfactor_table(es, tmax, steps, betas=(0.0, 1.0, 5.0), gue_box=True)
        elif which == "framepotential":
            frame = framepotential_table(d, seed=seed)
        elif which == "entropy":
            frame = entropy_table(epsilon=settings.volume.epsilon, ball=settings.volume.ball)
        else:
            raise InvalidInputError(f"unknown figure {which!r}; use formfactor, framepotential or entropy")
        meta = build_meta("figures", config=run.model_dump(mode="json"), seed=seed, formula=which)
        path = write_table(run.output_path(f"figure_{which}"), frame, meta=meta, fmt=run.format)
        console.print(f"{which} table with {len(frame)} rows written to {path}")

    _guarded("figures", body)


if __name__ == "__main__":  # pragma: no cover
    cli()
