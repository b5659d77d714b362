"""Command-line front end.

Every command prints a JSON record (default) or a CSV table. Failures print
one JSON line ``{"error_class": ..., "message": ...}`` on stderr and exit
with the code attached to the error class: 2 argument/geometry, 3 resource,
4 numerical, 1 failed suite or internal error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__, suite
from .closedform import (PROVENANCE, intersecting_trace, n_interval, separation_expansion,
                         two_interval_trace)
from .errors import ArgumentError, EntropyToolkitError
from .geometry import (IntervalSet, Partition, check_pair, cross_ratio_log, parse_interval,
                       parse_interval_set, parse_partitioned_sets)
from .herglotz import herglotz_eval, von_neumann_eval
from .specops import (CSV_VERSION, assemble_cross_block, assemble_cutoff_projector, hs_norm_sq,
                      schatten_norm, spectrum_csv, sym_eig)
from .testfns import parse_function, renyi_eval, u_coefficient, u_unit
from .traces import (SweepConfig, delta_trace_cutoff, delta_trace_poly, f_trace_cutoff,
                     f_trace_poly_limit)
from .widom import widom_limit

THREADS_ENV = "DIRAC_ENTROPY_THREADS"
TABLE_VERSION = "v1"


# ---------------------------------------------------------------- config

@dataclass
class ExperimentConfig:
    """Flat ``key = value`` configuration; keys are the command's flag names."""

    command: str
    options: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"command = {self.command}"]
        for k in sorted(self.options):
            v = self.options[k]
            if v is None:
                continue
            if isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        command, opts = None, {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ArgumentError(f"config line {n}: expected 'key = value', got {raw!r}")
            key, val = key.strip(), val.strip()
            if key == "command":
                command = val
            else:
                opts[key] = val
        if command is None:
            raise ArgumentError("config has no 'command' entry")
        return cls(command, opts)

    def validate(self):
        cmd = main_group.commands.get(self.command)
        if cmd is None or self.command == "run":
            raise ArgumentError(f"unknown command {self.command!r}")
        bad = sorted(set(self.options) - set(_flag_map(cmd)))
        if bad:
            raise ArgumentError(f"unknown keys for {self.command}: {', '.join(bad)}")
        return cmd

    def params(self) -> dict:
        """Options keyed by parameter name (click's ``default_map`` layout)."""
        fm = _flag_map(self.validate())
        return {fm[k].name: v for k, v in self.options.items()}


def _flag_map(cmd) -> dict:
    """Flag name without leading dashes -> click parameter."""
    return {max(p.opts, key=len).lstrip("-"): p for p in cmd.params if isinstance(p, click.Option)}


# ---------------------------------------------------------------- output

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, repr floats, non-finite as strings."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def table_csv(name: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# dirac-entropy/{name} {TABLE_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _emit(ctx, text: str):
    out = ctx.params.get("output")
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text.rstrip("\n"))


def _report(ctx, record: dict, table: tuple | None = None):
    """Write ``record`` as JSON or, with ``--format csv``, the table ``(name, columns, rows)``."""
    fmt = ctx.params.get("fmt", "json")
    if fmt == "csv":
        if table is None:
            raise ArgumentError(f"{ctx.command.name} has no tabular output; use --format json")
        _emit(ctx, table_csv(*table))
    else:
        _emit(ctx, dumps(record))


def _dump_config(ctx) -> bool:
    if ctx.obj and ctx.obj.get("dump_config"):
        opts = {flag: ctx.params[p.name] for flag, p in _flag_map(ctx.command).items()
                if p.name != "output"}
        click.echo(ExperimentConfig(ctx.command.name, opts).to_text(), nl=False)
        return True
    return False


def _fmt_option(choices=("json", "csv")):
    return click.option("--format", "fmt", type=click.Choice(choices), default=choices[0], show_default=True)


_output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                              help="Write the report to this file instead of stdout.")


def _sets(i1, i2, sets):
    """Geometry from either ``--i1/--i2`` or ``--sets``; returns (set1, set2, combined, partition)."""
    if sets:
        if i1 or i2:
            raise ArgumentError("use either --sets or --i1/--i2")
        combined, part = parse_partitioned_sets(sets)
        halves = sets.split("|")
        return parse_interval_set(halves[0]), parse_interval_set(halves[1]), combined, part
    if not (i1 and i2):
        raise ArgumentError("two intervals are required (--i1 and --i2, or --sets)")
    a, b = parse_interval(i1), parse_interval(i2)
    s1, s2 = IntervalSet([a]), IntervalSet([b])
    combined = s1 | s2
    p1 = [k for k, iv in enumerate(combined) if iv == a]
    return s1, s2, combined, Partition(p1, [1 - p1[0]])


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ArgumentError(f"cannot parse {what} list {text!r}") from None


# ---------------------------------------------------------------- group

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="dirac-entropy")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Flat key = value file supplying defaults for the invoked command.")
@click.option("--dump-config", is_flag=True, help="Print the resolved configuration and exit.")
@click.pass_context
def main_group(ctx, config_path, dump_config):
    """Entanglement-entropy traces for free Dirac fermions on interval unions."""
    ctx.ensure_object(dict)
    ctx.obj["dump_config"] = dump_config
    if config_path:
        with open(config_path) as fh:
            cfg = ExperimentConfig.from_text(fh.read())
        if ctx.invoked_subcommand != cfg.command:
            raise ArgumentError(f"config is for {cfg.command!r}, not {ctx.invoked_subcommand!r}")
        ctx.default_map = {cfg.command: cfg.params()}


@main_group.command("run")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def cmd_run(ctx, config_file):
    """Run the command described by CONFIG_FILE."""
    with open(config_file) as fh:
        cfg = ExperimentConfig.from_text(fh.read())
    cmd = cfg.validate()
    fm = _flag_map(cmd)
    args = []
    for k, v in cfg.options.items():
        if fm[k].is_flag:
            if v.lower() in ("1", "true", "yes"):
                args.append("--" + k)
        else:
            args += ["--" + k, v]
    sub = cmd.make_context(cmd.name, args, parent=ctx)
    with sub:
        return cmd.invoke(sub)


# ---------------------------------------------------------------- commands

@main_group.command("formula")
@click.option("--i1")
@click.option("--i2")
@click.option("--sets", help="Two blocks of intervals, e.g. '0,1;4,5|2,3'.")
@click.option("--f", "f", default="halpha:1", show_default=True)
@_fmt_option(("json",))
@_output_option
@click.pass_context
def cmd_formula(ctx, i1, i2, sets, f, fmt, output):
    """Closed-form trace for separated intervals."""
    s1, s2, combined, part = _sets(i1, i2, sets)
    fn = parse_function(f)
    if _dump_config(ctx):
        return
    if sets:
        res = n_interval(combined.require_separated(), part, fn)
    else:
        res = two_interval_trace(s1.intervals[0], s2.intervals[0], fn)
    _report(ctx, res.to_dict())


@main_group.command("ucoef")
@click.option("--f", "f", default="halpha:1", show_default=True)
@click.option("--s1", type=float, default=0.0, show_default=True)
@click.option("--s2", type=float, default=1.0, show_default=True)
@_fmt_option(("json",))
@_output_option
@click.pass_context
def cmd_ucoef(ctx, f, s1, s2, fmt, output):
    """U(s1, s2; f) by quadrature, with the closed form where available."""
    fn = parse_function(f)
    if _dump_config(ctx):
        return
    u = u_coefficient(fn, s1, s2)
    rec = {"f": fn.name, "sigma1": s1, "sigma2": s2, "value": u.value,
           "quadrature_error": u.quadrature_error}
    if {s1, s2} == {0.0, 1.0}:
        closed, _, src = u_unit(fn)
        if src == "closed":
            rec["closed_form"] = closed
            rec["deviation"] = u.value - closed
    _report(ctx, rec)


@main_group.command("spectrum")
@click.option("--set", "support", required=True, help="Interval union, e.g. '0,1;2,3'.")
@click.option("--k", type=float, required=True, help="Cutoff wavenumber (sine kernel uses k/2).")
@click.option("--nodes", type=int, default=None, help="Nodes per interval (default: sized from k).")
@_fmt_option(("csv", "json"))
@_output_option
@click.pass_context
def cmd_spectrum(ctx, support, k, nodes, fmt, output):
    """Eigenvalues of the band-limited projector localized to a set."""
    iset = parse_interval_set(support)
    if _dump_config(ctx):
        return
    system = assemble_cutoff_projector(iset, k, nodes)
    spec = sym_eig(system.matrix)
    if fmt == "csv":
        _emit(ctx, spectrum_csv(spec))
        return
    ev = spec.eigenvalues
    _report(ctx, {"set": str(iset), "k": k, "nodes": system.size, "trace": float(np.sum(ev)),
                  "expected_trace": system.kappa * iset.measure / math.pi,
                  "residual_norm": spec.residual_norm, "eigenvalues": ev.tolist(),
                  "csv_version": CSV_VERSION})


def _sweep_options(fn):
    for opt in reversed([
        click.option("--kmin", type=float, default=200.0, show_default=True),
        click.option("--kmax", type=float, default=260.0, show_default=True),
        click.option("--samples", type=int, default=61, show_default=True),
        click.option("--nodes", type=int, default=None, help="Fixed nodes per elementary interval."),
        click.option("--averaging", type=click.Choice(["window_mean", "none"]), default="window_mean",
                     show_default=True),
    ]):
        fn = opt(fn)
    return fn


def _estimate_rows(est):
    return [(k, v) for k, v in est.per_kappa]


@main_group.command("mutualinfo")
@click.option("--i1")
@click.option("--i2")
@click.option("--sets")
@click.option("--f", "f", default="halpha:1", show_default=True)
@_sweep_options
@_fmt_option()
@_output_option
@click.pass_context
def cmd_mutualinfo(ctx, i1, i2, sets, f, kmin, kmax, samples, nodes, averaging, fmt, output):
    """Cutoff estimate of the mutual information, compared with twice the closed form."""
    s1, s2, combined, part = _sets(i1, i2, sets)
    fn = parse_function(f)
    combined.require_separated()
    if samples < 3:
        click.echo("warning: fewer than 3 samples, no error bar", err=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sweep = SweepConfig(kmin, kmax, samples, averaging, nodes)
    if _dump_config(ctx):
        return
    closed = n_interval(combined, part, fn)
    est = delta_trace_cutoff(s1, s2, fn, sweep)
    target = est.chirality_factor * closed.value
    summary = {"value": est.value, "error_bar": est.error_bar, "target": target,
               "chirality_factor": est.chirality_factor,
               "relative_deviation": (est.value - target) / target if target else float("nan")}
    if fmt == "csv":
        click.echo(dumps(summary), err=True)
    _report(ctx, {"closed_form": closed.to_dict(), "estimate": est.to_dict(), "summary": summary},
            ("mutualinfo", ["kappa", "raw"], _estimate_rows(est)))


@main_group.command("polytrace")
@click.option("--i1", required=True)
@click.option("--i2", required=True)
@click.option("--m", type=int, default=2, show_default=True)
@click.option("--nodes", type=int, default=64, show_default=True)
@_fmt_option(("json",))
@_output_option
@click.pass_context
def cmd_polytrace(ctx, i1, i2, m, nodes, fmt, output):
    """Block-word trace for f = t^m against the closed form."""
    a, b = parse_interval(i1), parse_interval(i2)
    check_pair(a, b)
    fn = parse_function(f"monomial:{m}")
    if _dump_config(ctx):
        return
    tr = delta_trace_poly(a, b, m, nodes)
    closed = two_interval_trace(a, b, fn)
    _report(ctx, {"m": m, "nodes": nodes, "trace": tr, "closed_form": closed.value,
                  "relative_deviation": (tr - closed.value) / closed.value})


@main_group.command("schatten")
@click.option("--i1", required=True)
@click.option("--i2", required=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--nodes", type=int, default=64, show_default=True)
@_fmt_option()
@_output_option
@click.pass_context
def cmd_schatten(ctx, i1, i2, p, nodes, fmt, output):
    """Schatten p-norm of the off-diagonal projector block."""
    a, b = parse_interval(i1), parse_interval(i2)
    check_pair(a, b)
    if _dump_config(ctx):
        return
    block = assemble_cross_block(a, b, nodes, nodes)
    res = schatten_norm(block, p)
    rec = {"p": p, "value": res.value, "tail_bound": res.tail_bound + block.tail_bound,
           "singular_values": res.singular_values.tolist()}
    if p == 2.0:
        rec["hs_sq"] = hs_norm_sq(block)
        rec["hs_sq_closed"] = cross_ratio_log(a, b) / (4 * math.pi ** 2)
    _report(ctx, rec, ("schatten", ["index", "singular_value"],
                       list(enumerate(res.singular_values.tolist()))))


@main_group.command("intersect")
@click.option("--i1", required=True)
@click.option("--i2", required=True)
@click.option("--f", "f", default="halpha:1", show_default=True)
@click.option("--eps", default="0.02,0.01,0.005,0.0025", show_default=True,
              help="Shrink parameters for polynomial f.")
@click.option("--closed-only", is_flag=True, help="Skip the numerical estimate.")
@_sweep_options
@_fmt_option(("json",))
@_output_option
@click.pass_context
def cmd_intersect(ctx, i1, i2, f, eps, closed_only, kmin, kmax, samples, nodes, averaging, fmt, output):
    """Overlapping intervals: closed form plus a numerical estimate.

    Monomials use the shrunken block-word limit; other functions the cutoff sweep.
    """
    a, b = parse_interval(i1), parse_interval(i2)
    fn = parse_function(f)
    eps_list = _floats(eps, "eps")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sweep = SweepConfig(kmin, kmax, samples, averaging, nodes)
    if _dump_config(ctx):
        return
    closed = intersecting_trace(a, b, fn)
    rec = {"closed_form": closed.to_dict()}
    if not closed_only:
        if fn.kind == "monomial":
            lim = f_trace_poly_limit(a, b, fn.params[0], eps_list)
            rec["poly_limit"] = {"value": lim.value, "per_eps": lim.per_eps, "fit_residual": lim.fit_residual,
                                 "relative_deviation": (lim.value - closed.value) / closed.value}
        else:
            est = f_trace_cutoff(a, b, fn, sweep)
            target = est.chirality_factor * closed.value
            rec["cutoff"] = dict(est.to_dict(), target=target,
                                 relative_deviation=(est.value - target) / target)
    _report(ctx, rec)


@main_group.command("widom")
@click.option("--i1", required=True)
@click.option("--i2", required=True)
@click.option("--f", "f", default="halpha:1", show_default=True)
@click.option("--eps", type=float, default=0.1, show_default=True)
@click.option("--n", "n", type=int, default=40, show_default=True)
@_fmt_option()
@_output_option
@click.pass_context
def cmd_widom(ctx, i1, i2, f, eps, n, fmt, output):
    """Mollified Widom combination at eps, eps/2, eps/4 and its extrapolation."""
    a, b = parse_interval(i1), parse_interval(i2)
    check_pair(a, b)
    fn = parse_function(f)
    if _dump_config(ctx):
        return
    lim = widom_limit(a, b, fn, eps, n)
    rec = {"rows": lim.rows, "extrapolated": lim.extrapolated, "reference": lim.reference,
           "relative_deviation": (lim.extrapolated - lim.reference) / lim.reference}
    _report(ctx, rec, ("widom", ["epsilon", "value"], lim.rows))


@main_group.command("herglotz")
@click.option("--alpha", "alphas", default="0.1,0.3,0.5,0.7,0.9,1", show_default=True)
@click.option("--t", "ts", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", show_default=True)
@_fmt_option(("csv", "json"))
@_output_option
@click.pass_context
def cmd_herglotz(ctx, alphas, ts, fmt, output):
    """Integral representation against the direct Renyi function (alpha = 1: von Neumann)."""
    al, tl = _floats(alphas, "alpha"), _floats(ts, "t")
    if _dump_config(ctx):
        return
    rows = []
    for a in al:
        for t in tl:
            rep = von_neumann_eval(t) if a == 1.0 else herglotz_eval(a, t)
            direct = float(renyi_eval(a, t))
            rows.append((a, t, rep, direct, rep - direct))
    cols = ["alpha", "t", "representation", "direct", "deviation"]
    _report(ctx, {"rows": [dict(zip(cols, r)) for r in rows],
                  "max_abs_deviation": max(abs(r[-1]) for r in rows)}, ("herglotz", cols, rows))


@main_group.command("asymptotics")
@click.option("--i1", default="0,1", show_default=True)
@click.option("--template", default="1,2", show_default=True,
              help="Partner interval, translated by each r ('1,inf' for a half-line).")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--r", "rs", default="50,100,200", show_default=True)
@_fmt_option()
@_output_option
@click.pass_context
def cmd_asymptotics(ctx, i1, template, alpha, rs, fmt, output):
    """Exact Renyi entropy vs its leading large-separation term."""
    a, tmpl = parse_interval(i1), parse_interval(template)
    r_list = _floats(rs, "r")
    if _dump_config(ctx):
        return
    rows = []
    prev = None
    for r in r_list:
        row = separation_expansion(a, tmpl, r, alpha)
        resid = row.ratio - 1.0
        rows.append((r, row.exact, row.leading, resid, resid / prev if prev else float("nan")))
        prev = resid
    cols = ["r", "exact", "leading", "residual", "residual_ratio"]
    _report(ctx, {"rows": [dict(zip(cols, r)) for r in rows],
                  "formula": PROVENANCE["asymptotic_bounded" if tmpl.bounded else "asymptotic_unbounded"]},
            ("asymptotics", cols, rows))


@main_group.command("suite")
@click.option("--only", default=None, help="Comma-separated criterion ids or numbers.")
@click.option("--skip-slow", is_flag=True, help="Skip the cutoff sweeps (minutes).")
@_fmt_option(("text", "json"))
@_output_option
@click.pass_context
def cmd_suite(ctx, only, skip_slow, fmt, output):
    """Run the acceptance battery; exit 1 listing failing ids."""
    keys = [k.strip() for k in only.split(",")] if only else None
    chosen = suite.select(keys)
    if skip_slow:
        chosen = [c for c in chosen if not c.slow]
    if _dump_config(ctx):
        return
    echo = (lambda s: click.echo(s)) if fmt == "text" and not output else None
    results = suite.run([c.id for c in chosen], echo)
    failed = [r.id for r in results if not r.passed]
    if fmt == "json":
        _emit(ctx, dumps({"results": [r.to_dict() for r in results], "failed": failed}))
    elif output:
        _emit(ctx, "\n".join(r.line() for r in results))
    if failed:
        click.echo(f"failing criteria: {', '.join(failed)}", err=True)
        ctx.exit(1)


# ---------------------------------------------------------------- entry point

def _fail(error_class: str, message: str, code: int) -> int:
    click.echo(json.dumps({"error_class": error_class, "message": message, "exit_code": code}),
               err=True)
    return code


def _thread_limit():
    val = os.environ.get(THREADS_ENV)
    if not val:
        return None
    try:
        n = int(val)
    except ValueError:
        raise ArgumentError(f"{THREADS_ENV} must be an integer, got {val!r}") from None
    if n < 1:
        raise ArgumentError(f"{THREADS_ENV} must be positive")
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    try:
        limiter = _thread_limit()
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", RuntimeWarning)
                rv = main_group.main(args=argv, prog_name="dirac-entropy", standalone_mode=False)
            for w in caught:
                click.echo(f"warning: {w.message}", err=True)
        finally:
            if limiter is not None:
                limiter.restore_original_limits()
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return _fail("INTERNAL", "aborted", 1)
    except click.ClickException as exc:
        return _fail("ARGUMENT", exc.format_message(), 2)
    except EntropyToolkitError as exc:
        return _fail(exc.error_class, str(exc), exc.exit_code)
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
