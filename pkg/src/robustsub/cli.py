"""Command-line front end.

Every subcommand writes CSV to stdout (or ``--output``); floats are printed
with nine significant digits.  Exit status is 2 for usage errors and 1 for
infeasible or out-of-regime parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from pathlib import Path

from . import __version__
from .ambiguity import (
    AmbiguityParams,
    mad_for_variance,
    powerlaw_ambiguity,
    powerlaw_params,
    three_point,
)
from .bounds import (
    log_grid,
    loglog_slope,
    powerlaw_clique_count,
    powerlaw_clique_scaling_dense,
    powerlaw_mad_bound,
    scaling_mad,
    scaling_variance,
    tight_bound,
    variance_matched_clique_bound,
)
from .errors import Infeasible, RobustSubError
from .graph import read_edge_list, write_edge_list
from .graphgen import extremal_graph, powerlaw_graph
from .kernels import check_assumption1, check_assumption2, kernel_from_name
from .motifs import CutoffChoice, Variant, bound_ratio, count_many, summary_stats
from .patterns import catalog, clique, parse_pattern

log = logging.getLogger("robustsub")

FLOAT_FMT = "%.9g"
BOUND_HEADER = ["pattern", "name", "regime", "n", "value", "normalized_constant"]

EPILOG = """\
CSV schemas:
  bound, scale   pattern,name,regime,n,value,normalized_constant
  sweep          pattern,name,regime,n,value,normalized_constant
  powerlaw       k,tau,quantity,n,value,exponent
  count          pattern,name,count
  stats          n,mu,mad,h_max,sigma2
  compare        pattern,observed,bound,ratio,variant,cutoff
  check-kernel   kernel,check,value

normalized_constant is value / (n**k * h_c**-k) for the exact bound and
value / normalization for the asymptotic forms.
"""


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return FLOAT_FMT % x
    return str(x)


class _Out:
    """Collects CSV rows and writes them to stdout/a file, plus optional .dat."""

    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *row):
        self.rows.append([_fmt(x) for x in row])

    def emit(self, args):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        text = buf.getvalue()
        if getattr(args, "output", None) and args.command != "gen":
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        if getattr(args, "dat", None):
            lines = ["# " + " ".join(self.header)]
            lines += [" ".join(r) for r in self.rows]
            Path(args.dat).write_text("\n".join(lines) + "\n")


# -- argument parsing -------------------------------------------------------

def _n_grid(text: str):
    try:
        start, stop, points = text.split(":")
        return float(start), float(stop), int(points)
    except ValueError:
        raise argparse.ArgumentTypeError("expected start:stop:points, e.g. 1e3:1e9:13") from None


def _int_like(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _kv_list(text: str) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().lower()] = float(v)
    return out


def _add_params(p, *, graph_scale=True):
    g = p.add_argument_group("distribution parameters")
    g.add_argument("--a", type=float, help="minimum weight (default 1)")
    g.add_argument("--mu", type=float, help="mean weight")
    g.add_argument("--mad", type=float, help="mean absolute deviation d")
    g.add_argument("--sigma2", type=float, help="variance; implies d = 2 sigma2 / (h_c - a)")
    g.add_argument("--hc", type=float, help="natural cutoff h_c (default sqrt(mu n))")
    g.add_argument("--hs", type=float, help="structural cutoff h_s (default h_c)")
    g.add_argument("--tau", type=float, help="power-law exponent; excludes --mad")
    g.add_argument("--from-powerlaw", type=_kv_list, metavar="tau=..,hc=..",
                   help="derive mu and d from a truncated power law on [1, hc]")
    if graph_scale:
        g.add_argument("--n", type=_int_like, help="number of vertices")


def _add_pattern(p, default="triangle"):
    p.add_argument("--pattern", action="append",
                   help=f"pattern name, literal 'k=4;edges=0-1,1-2,2-3' or 'size:index' "
                        f"(repeatable; default {default})")
    p.add_argument("--pattern-size", type=int, choices=(3, 4, 5),
                   help="use every connected pattern of this size")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file supplying defaults for any flag")
    common.add_argument("--output", help="write CSV here instead of stdout")
    common.add_argument("--dat", help="also write a whitespace-separated .dat file")
    common.add_argument("--kernel", default=None, help="chung-lu (default), poisson, generalized")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="robustsub",
        description="Worst-case expected subgraph counts in hidden-variable random graphs.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, epilog=EPILOG,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    p = add("bound", "exact tight bound for given mean, MAD and cutoffs")
    _add_params(p)
    _add_pattern(p)

    p = add("scale", "large-n asymptotic bound (MAD or variance form)")
    _add_params(p)
    _add_pattern(p)
    p.add_argument("--variant", choices=("mad", "variance"), default="mad")

    p = add("powerlaw", "clique counts in power-law graphs and matching bounds")
    p.add_argument("--tau", type=float)
    p.add_argument("--n", type=_int_like)
    p.add_argument("--pattern-size", type=int, default=None, help="clique size k (default 3)")
    p.add_argument("--hmin", type=float, default=None, help="minimum weight (default 1)")

    p = add("gen", "sample an extremal or power-law hidden-variable graph")
    _add_params(p)
    p.add_argument("--seed", type=int)

    p = add("count", "count non-induced pattern copies in an edge list")
    p.add_argument("--input")
    _add_pattern(p)

    p = add("stats", "degree statistics of an edge list")
    p.add_argument("--input")

    p = add("compare", "ratio of observed counts to the bound")
    p.add_argument("--input")
    _add_pattern(p, default="every size-4 pattern")
    p.add_argument("--cutoff", choices=("sqrt-mu-n", "h-max"), default=None)
    p.add_argument("--variant", choices=("mad", "variance"), default=None)
    p.add_argument("--mu", type=float, help="override the empirical mean degree")
    p.add_argument("--mad", type=float, help="override the empirical MAD")
    p.add_argument("--sigma2", type=float, help="override the empirical variance")

    p = add("check-kernel", "check the structural assumptions on a kernel")

    p = add("sweep", "evaluate bounds over a logarithmic n-grid")
    _add_params(p, graph_scale=False)
    _add_pattern(p)
    p.add_argument("--n-grid", type=_n_grid, default=None, metavar="START:STOP:POINTS")
    return parser


_CONFIG_ALIASES = {"h_c": "hc", "h_s": "hs", "d": "mad", "pattern_size": "pattern_size",
                   "n_grid": "n_grid", "h_min": "hmin"}


def _apply_config(args, parser):
    if not getattr(args, "config", None):
        return
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    for lineno, line in enumerate(Path(args.config).read_text().splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise UsageError(f"{args.config}:{lineno}: expected key=value")
        key, value = (t.strip() for t in s.split("=", 1))
        key = key.lstrip("-").replace("-", "_").lower()
        key = _CONFIG_ALIASES.get(key, key)
        if key not in actions:
            raise UsageError(f"{args.config}:{lineno}: unknown key {key!r}")
        current = getattr(args, key, None)
        if current is not None and current != []:
            continue  # command-line flags win
        act = actions[key]
        conv = act.type or str
        try:
            parsed = conv(value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{args.config}:{lineno}: {exc}") from None
        if act.choices is not None and parsed not in act.choices:
            raise UsageError(f"{args.config}:{lineno}: {key} must be one of {list(act.choices)}")
        setattr(args, key, [parsed] if isinstance(act, argparse._AppendAction) else parsed)


# -- helpers ----------------------------------------------------------------

def _kernel(args):
    return kernel_from_name(args.kernel or "chung-lu")


def _patterns(args, default="triangle"):
    if getattr(args, "pattern_size", None):
        if args.pattern:
            raise UsageError("--pattern and --pattern-size are mutually exclusive")
        return catalog(args.pattern_size)
    names = args.pattern or ([default] if default else [])
    return [parse_pattern(x) for x in names]


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


def _params(args, n=None) -> AmbiguityParams:
    """Build ambiguity parameters from flags (explicit, variance or power law)."""
    n = args.n if n is None else n
    if args.tau is not None and args.mad is not None:
        raise UsageError("--tau and --mad are mutually exclusive")
    if args.mad is not None and args.sigma2 is not None:
        raise UsageError("--mad and --sigma2 are mutually exclusive")
    if args.from_powerlaw is not None or args.tau is not None:
        if n is None:
            raise UsageError("missing required option(s): --n")
        spec = dict(args.from_powerlaw or {})
        tau = spec.get("tau", args.tau)
        if tau is None:
            raise UsageError("--from-powerlaw needs tau=...")
        h_min = spec.get("hmin", spec.get("h_min", args.a if args.a is not None else 1.0))
        hc = spec.get("hc", spec.get("h_c", args.hc))
        pl, params = powerlaw_ambiguity(tau, n, h_min, hc)
        if args.hs is not None:
            params = AmbiguityParams(params.a, params.mu, params.d, n, params.h_c, args.hs)
        return params
    _require(args, "mu")
    if n is None:
        raise UsageError("missing required option(s): --n")
    a = 1.0 if args.a is None else args.a
    h_c = args.hc if args.hc is not None else math.sqrt(args.mu * n)
    if args.sigma2 is not None:
        d = mad_for_variance(args.sigma2, a, h_c)
    elif args.mad is not None:
        d = args.mad
    else:
        raise UsageError("one of --mad, --sigma2, --tau or --from-powerlaw is required")
    return AmbiguityParams(a, args.mu, d, n, h_c, args.hs)


def _tight_row(out, pattern, params, kernel):
    res = tight_bound(pattern, params, kernel)
    norm = float(params.n) ** pattern.k * params.h_c ** (-pattern.k)
    out.add(pattern.literal(), pattern.label, res.regime.value, params.n, res.value, res.value / norm)
    for note in res.notes:
        log.warning("%s: %s", pattern.label, note)


# -- subcommands ------------------------------------------------------------

def cmd_bound(args):
    params = _params(args)
    kernel = _kernel(args)
    out = _Out(BOUND_HEADER)
    for p in _patterns(args):
        _tight_row(out, p, params, kernel)
    return out


def cmd_scale(args):
    kernel = _kernel(args)
    out = _Out(BOUND_HEADER)
    variant = args.variant or "mad"
    if variant == "mad":
        params = _params(args)
        for p in _patterns(args):
            res = scaling_mad(p, params, kernel)
            out.add(p.literal(), p.label, res.regime.value, params.n, res.value, res.constant)
        return out
    _require(args, "mu", "sigma2", "n")
    a = 1.0 if args.a is None else args.a
    h_c = args.hc if args.hc is not None else math.sqrt(args.mu * args.n)
    for p in _patterns(args):
        res = scaling_variance(p, args.mu, args.sigma2, h_c, args.n, kernel, a)
        out.add(p.literal(), p.label, res.regime.value, args.n, res.value, res.constant)
    return out


def _powerlaw_rows(out, k, tau, n, h_min):
    kernel_free = clique(k)
    if 2.0 < tau < 3.0:
        for label, fn in (("powerlaw", powerlaw_clique_count),
                          ("variance-matched", variance_matched_clique_bound)):
            res = fn(k, tau, n, h_min=h_min)
            out.add(k, tau, label, n, res.value, res.exponent)
    elif 1.0 < tau < 2.0:
        res = powerlaw_clique_scaling_dense(k, tau, n)
        out.add(k, tau, "powerlaw-order", n, res.value, res.exponent)
    res = powerlaw_mad_bound(kernel_free, tau, n, h_min)
    out.add(k, tau, "mad-tight", n, res.value, "")


def cmd_powerlaw(args):
    _require(args, "tau", "n")
    k = args.pattern_size or 3
    out = _Out(["k", "tau", "quantity", "n", "value", "exponent"])
    _powerlaw_rows(out, k, args.tau, args.n, args.hmin or 1.0)
    return out


def cmd_gen(args):
    _require(args, "output", "n")
    seed = 0 if args.seed is None else args.seed
    kernel = _kernel(args)
    if args.tau is not None:
        if args.mad is not None:
            raise UsageError("--tau and --mad are mutually exclusive")
        h_min = 1.0 if args.a is None else args.a
        pl, params = powerlaw_ambiguity(args.tau, args.n, h_min, args.hc)
        h_s = args.hs if args.hs is not None else params.h_c
        g, w = powerlaw_graph(powerlaw_params(args.tau, params.h_c, h_min), args.n, kernel, seed, h_s)
        model = {"model": "power-law", "tau": args.tau, "h_min": h_min,
                 "h_c": params.h_c, "h_s": h_s, "mu": pl.mu, "d": pl.d, "sigma2": pl.sigma2}
    else:
        params = _params(args)
        dist = three_point(params)
        g, w = extremal_graph(params, kernel, seed)
        model = {"model": "three-point", "a": params.a, "mu": params.mu, "d": params.d,
                 "h_c": params.h_c, "h_s": params.h_s, "probs": list(dist.probs)}
    meta = {"n": g.n, "edges": g.edge_count, "seed": seed, "kernel": kernel.name,
            "clamped": g.meta.get("clamped", False), "params": model}
    header = " ".join(f"{k}={v}" for k, v in meta.items() if k != "params")
    write_edge_list(g, args.output, header=header)
    Path(str(args.output) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    out = _Out(["n", "edges", "seed", "output"])
    out.add(g.n, g.edge_count, seed, str(args.output))
    return out


def _load(args):
    _require(args, "input")
    g, _ = read_edge_list(args.input)
    return g


def cmd_count(args):
    g = _load(args)
    pats = _patterns(args)
    out = _Out(["pattern", "name", "count"])
    for p, c in zip(pats, count_many(g, pats)):
        out.add(p.literal(), p.label, c)
    return out


def cmd_stats(args):
    st = summary_stats(_load(args))
    out = _Out(["n", "mu", "mad", "h_max", "sigma2"])
    out.add(st.n, st.mu, st.mad, st.h_max, st.sigma2)
    return out


def cmd_compare(args):
    g = _load(args)
    pats = _patterns(args, default=None) or catalog(4)
    rep = bound_ratio(
        g, pats,
        cutoff_choice=CutoffChoice(args.cutoff or "sqrt-mu-n"),
        variant=Variant(args.variant or "mad"),
        mu=args.mu, d=args.mad, sigma2=args.sigma2,
    )
    out = _Out(["pattern", "observed", "bound", "ratio", "variant", "cutoff"])
    for r in rep.rows:
        out.add(r.pattern, r.observed, r.bound, r.ratio, rep.variant.value, rep.cutoff_choice.value)
    return out


def cmd_check_kernel(args):
    kernel = _kernel(args)
    a1 = check_assumption1(kernel)
    a2 = check_assumption2(kernel)
    out = _Out(["kernel", "check", "value"])
    for key, val in (
        ("assumption1.nonnegative", a1.nonnegative),
        ("assumption1.nondecreasing", a1.nondecreasing),
        ("assumption1.convex", a1.convex),
        ("assumption1.worst_violation", a1.worst_violation),
        ("assumption2.r0_is_one", a2.r0_is_one),
        ("assumption2.r_nonincreasing", a2.r_nonincreasing),
        ("assumption2.worst_violation", a2.worst_violation),
        ("r1", kernel.r1),
    ):
        out.add(kernel.name, key, val)
    return out


def cmd_sweep(args):
    start, stop, points = args.n_grid or (1e3, 1e9, 13)
    ns = log_grid(start, stop, points)
    kernel = _kernel(args)
    if args.tau is not None and args.mu is None and args.from_powerlaw is None:
        k = args.pattern_size or 3
        out = _Out(["k", "tau", "quantity", "n", "value", "exponent"])
        for n in ns:
            _powerlaw_rows(out, k, args.tau, n, 1.0 if args.a is None else args.a)
        return out
    out = _Out(BOUND_HEADER)
    pats = _patterns(args)
    for p in pats:
        values = []
        for n in ns:
            params = _params(args, n=n)
            _tight_row(out, p, params, kernel)
            values.append(float(out.rows[-1][4]))
        if all(v > 0 for v in values):
            log.info("%s: log-log slope %.4f", p.label, loglog_slope(ns, values))
    return out


COMMANDS = {
    "bound": cmd_bound,
    "scale": cmd_scale,
    "powerlaw": cmd_powerlaw,
    "gen": cmd_gen,
    "count": cmd_count,
    "stats": cmd_stats,
    "compare": cmd_compare,
    "check-kernel": cmd_check_kernel,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        _apply_config(args, parser)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            out = COMMANDS[args.command](args)
        out.emit(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"robustsub: error: {exc}", file=sys.stderr)
        return 2
    except Infeasible as exc:
        print(f"robustsub: infeasible: {exc}", file=sys.stderr)
        if exc.max_mad is not None:
            print(f"max feasible MAD: {FLOAT_FMT % exc.max_mad}", file=sys.stderr)
        return 1
    except (RobustSubError, ValueError, OSError) as exc:
        print(f"robustsub: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
