"""Command-line front end.

Subcommands:
    exact       exact return-probability series, generating function,
                spectrum, and hitting time for a small graph
    forge       build a pair of non-isomorphic trees with matching
                return-time statistics
    gap         statistical spectral-gap estimate from simulated
                return observations
    mixing-gap  statistical mixing-gap estimate (even-time observations)
    observe     summary statistics of simulated return gaps
    simulate    raw return times from a seeded walk

Options may also come from a JSON config file (--config); explicit flags
win over the config, which wins over defaults.  Output is deterministic
for a fixed seed and is written with sorted keys so runs are
byte-comparable.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import exact as ex
from . import gap as gp
from . import graphs, treefun, walk
from .errors import BatechoError, BudgetOverflow, SearchExhausted

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EXHAUSTED = 3
EXIT_BUDGET = 4

_FAMILIES = ("path", "cycle", "complete", "star", "hypercube", "gab", "leafy")


def parse_family(spec: str) -> graphs.RootedGraph:
    """Build a named graph from a spec like 'cycle:8', 'gab:2,2' or
    'leafy:3,2,cutpoint'."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    args = [a.strip() for a in rest.split(",")] if rest else []
    try:
        if name in ("path", "cycle", "complete", "star", "hypercube"):
            (size,) = args
            return graphs.build_family(name, int(size))
        if name == "gab":
            a, b = args
            return graphs.build_gab(int(a), int(b))
        if name == "leafy":
            h, d, mode = args
            return graphs.build_leafy(int(h), int(d), mode=mode)
    except (ValueError, TypeError) as exc:
        raise BatechoError(f"bad family spec {spec!r}: {exc}") from exc
    raise BatechoError(f"unknown family {name!r}; choose from {_FAMILIES}")


def load_graph(opts) -> graphs.RootedGraph:
    if opts.get("graph") and opts.get("family"):
        raise BatechoError("give either --graph or --family, not both")
    if opts.get("graph"):
        with open(opts["graph"]) as fh:
            return graphs.from_text(fh.read())
    if opts.get("family"):
        return parse_family(opts["family"])
    raise BatechoError("a graph is required: pass --graph FILE or --family SPEC")


def _flatten(prefix: str, value, into: list):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], into)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, into)
    else:
        into.append((prefix, value))


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        rows: list = []
        _flatten("", payload, rows)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in rows:
            writer.writerow([k, v])
        return buf.getvalue()
    raise BatechoError(f"unknown format {fmt!r}")


def emit(payload: dict, opts) -> None:
    text = render(payload, opts.get("format", "json"))
    out = opts.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_exact(opts) -> int:
    g = load_graph(opts)
    if g.n > ex.MAX_EXACT_N:
        raise BatechoError(f"exact engine is limited to n <= {ex.MAX_EXACT_N}")
    k_max = opts.get("k_max", 20)
    table = ex.lazy_series(g, k_max)
    fgen = ex.return_gen_fun(g)
    spec = ex.spectrum(g)
    hit = ex.hitting_from_stationary(g)
    payload = {
        "graph": g.to_json(),
        "series": table.to_json(),
        "gen_fun": fgen.to_json_dict(),
        "spectrum": spec.to_json(),
        "hitting": {
            "value": float(hit.value),
            "mean_t1": str(hit.mean_t1),
            "mean_t1_sq": str(hit.mean_t1_sq),
        },
        "mean_return_time": str(ex.mean_return_time(g)),
    }
    emit(payload, opts)
    return EXIT_OK


def cmd_forge(opts) -> int:
    k = opts.get("k", 4)
    left, right = treefun.forge_tree_pair(k)
    terms = opts.get("k_max", 12)
    series = treefun.h_from_series(left, terms)
    cert = {
        "k": k,
        "h": treefun.h_of_tree(left).to_json_dict(),
        "return_series_terms_checked": terms,
        "return_series_match":
            series == treefun.h_from_series(right, terms),
        "isomorphic": treefun.ahu_canonical(left) == treefun.ahu_canonical(right),
    }
    out_dir = opts.get("out") or "."
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for name, t in (("left", left), ("right", right)):
        path = os.path.join(out_dir, f"forged_{name}_k{k}.txt")
        with open(path, "w") as fh:
            fh.write(t.graph.to_text())
        paths[name] = path
    cert_path = os.path.join(out_dir, f"forged_certificate_k{k}.json")
    with open(cert_path, "w") as fh:
        fh.write(json.dumps(cert, sort_keys=True, indent=2) + "\n")
    payload = {"k": k, "files": paths, "certificate": cert_path,
               "n_left": left.n, "n_right": right.n}
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    return EXIT_OK


def cmd_gap(opts) -> int:
    g = load_graph(opts)
    est = gp.estimate_gap(g, c=opts.get("c", 2.0), eps=opts.get("eps", 0.25),
                          delta=opts.get("delta", 0.1), n=opts.get("n"),
                          seed=opts.get("seed", 0),
                          pk_rule=opts.get("pk_rule", "desk"))
    budget = gp.audit_budget(est)
    if not budget["within_budget"]:
        raise BudgetOverflow(
            f"{est.total_experiments} experiments exceed audit bound "
            f"{budget['total_bound']}")
    payload = {"estimate": est.to_json(), "budget": budget,
               "checks": gp.audit_error_chain(est)}
    emit(payload, opts)
    return EXIT_OK


def cmd_mixing_gap(opts) -> int:
    g = load_graph(opts)
    report = gp.estimate_mixing_gap(
        g, c=opts.get("c", 2.0), eps=opts.get("eps", 0.25),
        delta=opts.get("delta", 0.1), n=opts.get("n"),
        seed=opts.get("seed", 0), pk_rule=opts.get("pk_rule", "desk"))
    emit(report, opts)
    return EXIT_OK


def cmd_observe(opts) -> int:
    g = load_graph(opts)
    m = opts.get("m", 10000)
    lazy = bool(opts.get("lazy", False))
    gaps = walk.sample_first_returns(g, m, opts.get("seed", 0), lazy=lazy)
    mean = float(gaps.mean())
    mean_sq = float((gaps.astype(float) ** 2).mean())
    all_even = bool((gaps % 2 == 0).all())
    d_r = g.root_degree
    payload = {
        "samples": m,
        "lazy": lazy,
        "mean_gap": mean,
        "mean_gap_sq": mean_sq,
        "hitting_estimate": gp.estimate_hitting(gaps),
        "all_gaps_even": all_even,
        # E[T1] = 2|E| / deg(root); on a regular graph it equals n
        "edges_hat": int(round(d_r * mean / 2.0)),
        "n_hat_if_regular": int(round(mean)),
        "parity_verdict": "bipartite" if (not lazy and all_even) else "non-bipartite",
    }
    emit(payload, opts)
    return EXIT_OK


def cmd_simulate(opts) -> int:
    g = load_graph(opts)
    m = opts.get("m", 100)
    rt = walk.ReturnTimes.from_walk(g, opts.get("seed", 0),
                                    lazy=bool(opts.get("lazy", False)))
    times = [next(rt) for _ in range(m)]
    emit({"return_times": times, "samples": m,
          "lazy": bool(opts.get("lazy", False))}, opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing

_COMMANDS = {
    "exact": cmd_exact,
    "forge": cmd_forge,
    "gap": cmd_gap,
    "mixing-gap": cmd_mixing_gap,
    "observe": cmd_observe,
    "simulate": cmd_simulate,
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--graph", help="graph file (edge list text format)")
    p.add_argument("--family", help="named graph, e.g. cycle:8 or gab:2,2")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="batecho",
        description="spectral inference from random-walk return times")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact series / spectrum / hitting time")
    _add_common(p)
    p.add_argument("--k-max", dest="k_max", type=int)

    p = sub.add_parser("forge", help="trees with matching return statistics")
    p.add_argument("--k", type=int)
    p.add_argument("--k-max", dest="k_max", type=int,
                   help="series terms to cross-check in the certificate")
    p.add_argument("--config")
    p.add_argument("--out", help="directory for the tree and certificate files")

    p = sub.add_parser("gap", help="statistical spectral-gap estimate")
    _add_common(p)
    p.add_argument("--c", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n", help='vertex count, or "estimate"')
    p.add_argument("--pk-rule", dest="pk_rule", choices=["desk", "paper"])

    p = sub.add_parser("mixing-gap", help="statistical mixing-gap estimate")
    _add_common(p)
    p.add_argument("--c", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--n", help='vertex count, or "estimate"')
    p.add_argument("--pk-rule", dest="pk_rule", choices=["desk", "paper"])

    p = sub.add_parser("observe", help="return-gap summary statistics")
    _add_common(p)
    p.add_argument("--m", type=int, help="number of return gaps to sample")
    p.add_argument("--lazy", action="store_const", const=True)

    p = sub.add_parser("simulate", help="raw return times")
    _add_common(p)
    p.add_argument("--m", type=int, help="number of return times")
    p.add_argument("--lazy", action="store_const", const=True)

    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge config-file values under explicit flags."""
    opts = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise BatechoError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise BatechoError("config file must hold a JSON object")
        opts.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            opts[key] = value
    n = opts.get("n")
    if isinstance(n, str) and n != "estimate":
        try:
            opts["n"] = int(n)
        except ValueError:
            raise BatechoError(f'--n must be an integer or "estimate", got {n!r}')
    return opts


def main(argv=None) -> int:
    threads = os.environ.get("BATECHO_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            print(f"batecho: BATECHO_THREADS must be a positive integer, "
                  f"got {threads!r}", file=sys.stderr)
            return EXIT_CONFIG
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        return _COMMANDS[args.command](opts)
    except SearchExhausted as exc:
        print(f"batecho: search exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except BudgetOverflow as exc:
        print(f"batecho: budget overflow: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BatechoError as exc:
        print(f"batecho: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
