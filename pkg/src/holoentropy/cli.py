"""Command-line entry point: ``python -m holoentropy <command> [--key value ...]``."""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .boxdim import dim_estimate
from .covering import (EntropyProfile, dyadic_entropy_profile, exact_covering_number, greedy_cover,
                       packing_number)
from .diagonal import (DiagonalModel, asymptotic_envelope, example_K_profile,
                       sigma_partition_profile)
from .metric import BallSpec, PointCloud, grid_segment, sample_ball
from .polynomials import (HomogeneousPolynomial, assemble_oxis, corank, corollary_check,
                          monomials, parse_poly, corank_bounds)
from .taylor import (image_cloud, make_sampler, plan_from_net, summability_diagnostic,
                     taylor_coefficients, transfer_witness_table)

OUT_DIR_ENV = "HOLOENTROPY_OUT_DIR"

SCHEMAS = {
    "cover": {"cloud": "interval", "count": 1025, "dim": 1, "p": 2.0, "epsilon": 0.25,
              "exact": False},
    "entropy": {"cloud": "interval", "count": 4096, "dim": 1, "p": 2.0, "n_max": 8},
    "boxdim": {"cloud": "disc", "count": 1_000_000, "dim": 1, "p": 2.0, "n_min": 2,
               "n_max": 8, "offsets": False},
    "diagonal": {"epsilon": 0.5, "N": 8, "n_max": 6, "count": 20000},
    "sigma": {"r": 1, "N_max": 5},
    "polyrank": {"family": "random", "file": "", "Nvars": 6, "m": 2, "size": 4,
                 "trials": 5},
    "corank": {"family": "powers", "file": "", "r": 2, "m": 2, "Nvars": 3},
    "taylor": {"sampler": "power-curve", "d": 8, "radius": 1.0, "m_max": 8, "points": 4,
               "theta": 0.9},
    "transfer": {"sampler": "power-curve", "d": 8, "radius": 0.9, "net_radius": 0.05,
                 "count": 20000, "witnesses": 200, "m": [1, 2, 3, 4]},
    "summability": {"profile": "geometric", "p": 1.5, "n_max": 30, "epsilon": 0.5,
                    "r": 1, "N_max": 5},
}

REPRO = {
    "diag-k": ("diagonal", {"epsilon": 0.5, "N": 10, "n_max": 24, "count": 0}),
    "sigma-partition": ("sigma", {"r": 1, "N_max": 5}),
    "power-curve": ("taylor", {"sampler": "power-curve", "d": 8}),
    "entire-exp": ("taylor", {"sampler": "entire-exp", "d": 8}),
    "coordinate-powers": ("taylor", {"sampler": "coordinate-powers", "d": 4, "radius": 0.5}),
    "corank-sharp": ("corank", {"family": "powers", "r": 2, "m": 2, "Nvars": 3}),
    "corollary-rank": ("polyrank", {"family": "random", "Nvars": 10, "m": 2, "size": 10}),
    "interval-oracle": ("entropy", {"cloud": "interval", "count": 4096, "n_max": 8}),
    "disc-boxdim": ("boxdim", {"cloud": "disc", "count": 1_000_000, "n_min": 2, "n_max": 8}),
    "transfer-power-curve": ("transfer", {}),
}

TOP_KEYS = {"command", "id", "seed", "out", "threads", "plot_data", "params"}


class SchemaError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration

def _coerce(key: str, value, default):
    try:
        if isinstance(default, bool):
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, list):
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            return [int(v) for v in value]
        return str(value)
    except (TypeError, ValueError):
        raise SchemaError(f"invalid value for {key!r}: {value!r}") from None


def resolve_params(command: str, given: dict) -> dict:
    schema = SCHEMAS[command]
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise SchemaError(f"unknown keys for {command!r}: {', '.join(unknown)}")
    params = dict(schema)
    for k, v in given.items():
        params[k] = _coerce(k, v, schema[k])
    return params


def _parse_overrides(tokens) -> dict:
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--") or len(tok) < 3:
            raise SchemaError(f"unexpected argument {tok!r}")
        key, eq, value = tok[2:].partition("=")
        if not eq:
            try:
                value = next(it)
            except StopIteration:
                raise SchemaError(f"missing value for --{key}") from None
        out[key.replace("-", "_")] = value
    return out


def load_config(path: str) -> dict:
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise SchemaError("config must be a mapping")
    unknown = sorted(set(doc) - TOP_KEYS)
    if unknown:
        raise SchemaError(f"unknown config keys: {', '.join(unknown)}")
    params = doc.get("params") or {}
    if not isinstance(params, dict):
        raise SchemaError("params must be a mapping")
    return doc


# --------------------------------------------------------------------------
# inputs

def make_cloud(params: dict, seed: int) -> PointCloud:
    kind, count = params["cloud"], params["count"]
    if kind == "interval":
        return grid_segment(0.0, 1.0, count)
    if kind == "disc":
        return sample_ball(BallSpec(np.zeros(1), 1.0, 2.0), count, seed)
    if kind == "ball":
        return sample_ball(BallSpec(np.zeros(params["dim"]), 1.0, params["p"]), count, seed)
    raise SchemaError(f"unknown cloud {kind!r}; choose interval, disc or ball")


def make_family(params: dict, size: int, seed: int):
    n, m = params["Nvars"], params["m"]
    kind = params["family"]
    if kind == "file":
        lines = [ln for ln in Path(params["file"]).read_text().splitlines() if ln.strip()]
        return [parse_poly(ln, n, m) for ln in lines]
    if kind == "powers":
        return [HomogeneousPolynomial.monomial(tuple(m if k == i else 0 for k in range(n)))
                for i in range(size)]
    if kind == "random":
        rng = np.random.default_rng(seed)
        mons = monomials(n, m)
        fam = []
        for _ in range(size):
            c = rng.integers(-3, 4, len(mons))
            fam.append(HomogeneousPolynomial(n, m, {a: int(x) for a, x in zip(mons, c)}))
        return fam
    raise SchemaError(f"unknown family {kind!r}; choose powers, random or file")


def make_sampler_from(params: dict):
    name, d = params["sampler"], params["d"]
    radius = params["radius"]
    if name == "entire-exp":
        return make_sampler(name, terms=d, radius=radius)
    if name == "sigma-powers":
        return make_sampler(name, N_max=d, radius=radius)
    return make_sampler(name, d=d, radius=radius)


# --------------------------------------------------------------------------
# commands; each returns (header, rows, summary line)

def cmd_cover(params, seed, threads):
    cloud = make_cloud(params, seed)
    eps = params["epsilon"]
    rows = [("greedy", eps, len(greedy_cover(cloud, eps))),
            ("packing-2eps", eps, packing_number(cloud, 2 * eps))]
    if params["exact"]:
        rows.append(("exact", eps, exact_covering_number(cloud, eps)))
    summary = " ".join(f"{m}={c}" for m, _, c in rows)
    return ["method", "epsilon", "count"], rows, summary


def cmd_entropy(params, seed, threads):
    prof = dyadic_entropy_profile(make_cloud(params, seed), params["n_max"], threads)
    rows = [(e.n, e.lower, e.upper, e.method) for e in prof]
    return ["n", "lower", "upper", "method"], rows, f"entries={len(rows)}"


def cmd_boxdim(params, seed, threads):
    est = dim_estimate(make_cloud(params, seed), params["n_min"], params["n_max"],
                       params["offsets"])
    rows = [(d, c, r, s, est.slope) for (d, c), r, s in
            zip(est.scales, est.ratios, (math.nan,) + est.local_slopes)]
    return (["delta", "boxes", "ratio", "local_slope", "slope"], rows,
            f"slope={est.slope:.6g} lower_est={est.lower_est:.6g} upper_est={est.upper_est:.6g}")


def cmd_diagonal(params, seed, threads):
    eps, N, n_max = params["epsilon"], params["N"], params["n_max"]
    prof = example_K_profile(eps, N, n_max)
    env = asymptotic_envelope(eps, range(1, n_max + 1), N)
    emp = None
    if params["count"] > 0:
        cloud = DiagonalModel.geometric(eps, N).sample(params["count"], seed)
        emp = dyadic_entropy_profile(cloud, n_max, threads)
    rows = []
    for i, e in enumerate(prof):
        row = [e.n, e.lower, e.upper, float(env.lower(e.n)), float(env.upper(e.n))]
        row += [emp.lower[i], emp.upper[i]] if emp is not None else ["", ""]
        rows.append(row + [env.C1, env.C2, env.s, env.S])
    header = ["n", "lower", "upper", "envelope_lower", "envelope_upper",
              "empirical_lower", "empirical_upper", "C1", "C2", "s", "S"]
    return header, rows, f"C1={env.C1:.6g} C2={env.C2:.6g} s={env.s} S={env.S}"


def cmd_sigma(params, seed, threads):
    table = sigma_partition_profile(params["r"], params["N_max"])
    keys = sorted(table[0].partial_sums)
    rows = [[t.N, t.n, t.lower, t.upper, t.multiplicity] + [t.partial_sums[k] for k in keys]
            for t in table]
    header = ["N", "n", "lower", "upper", "multiplicity"] + [f"sum_p{k:g}" for k in keys]
    return header, rows, f"blocks={len(rows)}"


def cmd_polyrank(params, seed, threads):
    fam = make_family(params, params["size"], seed)
    res = corollary_check(fam, params["trials"], seed)
    row = [res.N, res.m, params["Nvars"], res.rank, res.bound, res.passed,
           res.monomial_count, res.chain_ok]
    header = ["N", "m", "Nvars", "rank", "bound", "passed", "monomial_count", "chain_ok"]
    return header, [row], f"rank={res.rank} bound={res.bound:.6g} {'pass' if res.passed else 'FAIL'}"


def cmd_corank(params, seed, threads):
    fam = make_family(params, params["r"], seed)
    r, m = len(fam), fam[0].degree
    system = assemble_oxis(fam)
    k = corank(system)
    b = corank_bounds(r, m)
    ok = k <= b["monomial_count"]
    row = [r, m, system.nvars, len(system.rows), len(system.cols), k, b["monomial_count"],
           ok, b["statement_binomial"], b["proof_binomial"]]
    header = ["r", "m", "Nvars", "rows", "cols", "corank", "bound", "passed",
              "statement_binomial", "proof_binomial"]
    return header, [row], f"corank={k} bound={b['monomial_count']} {'pass' if ok else 'FAIL'}"


def cmd_taylor(params, seed, threads):
    f = make_sampler_from(params)
    X = sample_ball(BallSpec(np.zeros(f.dim), params["theta"] * f.radius, f.domain_p),
                    params["points"], seed).points
    rows = []
    for m in range(params["m_max"] + 1):
        vals, _, _ = taylor_coefficients(f, m, X)
        for i, v in enumerate(vals):
            for c, z in enumerate(v):
                rows.append((i, m, c + 1, z.real, z.imag))
    return ["point", "m", "coordinate", "re", "im"], rows, f"sampler={f.name}"


def cmd_transfer(params, seed, threads):
    f = make_sampler_from(params)
    cloud = image_cloud(f, params["count"], seed)
    net = greedy_cover(cloud, params["net_radius"])
    plan = plan_from_net(net, f.deriv_bound)
    X = sample_ball(BallSpec(np.zeros(f.dim), f.radius, f.domain_p),
                    params["witnesses"], seed + 1).points
    # keep the witnesses strictly inside the open ball
    X = X * (1.0 - 1e-9)
    table = transfer_witness_table(f, plan, params["m"], X)
    rows = []
    for m, ws in table.items():
        rows.append((m, len(ws), sum(w.passed for w in ws), max(w.error for w in ws),
                     plan.guarantee, plan.C_n, plan.n, len(net), plan.target_index))
    total = sum(r[2] for r in rows)
    header = ["m", "witnesses", "passed", "max_error", "guarantee", "C_n", "n", "net_size",
              "target_index"]
    return header, rows, f"passed={total}/{sum(r[1] for r in rows)}"


def cmd_summability(params, seed, threads):
    kind = params["profile"]
    weights = None
    if kind == "geometric":
        ns = np.arange(1, params["n_max"] + 1)
        v = params["epsilon"] ** ns
        prof = EntropyProfile.from_arrays(ns, v, v, "geometric")
    elif kind == "diag-k":
        prof = example_K_profile(params["epsilon"], 64, params["n_max"])
    elif kind == "sigma":
        table = sigma_partition_profile(params["r"], params["N_max"], ())
        prof = EntropyProfile.from_arrays([t.n for t in table], [t.lower for t in table],
                                          [t.lower for t in table], "sigma")
        weights = [t.multiplicity for t in table]
    else:
        raise SchemaError(f"unknown profile {kind!r}; choose geometric, diag-k or sigma")
    rep = summability_diagnostic(prof, params["p"], weights)
    rows = [(n, s, ls, rep.ratio_tail, rep.verdict)
            for n, s, ls in zip(prof.n.tolist(), rep.partial_sums, rep.lower_partial_sums)]
    return (["n", "partial_sum", "lower_partial_sum", "ratio_tail", "verdict"], rows,
            f"verdict={rep.verdict} ratio_tail={rep.ratio_tail:.6g}")


COMMANDS = {
    "cover": cmd_cover, "entropy": cmd_entropy, "boxdim": cmd_boxdim,
    "diagonal": cmd_diagonal, "sigma": cmd_sigma, "polyrank": cmd_polyrank,
    "corank": cmd_corank, "taylor": cmd_taylor, "transfer": cmd_transfer,
    "summability": cmd_summability,
}


# --------------------------------------------------------------------------
# output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def render_csv(label: str, seed: int, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# command={label} seed={seed} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_plot_data(path: Path, header, rows):
    """One two-column file per numeric series, against the first column."""
    for j, name in enumerate(header[1:], start=1):
        pairs = []
        for row in rows:
            x, y = row[0], row[j]
            if isinstance(y, (bool, np.bool_, str)) or isinstance(x, str):
                pairs = []
                break
            pairs.append(f"{_fmt(x)} {_fmt(y)}")
        if pairs:
            path.with_suffix(f".{name}.dat").write_text("\n".join(pairs) + "\n")


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="holoentropy", allow_abbrev=False,
        description="Entropy numbers, box dimension and polynomial rank tools.",
        epilog=("commands: " + ", ".join(sorted(COMMANDS)) + ", repro\n"
                "repro ids: " + ", ".join(REPRO) + "\n"
                "per-command keys are listed in docs/formats.md"),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.usage = "%(prog)s [command [id]] [--config PATH] [--seed N] [--out PATH] [--key value ...]"
    ap.add_argument("--config", help="YAML run configuration")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output CSV path")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--plot-data", action="store_true",
                    help="also write two-column data files per series")
    return ap


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # leading bare words are the command and the repro id
    positional = []
    while argv and not argv[0].startswith("-") and len(positional) < 2:
        positional.append(argv.pop(0))
    args, rest = build_parser().parse_known_args(argv)
    args.command = positional[0] if positional else None
    args.id = positional[1] if len(positional) > 1 else None
    try:
        doc = load_config(args.config) if args.config else {}
        command = args.command or doc.get("command")
        if command is None:
            raise SchemaError("no command given")
        if command not in COMMANDS and command != "repro":
            raise SchemaError(f"unknown command {command!r}")
        given = dict(doc.get("params") or {})
        given.update(_parse_overrides(rest))
        label = command
        if command == "repro":
            rid = args.id or doc.get("id")
            if rid not in REPRO:
                raise SchemaError(f"unknown repro id {rid!r}; choose from {', '.join(REPRO)}")
            command, preset = REPRO[rid]
            given = {**preset, **given}
            label = f"repro {rid}"
        elif args.id is not None:
            raise SchemaError(f"unexpected argument {args.id!r}")
        params = resolve_params(command, given)
        seed = args.seed if args.seed is not None else _coerce("seed", doc.get("seed", 0), 0)
        threads = args.threads if args.threads is not None else doc.get("threads")
        out = args.out or doc.get("out")
    except SchemaError as exc:
        print(f"holoentropy: error: {exc}", file=sys.stderr)
        return 2
    out_path = Path(out) if out else Path(os.environ.get(OUT_DIR_ENV, ".")) / (
        label.replace(" ", "-") + ".csv")
    try:
        header, rows, summary = COMMANDS[command](params, seed, threads)
    except SchemaError as exc:
        print(f"holoentropy: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced verbatim, exit 1
        print(f"holoentropy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(render_csv(label, seed, header, rows))
    if args.plot_data or doc.get("plot_data"):
        write_plot_data(out_path, header, rows)
    print(f"{label}: {summary} -> {out_path}")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
