"""Command-line front end: ``smra-rd {spectrum,rd-curve,simulate,layout,reproduce-fig2}``.

Configuration is one JSON document::

    {
      "n": 1000,
      "network": {"family": "nearest_neighbor"}            # or
      "network": {"source_id": "k",
                  "predecessors": [{"id": "1",
                                    "model": {"kind": "first_order_markov",
                                              "sigma2": 1, "gamma": 0.5},
                                    "marginal": {"kind": "memoryless", "sigma2": 1},
                                    "baseline": {"kind": "memoryless", "sigma2": 1}}]},
      "rd_curve": {"policy": "classical", "delta": null,
                   "grid": {"kind": "theta", "values": [1, 0.5, 0.25]},
                   "baseline": true},
      "simulate": {"delta": 1.0, "samples": 100000, "seed": 42,
                   "predecessors": ["1"], "shards": 1},
      "layout": {"theta": 0.5},
      "output": {"path": "curve.csv"}
    }

Data goes to stdout (or ``--out``); diagnostics go to stderr.
Exit codes: 0 ok, 2 config error, 3 numerical error, 4 layout/theorem
mismatch, 5 Monte Carlo statistical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from .channel_sim import MAX_DIM, build_estimator, simulate
from .covariance import (
    NearestNeighbor,
    Predecessor,
    SourceNetwork,
    build_covariance,
    model_from_dict,
    paper_example_network,
)
from .errors import ConfigError, InvalidParameter, SMRAError
from .layout import build_layout, verify_against_theorem
from .spectrum import density_range, szego_average, tridiagonal_closed_form
from .theorem import default_theta_grid, network_spectra, normalize_policy, sweep_curve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CONSISTENCY = 4
EXIT_STATISTICAL = 5

DEFAULT_N = 1000


def fmt(x) -> str:
    """Fixed float formatting: 17 significant digits, 'inf' for infinities."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


# -- configuration ---------------------------------------------------------

def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _section(cfg: dict, key: str) -> dict:
    sec = cfg.get(key, {}) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {key!r} must be an object")
    return sec


def network_from_config(cfg: dict, n: Optional[int] = None) -> SourceNetwork:
    n = int(n if n is not None else cfg.get("n", DEFAULT_N))
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    net_cfg = cfg.get("network")
    if net_cfg is None:
        raise ConfigError("config has no 'network' section")
    try:
        if "family" in net_cfg:
            return paper_example_network(net_cfg["family"], n)
        preds = []
        for k, p in enumerate(net_cfg["predecessors"], start=1):
            preds.append(
                Predecessor(
                    str(p.get("id", k)),
                    model_from_dict(p["model"]),
                    model_from_dict(p["marginal"]) if p.get("marginal") else None,
                    model_from_dict(p["baseline"]) if p.get("baseline") else None,
                )
            )
        return SourceNetwork(str(net_cfg.get("source_id", "k")), tuple(preds), n)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed network section: {exc!r}") from None
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from None


def grid_from_config(grid_cfg, spectra) -> tuple:
    if not grid_cfg:
        return default_theta_grid(spectra), "theta"
    kind = grid_cfg.get("kind", "theta")
    if "values" in grid_cfg:
        values = np.asarray(grid_cfg["values"], dtype=float)
    elif "logspace" in grid_cfg:
        lo, hi, count = grid_cfg["logspace"]
        values = np.geomspace(float(hi), float(lo), int(count))
    else:
        raise ConfigError("grid needs 'values' or 'logspace'")
    return values, kind


# -- subcommands -----------------------------------------------------------

def cmd_spectrum(net: SourceNetwork) -> str:
    """CSV with one row per (predecessor, component)."""
    out = io.StringIO()
    out.write("# eigenvalues of the conditional covariance of each predecessor (variance units)\n")
    out.write(f"# n = {net.n}\n")
    out.write("# closed_form: tridiagonal closed form (nearest-neighbour models only)\n")
    out.write("# density_min/density_max: spectral density range bounding every eigenvalue\n")
    out.write("# szego_mean: (1/pi) int f(w) dw, the n -> inf average eigenvalue\n")
    out.write("predecessor,i,eigenvalue,closed_form,density_min,density_max,szego_mean\n")
    specs = network_spectra(net)
    for p in net.predecessors:
        lam = specs[p.id].eigenvalues
        model = p.conditional
        closed = (tridiagonal_closed_form(model.sigma2, net.n).eigenvalues
                  if isinstance(model, NearestNeighbor) else None)
        lo, hi = density_range(model)
        mean = szego_average(model, float)
        for i, v in enumerate(lam, start=1):
            cf = fmt(closed[i - 1]) if closed is not None else ""
            out.write(f"{p.id},{i},{fmt(v)},{cf},{fmt(lo)},{fmt(hi)},{fmt(mean)}\n")
    return out.getvalue()


def _curve_columns(ids, suffix=""):
    return [f"D_{j}{suffix}" for j in ids] + [f"R_{j}{suffix}" for j in ids] + [f"S{suffix}"]


def _curve_values(tup, ids):
    return ([tup.distortions[j] for j in ids] + [tup.transmission_rates[j] for j in ids]
            + [tup.storage_rate])


def cmd_rd_curve(net: SourceNetwork, policy="classical", grid=None, grid_kind="theta",
                 delta=None, baseline=False) -> str:
    """CSV with one row per grid point; optional baseline columns use the same levels."""
    policy = normalize_policy(policy)
    curve = sweep_curve(net, policy, grid, grid_kind, delta)
    ids = net.ids
    base = None
    if baseline:
        if not net.has_baseline():
            raise ConfigError("baseline columns requested but some predecessor has no baseline model")
        bnet = net.baseline_network()
        base = sweep_curve(bnet, policy, curve.thetas(), "theta", delta)
    out = io.StringIO()
    out.write(f"# model: {net.source_id}\n")
    out.write(f"# policy: {policy}; grid: {curve.grid_kind}; n = {net.n}\n")
    out.write("# theta, delta, D_*: variance units; R_*, S: bits/source symbol\n")
    if base is not None:
        out.write("# *_memoryless: baseline models evaluated at the same theta\n")
    cols = ["theta", "delta"] + _curve_columns(ids)
    if base is not None:
        cols += _curve_columns(ids, "_memoryless")
    cols += ["n", "model"]
    out.write(",".join(cols) + "\n")
    for k, tup in enumerate(curve.points):
        vals = [tup.point.theta, tup.point.delta] + _curve_values(tup, ids)
        if base is not None:
            vals += _curve_values(base.points[k], ids)
        out.write(",".join(fmt(v) for v in vals) + f",{net.n},{net.source_id}\n")
    return out.getvalue()


def cmd_simulate(net: SourceNetwork, delta=1.0, samples=100_000, seed=0, predecessors=None,
                 shards=1) -> tuple:
    """Return ``(json_text, all_passed)``."""
    if net.n > MAX_DIM:
        raise ConfigError(f"simulation is limited to n <= {MAX_DIM}")
    ids = list(predecessors) if predecessors else net.ids
    records = []
    for j in ids:
        try:
            pred = net[j]
        except KeyError:
            raise ConfigError(f"unknown predecessor {j!r}") from None
        marginal = build_covariance(pred.marginal_model(), net.n)
        chan = build_estimator(net.covariance(j), float(delta), marginal)
        res = simulate(chan, int(samples), int(seed), int(shards))
        rec = res.to_dict()
        rec.update(predecessor=j, delta=float(delta), n=net.n, z_score=res.z_score)
        records.append(rec)
    ok = all(r["passed"] for r in records)
    doc = {"model": net.source_id, "results": records, "status": "pass" if ok else "fail"}
    return dump_json(doc), ok


def cmd_layout(net: SourceNetwork, theta: float) -> tuple:
    """Return ``(json_text, report_passed)``."""
    layout = build_layout(net, theta)
    report = verify_against_theorem(layout, net, theta)
    doc = layout.to_dict()
    doc["verification"] = report.to_dict()
    doc["model"] = net.source_id
    return dump_json(doc), report.passed


def cmd_reproduce_fig2(family: str, n: int = DEFAULT_N, policy="classical", delta=None) -> str:
    """Rate/distortion curves for one example family plus memoryless baselines."""
    fam = {"nn": "nearest_neighbor", "markov": "first_order_markov"}[family]
    net = paper_example_network(fam, n)
    return cmd_rd_curve(net, policy, None, "theta", delta, baseline=True)


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment configuration")
    common.add_argument("--n", type=int, help="block length (default 1000)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--policy", choices=["classical", "theta-eq-delta", "fixed-delta"],
                        help="how delta is tied to theta along a sweep")
    common.add_argument("--delta", type=float, help="test-channel noise variance")
    common.add_argument("--out", metavar="PATH", help="write data here instead of stdout")

    parser = argparse.ArgumentParser(prog="smra-rd", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalue table")
    sub.add_parser("rd-curve", parents=[common], help="rate/distortion sweep")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo test-channel check")
    sub.add_parser("layout", parents=[common], help="incremental layout and verification")
    fig = sub.add_parser("reproduce-fig2", parents=[common], help="example-family curves")
    fig.add_argument("family", choices=["nn", "markov"])
    return parser


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _run(args) -> int:
    cfg = load_config(args.config)
    out_path = args.out or _section(cfg, "output").get("path")
    if args.seed is not None and not (0 <= args.seed < 2**64):
        raise ConfigError("--seed must be an unsigned 64-bit integer")

    if args.command == "reproduce-fig2":
        n = args.n if args.n is not None else int(cfg.get("n", DEFAULT_N))
        policy = args.policy or "classical"
        _emit(cmd_reproduce_fig2(args.family, n, policy, args.delta), out_path)
        return EXIT_OK

    net = network_from_config(cfg, args.n)

    if args.command == "spectrum":
        _emit(cmd_spectrum(net), out_path)
        return EXIT_OK

    if args.command == "rd-curve":
        sec = _section(cfg, "rd_curve")
        policy = args.policy or sec.get("policy", "classical")
        delta = args.delta if args.delta is not None else sec.get("delta")
        specs = network_spectra(net)
        grid, kind = grid_from_config(sec.get("grid"), list(specs.values()))
        _emit(cmd_rd_curve(net, policy, grid, kind, delta, bool(sec.get("baseline", False))), out_path)
        return EXIT_OK

    if args.command == "simulate":
        sec = _section(cfg, "simulate")
        text, ok = cmd_simulate(
            net,
            delta=args.delta if args.delta is not None else sec.get("delta", 1.0),
            samples=args.samples if args.samples is not None else sec.get("samples", 100_000),
            seed=args.seed if args.seed is not None else sec.get("seed", 0),
            predecessors=sec.get("predecessors"),
            shards=sec.get("shards", 1),
        )
        _emit(text, out_path)
        if not ok:
            print("smra-rd: Monte Carlo estimate outside 3 standard errors", file=sys.stderr)
            return EXIT_STATISTICAL
        return EXIT_OK

    if args.command == "layout":
        sec = _section(cfg, "layout")
        if "theta" not in sec:
            raise ConfigError("layout section needs 'theta'")
        text, ok = cmd_layout(net, float(sec["theta"]))
        _emit(text, out_path)
        if not ok:
            print("smra-rd: layout does not match the closed-form rates", file=sys.stderr)
            return EXIT_CONSISTENCY
        return EXIT_OK

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ConfigError, InvalidParameter) as exc:
        print(f"smra-rd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SMRAError as exc:
        print(f"smra-rd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"smra-rd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"smra-rd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
