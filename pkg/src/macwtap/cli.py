"""Batch command-line front end.

Subcommands: ``region`` (hull computation), ``sim`` (one protocol run),
``verify`` (lemma and bound checks), ``sweep`` (grid of protocol runs), and
``replay`` (re-run a manifest).  Every run writes a ``manifest.json`` that
reproduces it bit-exactly: all randomness derives from ``--seed`` via the
documented stream derivation, reductions are order-fixed, and outputs carry
no timestamps, so a replay with any ``--jobs`` value is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, _core
from .binning_sim import ProtocolParams, ProtocolRun, run_protocol
from .channels import (
    AuxInput,
    MacWiretapSpec,
    Model,
    bundled_spec,
    load_channel_spec,
    spec_from_jsonable,
    spec_to_jsonable,
)
from .errors import MacwtapError, ValidationError
from .lemma_lab import (
    BoundedVars,
    chernoff_variant_check,
    entropy_given_wiretap,
    lemma1_check,
    lemma2_check,
)
from .limits import Caps
from .rate_regions import HULL_CSV_COLUMNS, hull_csv_rows, hull_to_jsonable, optimize_hull

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# deterministic writers


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_csv(path: Path, meta: list[str], columns: tuple[str, ...], rows: list[tuple]) -> None:
    lines = [f"# {m}" for m in ["schema_version: 1", *meta]]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv_rows(path: Path) -> list[list[str]]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        rows.append(line.split(","))
    return rows[1:]


# ---------------------------------------------------------------------------
# run configuration and manifests


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict

    def manifest(self) -> dict:
        caps = _caps(self.options)
        return {
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "kernel_backend": _core.BACKEND,
            "command": self.command,
            "caps": {
                "max_strategies": caps.max_strategies,
                "max_atoms": caps.max_atoms,
                "max_seq_per_source": caps.max_seq_per_source,
            },
            "options": self.options,
        }


def _load_spec(options: dict) -> MacWiretapSpec:
    if options.get("spec_inline") is not None:
        return spec_from_jsonable(options["spec_inline"])
    if options.get("bundled"):
        return bundled_spec(options["bundled"])
    if options.get("spec"):
        return load_channel_spec(options["spec"])
    raise ValidationError("no channel spec given (use --spec or --bundled)")


def _resolve_aux(name: str, spec: MacWiretapSpec) -> AuxInput:
    if name == "identity":
        return AuxInput.identity(spec)
    if name == "uniform":
        return AuxInput.uniform_outputs(spec)
    path = Path(name)
    if path.exists():
        return AuxInput.from_jsonable(json.loads(path.read_text(encoding="utf-8")))
    raise ValidationError(f"unknown aux {name!r} (use identity, uniform, or a JSON path)")


def _caps(options: dict) -> Caps:
    base = Caps.from_env()
    if options.get("max_atoms"):
        base = Caps(base.max_strategies, int(options["max_atoms"]), base.max_seq_per_source)
    return base


# ---------------------------------------------------------------------------
# commands


def cmd_region(config: RunConfig, out: Path) -> None:
    opts = config.options
    spec = _load_spec(opts)
    if opts.get("model"):
        spec = spec.with_model(Model(opts["model"]))
    alphas = opts["alphas"]
    if not alphas:
        raise ValidationError("at least one --alpha value is required")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"alpha={a} outside [0, 1]")
    budget = int(opts["budget"])
    seed = int(opts["seed"])
    jobs = int(opts.get("jobs", 1))
    rows, hulls = [], []
    for a in alphas:
        spec_a = spec.with_alpha(a)
        hull = optimize_hull(spec_a, budget, seed, jobs=jobs)
        rows.extend(hull_csv_rows(hull, spec_a))
        hulls.append(hull_to_jsonable(hull, spec_a))
    write_csv(
        out / "region.csv",
        [
            "columns: alpha,model,R1,R2,aux_id",
            "alpha: tapped fraction of channel uses",
            "model: wiretapper attack model",
            "R1,R2: hull vertex of the achievable rate region, bits/use",
            "aux_id: auxiliary-input index achieving the vertex (-1 = origin)",
        ],
        HULL_CSV_COLUMNS,
        rows,
    )
    write_json(out / "region.json", {"schema_version": SCHEMA_VERSION, "hulls": hulls})


def _protocol_from_options(opts: dict) -> ProtocolParams:
    spec = _load_spec(opts)
    if opts.get("model"):
        spec = spec.with_model(Model(opts["model"]))
    n = int(opts["n"])
    if opts.get("mu") is not None:
        mu = int(opts["mu"])
        if not 0 <= mu <= n:
            raise ValidationError(f"mu={mu} outside 0..{n}")
        spec = spec.with_alpha(mu / n)
    elif opts.get("alpha") is not None:
        spec = spec.with_alpha(float(opts["alpha"]))
    aux = _resolve_aux(opts.get("aux", "identity"), spec)
    rates = tuple(float(r) for r in opts["rates"])
    if len(rates) != 4:
        raise ValidationError("rates must be four values: key1 key2 public1 public2")
    return ProtocolParams(n=n, rates=rates, seed=int(opts["seed"]), aux=aux, spec=spec)


def _sim_outputs(run: ProtocolRun, out: Path) -> None:
    write_json(out / "run.json", {"schema_version": SCHEMA_VERSION, **run.to_jsonable()})
    rows = [
        (
            json.dumps(s.to_jsonable()["positions"]).replace(",", ";"),
            "" if s.decisions is None else json.dumps(list(s.decisions)).replace(",", ";"),
            kl,
            mi,
        )
        for s, kl, mi in run.leakage.table
    ]
    write_csv(
        out / "leakage.csv",
        [
            "columns: positions,decisions,kl_bits,mutual_info_bits",
            "positions: tapped positions (1-based)",
            "decisions: model1 per-tap user choices",
            "kl_bits: divergence of (keys, public bins, observation) from "
            "uniform x uniform x observation marginal",
            "mutual_info_bits: information the observation carries about the keys",
        ],
        ("positions", "decisions", "kl_bits", "mutual_info_bits"),
        rows,
    )


def cmd_sim(config: RunConfig, out: Path) -> None:
    opts = config.options
    params = _protocol_from_options(opts)
    run = run_protocol(
        params, int(opts["trials"]), caps=_caps(opts), jobs=int(opts.get("jobs", 1))
    )
    _sim_outputs(run, out)


def cmd_sweep(config: RunConfig, out: Path) -> None:
    opts = config.options
    alphas = opts["alphas"] or [None]
    ns = opts["ns"]
    rate_sets = opts["rate_sets"]
    if not ns or not rate_sets:
        raise ValidationError("sweep needs at least one --n and one --rates quadruple")
    summary = []
    point = 0
    for a in alphas:
        for n in ns:
            for rates in rate_sets:
                sub_opts = dict(opts)
                sub_opts.update({"alpha": a, "n": n, "rates": rates})
                for key in ("alphas", "ns", "rate_sets"):
                    sub_opts.pop(key, None)
                sub = RunConfig("sim", sub_opts)
                sub_out = out / f"point_{point:03d}"
                sub_out.mkdir(parents=True, exist_ok=True)
                write_json(sub_out / "manifest.json", sub.manifest())
                cmd_sim(sub, sub_out)
                run = json.loads((sub_out / "run.json").read_text(encoding="utf-8"))
                summary.append(
                    (
                        "" if a is None else a,
                        n,
                        *rates,
                        run["error_prob"],
                        run["error_ci95"][0],
                        run["error_ci95"][1],
                        run["tv_uniform"],
                        run["max_leakage_bits"],
                        point,
                    )
                )
                point += 1
    write_csv(
        out / "summary.csv",
        [
            "columns: alpha,n,R1,R2,Rt1,Rt2,error_prob,ci_lo,ci_hi,tv_uniform,max_leakage_bits,point",
            "error_prob: Monte-Carlo joint decoding error with 95% CI",
            "tv_uniform: exact distance of the bins from joint uniformity",
            "max_leakage_bits: worst-strategy exact divergence",
        ],
        ("alpha", "n", "R1", "R2", "Rt1", "Rt2", "error_prob", "ci_lo", "ci_hi",
         "tv_uniform", "max_leakage_bits", "point"),
        summary,
    )


def cmd_verify(config: RunConfig, out: Path) -> None:
    opts = config.options
    check = opts["check"]
    if check == "chernoff":
        dist = BoundedVars(
            kind=opts.get("kind", "bernoulli"),
            bound=float(opts["bound"]),
            means=tuple(float(m) for m in opts["means"]),
        )
        rep = chernoff_variant_check(
            dist, float(opts["eps"]), int(opts["trials"]), seed=int(opts["seed"])
        )
        report = {
            "check": check,
            "trials": rep.trials,
            "tail_freq": rep.tail_freq,
            "bound": rep.bound,
            "threshold": rep.threshold,
            "satisfied": rep.satisfied,
        }
    else:
        params = _protocol_from_options(opts)
        if check == "lemma1":
            slack = float(opts.get("gamma_slack", 0.1))
            from .info_measures import entropy

            g1 = (1.0 - slack) * params.n * entropy(params.aux.p_u1)
            g2 = (1.0 - slack) * params.n * entropy(params.aux.p_u2)
            rep1 = lemma1_check(params, g1, g2, int(opts["draws"]), caps=_caps(opts))
            report = {
                "check": check,
                "draws": rep1.draws,
                "mean_tv": rep1.mean_tv,
                "std_err": rep1.std_err,
                "rhs": rep1.rhs,
                "miss_probs": list(rep1.miss_probs),
                "gammas": list(rep1.gammas),
                "satisfied": rep1.satisfied,
                "vacuous": rep1.vacuous,
            }
        elif check == "lemma2":
            rep2 = lemma2_check(
                params,
                delta=float(opts.get("delta", 0.1)),
                epsilon=float(opts.get("epsilon", 0.3)),
                draws=int(opts["draws"]),
                gamma_slack=float(opts.get("gamma_slack", 0.1)),
                per_user=bool(opts.get("per_user", False)),
                caps=_caps(opts),
                jobs=int(opts.get("jobs", 1)),
            )
            report = {
                "check": check,
                "draws": rep2.draws,
                "violation_freq": rep2.violation_freq,
                "rhs": rep2.rhs,
                "eps_tilde": rep2.eps_tilde,
                "threshold": rep2.threshold,
                "gammas": list(rep2.gammas),
                "min_dset_prob": rep2.min_dset_prob,
                "precondition_ok": rep2.precondition_ok,
                "vacuous": rep2.vacuous,
                "satisfied": rep2.satisfied,
                "max_divergence_seen": rep2.max_divergence_seen,
            }
        elif check == "entropies":
            ent = entropy_given_wiretap(
                params.aux, params.spec, params.n, params.mu, "worst", caps=_caps(opts)
            )
            report = {
                "check": check,
                "targets": {
                    name: {"closed_form": pair.closed, "enumerated": pair.brute}
                    for name, pair in (
                        ("h1", ent.h1),
                        ("h2", ent.h2),
                        ("h1_given2", ent.h1_given2),
                        ("h2_given1", ent.h2_given1),
                    )
                },
                "max_gap": ent.max_gap(),
                "satisfied": ent.max_gap() <= 1e-9,
            }
        else:
            raise ValidationError(f"unknown check {check!r}")
    write_json(out / "report.json", {"schema_version": SCHEMA_VERSION, **report})


def cmd_replay(manifest_path: Path, out: Path, jobs: int | None) -> None:
    doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    options = dict(doc["options"])
    if jobs is not None:
        options["jobs"] = jobs
    config = RunConfig(doc["command"], options)
    _dispatch(config, out, original_manifest=doc)


_COMMANDS = {"region": cmd_region, "sim": cmd_sim, "sweep": cmd_sweep, "verify": cmd_verify}


def _dispatch(config: RunConfig, out: Path, original_manifest: dict | None = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    manifest = config.manifest()
    if original_manifest is not None:
        # replays keep the original option block (jobs excepted) for provenance
        manifest["options"] = {**original_manifest["options"], "jobs": config.options.get("jobs", 1)}
    write_json(out / "manifest.json", manifest)
    _COMMANDS[config.command](config, out)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macwtap", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--spec", help="channel spec JSON path")
        sp.add_argument("--bundled", help="bundled channel spec name")
        sp.add_argument("--model", choices=[m.value for m in Model], help="override the model from the channel file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--max-atoms", type=int, dest="max_atoms", help="override the exact-table cap")

    sp = sub.add_parser("region", help="achievable-region hulls")
    add_common(sp)
    sp.add_argument("--alpha", type=float, nargs="*", default=[], help="tapped fractions")
    sp.add_argument("--budget", type=int, default=1000, help="auxiliary evaluations per alpha")

    sp = sub.add_parser("sim", help="single protocol run")
    add_common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mu", type=int, help="tapped positions (overrides the channel file alpha)")
    sp.add_argument("--alpha", type=float, help="tapped fraction (alternative to --mu)")
    sp.add_argument("--rates", type=float, nargs=4, default=[0.25, 0.25, 0.25, 0.25],
                    metavar=("R1", "R2", "RT1", "RT2"))
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--aux", default="identity")

    sp = sub.add_parser("sweep", help="cross product of protocol runs")
    add_common(sp)
    sp.add_argument("--alpha", type=float, nargs="*", default=[])
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--rates", type=float, nargs=4, action="append", required=True,
                    metavar=("R1", "R2", "RT1", "RT2"))
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--aux", default="identity")

    sp = sub.add_parser("verify", help="lemma and bound checks")
    add_common(sp)
    sp.add_argument("check", choices=["lemma1", "lemma2", "chernoff", "entropies"])
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--mu", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--rates", type=float, nargs=4, default=[0.3, 0.3, 0.3, 0.3])
    sp.add_argument("--aux", default="identity")
    sp.add_argument("--draws", type=int, default=1000)
    sp.add_argument("--gamma-slack", type=float, default=0.1, dest="gamma_slack")
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--epsilon", type=float, default=0.3)
    sp.add_argument("--per-user", action="store_true", dest="per_user")
    sp.add_argument("--kind", default="bernoulli", choices=["bernoulli", "constant", "uniform"])
    sp.add_argument("--bound", type=float, default=0.02)
    sp.add_argument("--means", type=float, nargs="+", default=[0.01] * 50)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--trials", type=int, default=100000)

    sp = sub.add_parser("replay", help="re-run a manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", required=True)
    sp.add_argument("--jobs", type=int, default=None)
    return p


def _options_from_args(args: argparse.Namespace) -> tuple[RunConfig, Path]:
    command = args.command
    opts = {k: v for k, v in vars(args).items() if k != "command"}
    out = opts.pop("out")
    if command == "region":
        opts["alphas"] = opts.pop("alpha")
    elif command == "sweep":
        opts["alphas"] = opts.pop("alpha")
        opts["ns"] = opts.pop("n")
        opts["rate_sets"] = opts.pop("rates")
    return RunConfig(command, opts), Path(out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            cmd_replay(Path(args.manifest), Path(args.out), args.jobs)
            return 0
        config, out = _options_from_args(args)
        _dispatch(config, out)
        return 0
    except (MacwtapError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
