"""Command-line front end: moment tables, sample generation, verification campaigns.

Exit codes:
  0  success / all tiers compatible
  2  unreadable or invalid input (JSON, config, flags)
  3  exact moment exceeded the term budget (moments --mode exact)
  4  no MUB construction for the requested dimension
 10  at least one tier verdict incompatible
 11  at least one tier verdict inconclusive, none incompatible
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.random import Philox

from . import __version__
from .ensembles import EnsembleSpec, generate_expectation_samples, natural_assignment
from .haar_moments import (
    DEFAULT_TERM_BUDGET,
    TermBudgetExceededError,
    exact_moment,
    moment_bounds,
)
from .mub import MubSet, UnsupportedDimensionError, check_mub, mub_complete_set
from .spectrum import Spectrum
from .streams import stream_key, substream_id
from .verify import average_randomness, load_samples, mub_randomness, permutation_randomness

TERM_BUDGET_ENV = "HAAR_SENTINEL_TERM_BUDGET"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TERM_BUDGET = 3
EXIT_UNSUPPORTED_MUB = 4
EXIT_INCOMPATIBLE = 10
EXIT_INCONCLUSIVE = 11

_TIER_TAGS = {"observable": 1, "permutation": 2, "mub": 3}


class InputError(Exception):
    """Anything wrong with user-provided files or flags."""


@dataclass(frozen=True)
class CampaignConfig:
    spectrum: Spectrum
    ensemble: Optional[EnsembleSpec]
    tiers: tuple[str, ...]
    orders: tuple[int, ...]
    epsilon: float
    m_samples: int
    m_perm: int
    m_u: int
    seed: int
    workers: int = 1
    samples_path: Optional[str] = None

    def __post_init__(self):
        for tier in self.tiers:
            if tier not in _TIER_TAGS:
                raise InputError(f"unknown tier {tier!r}")
        if not self.orders or any(t < 1 for t in self.orders):
            raise InputError("t orders must be positive integers")
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")
        if self.m_samples < 2:
            raise InputError("budget M must be at least 2")
        if self.m_perm < 1 or self.m_u < 1:
            raise InputError("budgets M_perm and M_u must be at least 1")
        if self.ensemble is None:
            if self.samples_path is None:
                raise InputError("config needs an ensemble spec or a samples file")
            if set(self.tiers) != {"observable"}:
                raise InputError("pre-generated samples support the observable tier only")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _load_spectrum(source) -> Spectrum:
    d = _load_json(source) if isinstance(source, str) else source
    try:
        return Spectrum.from_json_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid spectrum: {exc}") from exc


def _load_ensemble(source, default_seed: Optional[int] = None) -> EnsembleSpec:
    d = _load_json(source) if isinstance(source, str) else source
    try:
        return EnsembleSpec.from_json_dict(d, default_seed=default_seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid ensemble spec: {exc}") from exc


def load_campaign(path: str, workers_override: Optional[int] = None) -> CampaignConfig:
    d = _load_json(path)
    try:
        seed = int(d["seed"])
        orders = d.get("t", 1)
        if isinstance(orders, int):
            orders = [orders]
        budgets = d.get("budgets", {})
        cfg = CampaignConfig(
            spectrum=_load_spectrum(d["spectrum"]),
            ensemble=(_load_ensemble(d["ensemble"], default_seed=seed)
                      if "ensemble" in d else None),
            tiers=tuple(d.get("tiers", ["observable"])),
            orders=tuple(int(t) for t in orders),
            epsilon=float(d["epsilon"]),
            m_samples=int(budgets.get("M", 10_000)),
            m_perm=int(budgets.get("M_perm", 1)),
            m_u=int(budgets.get("M_u", 1)),
            seed=seed,
            workers=workers_override or int(d.get("workers", 1)),
            samples_path=d.get("samples"),
        )
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid campaign config: {exc}") from exc
    return cfg


def _term_budget() -> int:
    raw = os.environ.get(TERM_BUDGET_ENV)
    if raw is None:
        return DEFAULT_TERM_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{TERM_BUDGET_ENV} must be an integer, got {raw!r}") from exc


def _parse_orders(expr: str) -> list[int]:
    expr = expr.strip()
    try:
        if ".." in expr:
            lo, hi = expr.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(tok) for tok in expr.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse order list {expr!r} (use '1..4' or '1,2,3')") from exc


def _protocol_rng(seed: int, tier: str, t: int) -> np.random.Generator:
    """Stream for protocol-level draws (permutations, basis picks)."""
    return np.random.Generator(
        Philox(key=stream_key(seed, _TIER_TAGS[tier], substream_id(t, 0x70726F74)))
    )


def run_campaign(cfg: CampaignConfig) -> list[dict]:
    budget = _term_budget()
    assignment = (natural_assignment(cfg.ensemble, cfg.spectrum)
                  if cfg.ensemble is not None else None)
    reports = []
    for t in cfg.orders:
        for tier in cfg.tiers:
            if tier == "observable":
                if cfg.samples_path is not None:
                    samples = load_samples(cfg.samples_path)
                    provenance = {"samples_file": cfg.samples_path}
                else:
                    samples = generate_expectation_samples(
                        cfg.ensemble, assignment, None, cfg.m_samples,
                        stream=(0, 0), workers=cfg.workers,
                    )
                    provenance = {"seed": cfg.ensemble.seed}
                report = average_randomness(
                    samples, cfg.spectrum, t, cfg.epsilon,
                    provenance=provenance, term_budget=budget,
                )
            elif tier == "permutation":
                report = permutation_randomness(
                    cfg.ensemble, cfg.spectrum, t, cfg.m_perm, cfg.m_samples,
                    cfg.epsilon, _protocol_rng(cfg.seed, tier, t),
                    workers=cfg.workers, term_budget=budget,
                )
            else:
                report = mub_randomness(
                    cfg.ensemble, cfg.spectrum, t, cfg.m_u, cfg.m_perm,
                    cfg.m_samples, cfg.epsilon, _protocol_rng(cfg.seed, tier, t),
                    workers=cfg.workers, term_budget=budget,
                )
            reports.append(report.to_json_dict())
    return reports


def exit_code_for(verdicts: Sequence[str]) -> int:
    if any(v == "incompatible" for v in verdicts):
        return EXIT_INCOMPATIBLE
    if any(v == "inconclusive" for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_moments(args) -> int:
    s = _load_spectrum(args.spectrum)
    orders = _parse_orders(args.t)
    budget = _term_budget()
    rows = []
    for t in orders:
        if args.mode == "exact":
            try:
                mv = exact_moment(s, t, term_budget=budget)
            except TermBudgetExceededError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_TERM_BUDGET
            rows.append({"t": t, "method": "exact", "value": mv.value})
        else:
            b = moment_bounds(s, t)
            rows.append({"t": t, "method": "bounds", "lower": b.lower,
                         "upper": b.upper, "base": b.base})
    header = f"{'t':>3}  {'method':<8}  value"
    print(header)
    for row in rows:
        if row["method"] == "exact":
            print(f"{row['t']:>3}  {'exact':<8}  {row['value']:.12g}")
        else:
            print(f"{row['t']:>3}  {'bounds':<8}  [{row['lower']:.12g}, {row['upper']:.12g}]")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"spectrum": s.to_json_dict(), "moments": rows}, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_generate(args) -> int:
    spec = _load_ensemble(args.ensemble, default_seed=args.seed)
    s = _load_spectrum(args.spectrum)
    assignment = natural_assignment(spec, s)
    values = generate_expectation_samples(spec, assignment, None, args.samples)
    with open(args.out, "w") as fh:
        fh.write("sample\n")
        for v in values:
            fh.write(f"{float(v)!r}\n")
    print(f"wrote {args.samples} samples to {args.out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = load_campaign(args.config, workers_override=args.workers)
    started = time.time()
    reports = run_campaign(cfg)
    meta = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "host": platform.node(),
        "runtime_seconds": round(time.time() - started, 3),
        "workers": cfg.workers,
        "version": __version__,
    }
    document = {"meta": meta, "reports": reports}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(document, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for r in reports:
        print(
            f"[{r['tier']:<11}] t={r['t']}  R={r['R']:+.6e}  "
            f"delta={r['delta']:.3e}  verdict={r['verdict']}"
        )
    code = exit_code_for([r["verdict"] for r in reports])
    summary = {EXIT_OK: "all tiers compatible",
               EXIT_INCOMPATIBLE: "INCOMPATIBLE with uniform randomness",
               EXIT_INCONCLUSIVE: "inconclusive"}[code]
    print(f"result: {summary}")
    return code


def _cmd_mub(args) -> int:
    if args.mub_action == "dump":
        mubs = mub_complete_set(args.dimension)
        payload = mubs.to_json_dict()
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
        else:
            json.dump(payload, sys.stdout, indent=2)
            print()
        return EXIT_OK
    mubs = MubSet.from_json_dict(_load_json(args.file))
    worst = 0.0
    for i in range(len(mubs.bases)):
        for j in range(i + 1, len(mubs.bases)):
            result = check_mub(mubs.bases[i], mubs.bases[j])
            worst = max(worst, result.max_deviation)
            if not result.unbiased:
                print(f"bases {i} and {j} are NOT unbiased (deviation {result.max_deviation:.2e})")
                return EXIT_INPUT
    print(f"{len(mubs.bases)} bases pairwise unbiased, worst deviation {worst:.2e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haar-sentinel",
        description="Verify uniform (Haar) randomness of state ensembles via observable statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="closed-form moments of a spectrum")
    p.add_argument("--spectrum", required=True, help="spectrum JSON file")
    p.add_argument("--t", default="1", help="orders: '1..4' or '1,2,3'")
    p.add_argument("--mode", choices=("exact", "bounds"), default="exact")
    p.add_argument("--out", help="also write results as JSON")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("generate", help="sample expectation values to CSV")
    p.add_argument("--ensemble", required=True, help="ensemble spec JSON file")
    p.add_argument("--spectrum", required=True, help="spectrum JSON file")
    p.add_argument("--samples", "-M", type=int, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="seed fallback when the ensemble spec has none")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("--config", required=True, help="campaign config JSON")
    p.add_argument("--out", help="write the report document to this path")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("mub", help="dump or check mutually unbiased basis sets")
    mub_sub = p.add_subparsers(dest="mub_action", required=True)
    pd = mub_sub.add_parser("dump")
    pd.add_argument("--dimension", "-N", type=int, required=True)
    pd.add_argument("--out")
    pc = mub_sub.add_parser("check")
    pc.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_mub)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedDimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED_MUB
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
