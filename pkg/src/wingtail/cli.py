"""Command-line entry point: parameter ingestion from JSON configs, CSV/JSON
emission for density and smile curves, constants reports, Monte Carlo sampling,
and the validation harness.

Exit codes: 0 = success / all criteria pass, 1 = domain or configuration
error, 2 = acceptance criterion failure. Every domain violation is reported as
a structured message naming the violated condition; the CLI never tracebacks
on bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import acceptance, heston, kou, mixed, nig, oracles, smile
from .errors import DegenerateRegimeError, RegimeGuardError, WingtailError
from .heston import HestonParams
from .kou import KouJumpParams
from .mellin import AT_INFINITY, TailAsymptote
from .mixed import MixedModel, WING_LARGE, WING_SMALL
from .nig import NIGParams
from .numerics import RngStream, Tolerance
from .oracles import ORACLE_WINDOW

__all__ = ["ModelConfig", "load_config", "main"]

MODEL_KINDS = ("heston", "heston+kou", "heston+nig")

DENSITY_HEADER = ["x", "asymptote", "oracle_fourier", "ratio", "error_bound"]
SMILE_HEADER = ["K", "L", "iv_expansion", "iv_from_asymptotic_price", "residual", "residual_times_L"]


@dataclass(frozen=True)
class ModelConfig:
    """Validated run configuration: model kind, parameters, seed, tolerances."""

    kind: str
    model: MixedModel
    seed: int
    tol: Tolerance


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise WingtailError(f"config error: missing '{key}' in {where}")
    return mapping[key]


def load_config(path: str, seed_override: int | None = None, tol_override: float | None = None) -> ModelConfig:
    """Load and validate a JSON config; all component invariants re-checked."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise WingtailError(f"config error: cannot read {path}: {exc}") from exc
    kind = _require(raw, "model", "config")
    if kind not in MODEL_KINDS:
        raise WingtailError(f"config error: model must be one of {MODEL_KINDS}, got {kind!r}")
    t = float(_require(raw, "t", "config"))
    h = _require(raw, "heston", "config")
    jumps = None
    if kind == "heston+kou":
        k = _require(raw, "kou", "config")
        jumps = KouJumpParams(
            lam=float(_require(k, "lam", "kou")),
            eta1=float(_require(k, "eta1", "kou")),
            eta2=float(_require(k, "eta2", "kou")),
            p=float(_require(k, "p", "kou")),
            q=float(_require(k, "q", "kou")),
            t=t,
        )
    elif kind == "heston+nig":
        n = _require(raw, "nig", "config")
        jumps = NIGParams(
            alpha=float(_require(n, "alpha", "nig")),
            delta=float(_require(n, "delta", "nig")),
            t=t,
        )
    mu = _require(h, "mu", "heston")
    if mu == "risk_neutral":
        if kind == "heston+kou":
            mu = kou.risk_neutral_drift(jumps)
        elif kind == "heston+nig":
            mu = nig.nig_no_arb_drift(jumps)
        else:
            mu = 0.0
    hp = HestonParams(
        mu=float(mu),
        a=float(_require(h, "a", "heston")),
        b=float(_require(h, "b", "heston")),
        c=float(_require(h, "c", "heston")),
        rho=float(_require(h, "rho", "heston")),
        x0=float(_require(h, "x0", "heston")),
        y0=float(_require(h, "y0", "heston")),
        t=t,
    )
    model = MixedModel(heston=hp, jumps=jumps)
    seed = int(raw.get("seed", 12345)) if seed_override is None else int(seed_override)
    tdict = raw.get("tolerances", {})
    tol = Tolerance(
        rel=float(tdict.get("rel", 1e-10)) if tol_override is None else float(tol_override),
        abs=float(tdict.get("abs", 1e-13)),
        max_iter=int(tdict.get("max_iter", 400)),
    )
    return ModelConfig(kind=kind, model=model, seed=seed, tol=tol)


def parse_grid(spec: str) -> np.ndarray:
    """Parse 'a:b:n' (linear) or 'a:b:nlog' (log-spaced) grid specs."""
    text = spec.strip().replace("(log)", "log")
    log_spaced = text.endswith("log")
    if log_spaced:
        text = text[:-3]
    parts = text.split(":")
    if len(parts) != 3:
        raise WingtailError(f"config error: grid spec must be 'a:b:n[log]', got {spec!r}")
    a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1 or not a < b:
        raise WingtailError(f"config error: bad grid bounds {spec!r}")
    if log_spaced:
        if a <= 0:
            raise WingtailError("config error: log grids need a > 0")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def _regime_field(model: MixedModel, wing: str) -> dict:
    try:
        regime = mixed.classify_wing(model, wing)
        return {"dominant": regime.dominant, "margin": regime.margin}
    except DegenerateRegimeError as exc:
        return {"dominant": "degenerate", "reason": str(exc)}


def _record_field(record) -> dict:
    return {"r1": record.r1, "r2": record.r2, "r3": record.r3, "r4": record.r4,
            "side": record.side, "error_order": record.error_order, "note": record.note}


def cmd_constants(config: ModelConfig) -> dict:
    """Critical moments, wing constants, per-wing regimes, leading coefficients."""
    model = config.model
    cm = heston.critical_moments(model.heston)
    report = {
        "model": config.kind,
        "critical_moments": asdict(cm),
        "tail_constants": asdict(model.derived),
        "regimes": {
            "large_wing": _regime_field(model, WING_LARGE),
            "small_wing": _regime_field(model, WING_SMALL),
        },
    }
    for wing, builder in (("large", mixed.mixed_tail_asymptote), ("small", mixed.mixed_zero_asymptote)):
        try:
            report[f"{wing}_wing_asymptote"] = _record_field(builder(model))
        except (DegenerateRegimeError, WingtailError) as exc:
            report[f"{wing}_wing_asymptote"] = {"error": str(exc)}
    if isinstance(model.jumps, KouJumpParams):
        table = kou.coefficients(model.jumps, 19, config.tol)
        ks = np.arange(20)
        report["coefficients"] = [
            {
                "k": int(k),
                "a": float(table.a[k]),
                "a_hat": float(table.a_hat[k]),
                "a_rel_gap_scaled": float((table.a[k] - table.a_hat[k]) * (k + 1) / table.a_hat[k]),
                "b": float(table.b[k]),
                "b_hat": float(table.b_hat[k]),
                "b_rel_gap_scaled": float((table.b[k] - table.b_hat[k]) * (k + 1) / table.b_hat[k]),
            }
            for k in ks
        ]
    return report


def cmd_density(config: ModelConfig, grid: np.ndarray) -> list[list[str]]:
    """Density curve rows: asymptote, Fourier oracle (within reach), ratio, bound."""
    model = config.model
    rows = [DENSITY_HEADER]
    records = {}
    for x in grid:
        ell = math.log(x / model.x0)
        wing = WING_LARGE if ell >= 0 else WING_SMALL
        if wing not in records:
            try:
                records[wing] = (mixed.mixed_tail_asymptote(model) if wing == WING_LARGE
                                 else mixed.mixed_zero_asymptote(model))
            except (DegenerateRegimeError, WingtailError):
                records[wing] = None
        record = records[wing]
        asym = ""
        bound = ""
        if record is not None and (math.log(x) > 0) == (wing == WING_LARGE) and abs(math.log(x)) > 0.0:
            try:
                asym = record.value(float(x))
                bound = record.error_bound_scale(float(x))
            except WingtailError:
                asym = ""
        oracle = ""
        if abs(math.log(x)) <= ORACLE_WINDOW:
            oracle = oracles.density_fourier(model, float(x), config.tol)
        ratio = ""
        if asym != "" and oracle != "":
            ratio = oracle / asym
        rows.append([repr(float(x)), _fmt(asym), _fmt(oracle), _fmt(ratio), _fmt(bound)])
    return rows


def cmd_smile(config: ModelConfig, grid: np.ndarray, guard: float = 4.0) -> list[list[str]]:
    """Smile curve rows: expansion vs inversion of the asymptotic price."""
    model = config.model
    rows = [SMILE_HEADER]
    expansions = {}
    tails = {}
    for K in grid:
        ell = math.log(K / model.x0)
        wing = WING_LARGE if ell >= 0 else WING_SMALL
        L = abs(ell)
        if wing not in expansions:
            try:
                expansions[wing] = smile.smile_expansion(model, wing)
                if wing == WING_LARGE:
                    tails[wing] = mixed.mixed_tail_asymptote(model)
                else:
                    # small wing prices through the reflected density x^-3 D(1/x)
                    z = mixed.mixed_zero_asymptote(model)
                    tails[wing] = TailAsymptote(r1=z.r1, r2=z.r2, r3=z.r3 + 3.0, r4=z.r4,
                                                side=AT_INFINITY, error_order=z.error_order)
            except WingtailError:
                expansions[wing] = None
        iv_exp = iv_inv = resid = resid_l = ""
        if expansions[wing] is not None and L >= guard:
            try:
                iv_exp = smile.implied_vol_approx(expansions[wing], float(K), guard)
                k_eff = model.x0 * math.exp(L)
                lp = smile.call_asymptote_log(tails[wing], k_eff, model.x0, model.t, guard)
                iv_inv = smile.bs_implied_vol_from_log(lp, model.x0, k_eff, model.t)
                resid = abs(iv_exp - iv_inv)
                resid_l = resid * L
            except (RegimeGuardError, WingtailError):
                iv_exp = iv_inv = resid = resid_l = ""
        rows.append([repr(float(K)), repr(L), _fmt(iv_exp), _fmt(iv_inv), _fmt(resid), _fmt(resid_l)])
    return rows


def cmd_sample(config: ModelConfig, n_paths: int, steps: int) -> dict:
    """Simulate terminal prices; summary statistics and martingale diagnostic."""
    stream = RngStream(config.seed)
    sample = oracles.simulate_paths(config.model, n_paths, steps, stream)
    res = oracles.summarize(sample, config.seed)
    qs = np.quantile(sample, [0.01, 0.25, 0.5, 0.75, 0.99])
    return {
        "estimate": res.estimate,
        "std_error": res.std_error,
        "n_paths": res.n_paths,
        "seed": res.seed,
        "x0": config.model.x0,
        "martingale_z": (res.estimate - config.model.x0) / res.std_error,
        "quantiles": {"1%": qs[0], "25%": qs[1], "50%": qs[2], "75%": qs[3], "99%": qs[4]},
    }


def cmd_validate(config: ModelConfig, echo=print) -> int:
    """Run the acceptance suite; returns the exit code."""
    results = acceptance.run_all(seed=config.seed, tol=config.tol, echo=echo)
    return 0 if all(r.passed for r in results) else 2


def _fmt(value) -> str:
    return "" if value == "" else repr(float(value))


def _emit_json(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(rows: list[list[str]], out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    else:
        csv.writer(sys.stdout).writerows(rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wingtail",
        description="Tail and implied-volatility wing asymptotics for mixed stochastic models, "
                    "validated against quadrature, Fourier and Monte Carlo oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("constants", "critical moments, wing constants, regimes, coefficients (JSON)"),
        ("density", "density asymptote vs Fourier oracle on a grid (CSV)"),
        ("smile", "implied-vol expansion vs asymptotic-price inversion on a strike grid (CSV)"),
        ("validate", "run the acceptance suite; exit 0 only if every criterion passes"),
        ("sample", "Monte Carlo terminal-price sample summary (JSON)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON model config")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
        if name in ("density", "smile"):
            p.add_argument("--grid", required=True, help="grid spec a:b:n or a:b:nlog")
        if name == "sample":
            p.add_argument("--paths", type=int, default=100_000)
            p.add_argument("--steps", type=int, default=200)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed_override=args.seed, tol_override=args.tol)
        if args.command == "constants":
            _emit_json(cmd_constants(config), args.out)
        elif args.command == "density":
            _emit_csv(cmd_density(config, parse_grid(args.grid)), args.out)
        elif args.command == "smile":
            _emit_csv(cmd_smile(config, parse_grid(args.grid)), args.out)
        elif args.command == "sample":
            _emit_json(cmd_sample(config, args.paths, args.steps), args.out)
        elif args.command == "validate":
            return cmd_validate(config)
    except WingtailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
