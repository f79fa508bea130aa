"""Command-line entry point.

Subcommands: reconstruct, diversity, permanova, coverage-budget, metrics,
agreement, faithfulness, align, theory-check, report.  Inputs are validated
before anything is written, so a validation failure (exit 2) leaves no partial
reports; degenerate analysis data exits 3.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .budget import greedy_budget_sweep, random_budget_sweep
from .config import RunConfig, build_config
from .diversity import (
    aggregate_proxies,
    per_input_proxies,
    source_pair_matrices,
)
from .evalmetrics import (
    cohen_kappa,
    fleiss_kappa,
    grouped_classification,
    judgments_to_cohen_pairs,
    judgments_to_fleiss_items,
)
from .faithfulness import (
    faithfulness_table,
    metric_preference_alignment,
    preference_summary,
)
from .labeling import message_disjoint_split, reconstruct_pairs
from .permtest import DegenerateDataError, permanova, residualize
from .records import RecordError, emit_records, group_embeddings, load_records
from .reporting import ReportKindError, ReportWriter, load_report, export_plot_data
from .theory import (
    CorrelatedNoiseSpec,
    RidgeProblem,
    check_ridge_bounds,
    check_variance_reduction,
    coverage_bound_sweep,
    ridge_variance_sweep,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3

FAITHFULNESS_METRICS = ("consistency", "groundedness", "sensitivity")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out-dir", dest="out_dir",
                        help="report directory (default: $RATIONALE_METRICS_OUTDIR or ./reports)")
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int, help="parallel workers (results are identical at any level)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rationale-metrics",
        description="Diversity, distinctness and faithfulness diagnostics for rationale datasets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("reconstruct", help="quartile votes, 75%% aggregation, message-disjoint split")
    p.add_argument("--annotations", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--balance-tol", type=float, default=0.05)
    p.add_argument("--min-votes", type=int)
    p.add_argument("--quartile-method")
    _add_common(p)

    p = sub.add_parser("diversity", help="per-input diversity proxies and source-pair matrices")
    p.add_argument("--rationales", required=True)
    p.add_argument("--backend", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--sources", help="comma-separated source subset used as the covering selection")
    p.add_argument("--normalize", action="store_true", help="L2-normalize embeddings first")
    p.add_argument("--per-input", dest="per_input", help="per-input CSV path (default: diversity_per_input.csv)")
    p.add_argument("--summary", help="summary JSON path (default: diversity_summary.json)")
    _add_common(p)

    p = sub.add_parser("permanova", help="source distinctness with block-restricted permutations")
    p.add_argument("--rationales", required=True)
    p.add_argument("--backend", required=True)
    p.add_argument("--generator", help="restrict to one generator (default: one row per generator)")
    p.add_argument("--permutations", type=int)
    _add_common(p)

    p = sub.add_parser("coverage-budget", help="matched-budget coverage sweep")
    p.add_argument("--rationales", required=True)
    p.add_argument("--backend", help="restrict to one backend (default: one row per backend)")
    p.add_argument("--budgets", help="comma-separated budgets, e.g. 1,2,3,4,5")
    p.add_argument("--draws", type=int)
    p.add_argument("--selector", choices=("random", "greedy"), default="random")
    _add_common(p)

    p = sub.add_parser("metrics", help="balanced accuracy / precision / recall / F1 per group")
    p.add_argument("--predictions", required=True)
    p.add_argument("--group-by", default="model_id,setup_id")
    _add_common(p)

    p = sub.add_parser("agreement", help="inter-rater agreement over binary judgments")
    p.add_argument("--judgments", required=True)
    p.add_argument("--method", choices=("fleiss", "cohen"), required=True)
    _add_common(p)

    p = sub.add_parser("faithfulness", help="consistency / groundedness / sensitivity score table")
    p.add_argument("--judgments", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", dest="table_out",
                   help="score table CSV, relative to the report directory "
                        "(default: faithfulness_table.csv)")
    _add_common(p)

    p = sub.add_parser("align", help="metric vs human-preference alignment")
    p.add_argument("--preferences", required=True)
    p.add_argument("--faithfulness", required=True, help="faithfulness table CSV")
    p.add_argument("--family-map", dest="family_map", help="JSON mapping model -> family")
    p.add_argument("--pref-rate", dest="pref_rate", choices=("raw", "majority"), default="raw")
    p.add_argument("--corr-permutations", dest="corr_permutations", type=int)
    _add_common(p)

    p = sub.add_parser("theory-check", help="verify the coverage, ridge and variance results numerically")
    p.add_argument("--which", choices=("coverage", "ridge", "variance", "all"), default="all")
    p.add_argument("--trials", type=int, default=20000)
    _add_common(p)

    p = sub.add_parser("report", help="export plot-data CSVs and figures from a report")
    p.add_argument("--input", required=True, help="report JSON produced by another subcommand")
    _add_common(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    for cli_name, cfg_name in (
        ("seed", "seed"), ("jobs", "jobs"), ("out_dir", "out_dir"),
        ("alpha", "alpha"), ("tau", "tau"), ("permutations", "permutations"),
        ("draws", "draws"), ("min_votes", "min_votes"),
        ("quartile_method", "quartile_method"),
        ("corr_permutations", "corr_permutations"),
    ):
        if hasattr(args, cli_name) and getattr(args, cli_name) is not None:
            overrides[cfg_name] = getattr(args, cli_name)
    if getattr(args, "budgets", None):
        overrides["budgets"] = tuple(int(b) for b in str(args.budgets).split(","))
    return build_config(overrides, config_path=getattr(args, "config", None))


def _writer(args: argparse.Namespace, cfg: RunConfig) -> ReportWriter:
    return ReportWriter(cfg.out_dir, args.subcommand, cfg.echo())


def _normalize_records(records):
    from .records import RationaleRecord

    out = []
    for rec in records:
        vec = np.asarray(rec.embedding, dtype=float)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise RecordError("cannot normalize a zero-norm embedding",
                              field="embedding")
        out.append(RationaleRecord(
            input_id=rec.input_id, source_id=rec.source_id,
            generator_id=rec.generator_id, label=rec.label,
            backend_id=rec.backend_id,
            embedding=tuple(float(v) for v in vec / norm), text=rec.text))
    return out


def _groups_for(records, backend: str, generator: str | None):
    subset = [r for r in records if r.backend_id == backend
              and (generator is None or r.generator_id == generator)]
    if not subset:
        available = sorted({r.backend_id for r in records})
        raise RecordError(f"no rationales for backend '{backend}'"
                          + (f" and generator '{generator}'" if generator else "")
                          + f"; available backends: {available}")
    return list(group_embeddings(subset).values())


def cmd_reconstruct(args, cfg: RunConfig) -> int:
    records = load_records(args.annotations, "annotations")
    pairs, profiles, stats = reconstruct_pairs(records, quartile_method=cfg.quartile_method,
                                               min_votes=cfg.min_votes)
    if not pairs:
        raise DegenerateDataError("no pairs survived vote aggregation")
    split = message_disjoint_split(pairs, test_fraction=args.test_fraction,
                                   balance_tolerance=args.balance_tol, seed=cfg.seed)
    writer = _writer(args, cfg)
    writer.out_dir.mkdir(parents=True, exist_ok=True)
    emit_records(split.train, writer.out_dir / "train_pairs.jsonl")
    emit_records(split.test, writer.out_dir / "test_pairs.jsonl")
    writer.write_json("reconstruct.json", "reconstruct", {
        "stats": {
            "scores": stats.n_scores,
            "pairs_seen": stats.n_pairs_seen,
            "pairs_labeled": stats.n_labeled,
            "discarded_no_majority": stats.n_discarded_no_majority,
            "discarded_few_votes": stats.n_discarded_few_votes,
        },
        "profiles": [{"annotator_id": p.annotator_id, "q1": p.q1, "q3": p.q3,
                      "n_scores": p.n_scores} for p in profiles],
        "split": {
            "train_pairs": len(split.train),
            "test_pairs": len(split.test),
            "train_messages": len(split.train_messages),
            "test_messages": len(split.test_messages),
            "train_positive_rate": split.train_positive_rate,
            "test_positive_rate": split.test_positive_rate,
            "balance_gap": split.balance_gap,
            "balanced": split.balanced,
            "attempts": split.attempts,
            "message_overlap": sorted(split.train_messages & split.test_messages),
        },
    })
    return EXIT_OK


def cmd_diversity(args, cfg: RunConfig) -> int:
    records = load_records(args.rationales, "rationales")
    if args.normalize:
        records = _normalize_records(records)
    selected_sources = args.sources.split(",") if args.sources else None
    generators = sorted({r.generator_id for r in records if r.backend_id == args.backend})
    if not generators:
        raise RecordError(f"no rationales for backend '{args.backend}'; "
                          f"available backends: {sorted({r.backend_id for r in records})}")

    per_gen = {}
    rows_csv = []
    for gen in generators:
        groups = _groups_for(records, args.backend, gen)
        rows = [per_input_proxies(g, cfg.alpha, cfg.tau, selected_sources) for g in groups]
        matrices = source_pair_matrices(groups, cfg.tau)
        per_gen[gen] = {
            "aggregates": aggregate_proxies(rows),
            "inputs": len(rows),
            "degenerate_inputs": sum(r.degenerate for r in rows),
            "source_pair": {
                "sources": list(matrices.sources),
                "c": matrices.c.tolist(),
                "d": matrices.d.tolist(),
                "n": matrices.n.tolist(),
                "missing_pairs": int(matrices.missing[np.triu_indices(len(matrices.sources), 1)].sum()),
            },
        }
        for row in rows:
            rows_csv.append((gen, row.input_id, row.backend_id, row.m, row.r_avg, row.r_max,
                             row.erank, row.logdet, row.pr, row.anisotropy,
                             row.d_pair, row.sim_avg, row.near_dup_rate, int(row.degenerate)))

    writer = _writer(args, cfg)
    per_input_name = args.per_input or "diversity_per_input.csv"
    summary_name = args.summary or "diversity_summary.json"
    writer.write_csv(per_input_name,
                     ("generator", "input_id", "backend_id", "m", "r_avg", "r_max", "erank",
                      "logdet", "pr", "anisotropy", "d_pair", "sim_avg", "near_dup_rate",
                      "degenerate"),
                     rows_csv)
    writer.write_json(summary_name, "diversity", {
        "backend": args.backend,
        "normalized": bool(args.normalize),
        "selected_sources": selected_sources,
        "generators": per_gen,
    })
    return EXIT_OK


def cmd_permanova(args, cfg: RunConfig) -> int:
    records = load_records(args.rationales, "rationales")
    generators = ([args.generator] if args.generator
                  else sorted({r.generator_id for r in records if r.backend_id == args.backend}))
    rows = []
    for gen in generators:
        groups = _groups_for(records, args.backend, gen)
        blocks, excluded = residualize(groups)
        result = permanova(blocks, permutations=cfg.permutations, seed=cfg.seed, jobs=cfg.jobs)
        rows.append({
            "backend": args.backend,
            "generator": gen,
            "n": result.n,
            "k": result.k,
            "f_stat": result.f_stat if np.isfinite(result.f_stat) else None,
            "f_infinite": not np.isfinite(result.f_stat),
            "r_squared": result.r_squared,
            "p_value": result.p_value,
            "permutations": result.permutations,
            "excluded_single_member_inputs": len(excluded),
        })
    writer = _writer(args, cfg)
    writer.write_json("permanova.json", "permanova", {"rows": rows})
    writer.write_csv("permanova.csv",
                     ("backend", "generator", "N", "K", "F", "R2", "p", "permutations"),
                     [(r["backend"], r["generator"], r["n"], r["k"],
                       r["f_stat"], r["r_squared"], r["p_value"], r["permutations"])
                      for r in rows])
    return EXIT_OK


def cmd_coverage_budget(args, cfg: RunConfig) -> int:
    records = load_records(args.rationales, "rationales")
    backends = [args.backend] if args.backend else sorted({r.backend_id for r in records})
    rows = []
    for backend in backends:
        generators = sorted({r.generator_id for r in records if r.backend_id == backend})
        for gen in generators:
            groups = _groups_for(records, backend, gen)
            if args.selector == "greedy":
                sweep = greedy_budget_sweep(groups, cfg.budgets, seed=cfg.seed, jobs=cfg.jobs)
            else:
                sweep = random_budget_sweep(groups, cfg.budgets, draws=cfg.draws,
                                            seed=cfg.seed, jobs=cfg.jobs)
            rows.append({
                "backend": backend,
                "generator": gen,
                "selector": sweep.selector,
                "draws": sweep.draws,
                "cells": [{
                    "budget": c.budget,
                    "r_avg_mean": c.r_avg_mean, "r_max_mean": c.r_max_mean,
                    "r_avg_se": c.r_avg_se, "r_max_se": c.r_max_se,
                    "inputs_used": c.inputs_used, "inputs_skipped": c.inputs_skipped,
                } for c in sweep.cells],
            })
    writer = _writer(args, cfg)
    writer.write_json("coverage_budget.json", "budget_sweep", {"rows": rows})
    header = (["backend", "generator", "selector"]
              + [f"r_avg_B{b}" for b in cfg.budgets] + [f"r_max_B{b}" for b in cfg.budgets])
    csv_rows = []
    for row in rows:
        by_budget = {c["budget"]: c for c in row["cells"]}
        csv_rows.append([row["backend"], row["generator"], row["selector"]]
                        + [by_budget[b]["r_avg_mean"] for b in cfg.budgets]
                        + [by_budget[b]["r_max_mean"] for b in cfg.budgets])
    writer.write_csv("coverage_budget.csv", header, csv_rows)
    return EXIT_OK


def cmd_metrics(args, cfg: RunConfig) -> int:
    records = load_records(args.predictions, "predictions")
    group_by = [f.strip() for f in args.group_by.split(",") if f.strip()]
    valid_fields = {"model_id", "setup_id", "input_id"}
    bad = [f for f in group_by if f not in valid_fields]
    if bad:
        raise RecordError(f"cannot group by {bad}; valid fields: {sorted(valid_fields)}")
    grouped = grouped_classification(records, group_by)
    rows = []
    payload = []
    for key, m in grouped.items():
        c = m.confusion
        rows.append(list(key) + [c.total, m.balanced_accuracy, m.precision, m.recall, m.f1,
                                 c.tp, c.fp, c.tn, c.fn,
                                 "; ".join(f"{k}: {v}" for k, v in sorted(m.absent.items()))])
        payload.append({
            "group": dict(zip(group_by, key)),
            "n": c.total,
            "balanced_accuracy": m.balanced_accuracy,
            "precision": m.precision, "recall": m.recall, "f1": m.f1,
            "confusion": {"tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn},
            "absent": m.absent,
        })
    writer = _writer(args, cfg)
    writer.write_csv("metrics.csv",
                     group_by + ["n", "balanced_accuracy", "precision", "recall", "f1",
                                 "tp", "fp", "tn", "fn", "absent"], rows)
    writer.write_json("metrics.json", "metrics", {"group_by": group_by, "groups": payload})
    return EXIT_OK


def cmd_agreement(args, cfg: RunConfig) -> int:
    records = load_records(args.judgments, "judgments")
    results = {}
    if args.method == "fleiss":
        for metric, items in judgments_to_fleiss_items(records).items():
            res = fleiss_kappa(items)
            results[metric] = res
    else:
        for metric, (a, b) in judgments_to_cohen_pairs(records).items():
            results[metric] = cohen_kappa(a, b)
    writer = _writer(args, cfg)
    writer.write_json("agreement.json", "agreement", {
        "method": args.method,
        "metrics": {metric: {
            "kappa": res.kappa,
            "observed_agreement": res.observed_agreement,
            "expected_agreement": res.expected_agreement,
            "n_items": res.n_items,
            "n_raters": res.n_raters,
        } for metric, res in results.items()},
    })
    for metric, res in results.items():
        print(f"{args.method} kappa [{metric}]: {res.kappa:.4f} "
              f"(observed {res.observed_agreement:.4f}, expected {res.expected_agreement:.4f})")
    return EXIT_OK


def _variant_key(model_id: str, setup_id: str) -> str:
    return model_id if not setup_id else f"{model_id}/{setup_id}"


def cmd_faithfulness(args, cfg: RunConfig) -> int:
    judgments = load_records(args.judgments, "judgments")
    predictions = load_records(args.predictions, "predictions")
    table = faithfulness_table(judgments, predictions)
    writer = _writer(args, cfg)
    rows = []
    for model, setup in table.row_keys():
        row = [model, setup]
        for metric in FAITHFULNESS_METRICS:
            cell = table.cells.get((model, setup, metric))
            row += [cell.mean if cell else None, cell.count if cell else 0]
        rows.append(row)
    columns = ["model_id", "setup_id"]
    for metric in FAITHFULNESS_METRICS:
        columns += [metric, f"{metric}_n"]
    writer.write_csv(args.table_out or "faithfulness_table.csv", columns, rows)
    writer.write_json("faithfulness.json", "faithfulness", {
        "skipped_predictions": table.skipped_predictions,
        "cells": [{"model_id": m, "setup_id": s, "metric": metric,
                   "mean": cell.mean, "count": cell.count}
                  for (m, s, metric), cell in table.cells.items()],
    })
    return EXIT_OK


def _read_faithfulness_csv(path: str) -> dict[str, dict[str, float]]:
    p = Path(path)
    if not p.is_file():
        raise RecordError(f"faithfulness table not found: {p}")
    lines = [ln for ln in p.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    scores: dict[str, dict[str, float]] = {m: {} for m in FAITHFULNESS_METRICS}
    for row in reader:
        variant = _variant_key(row["model_id"], row.get("setup_id", ""))
        for metric in FAITHFULNESS_METRICS:
            value = row.get(metric, "")
            if value:
                scores[metric][variant] = float(value)
    return scores


def cmd_align(args, cfg: RunConfig) -> int:
    prefs = load_records(args.preferences, "preferences")
    scores = _read_faithfulness_csv(args.faithfulness)
    families = None
    if args.family_map:
        fam_path = Path(args.family_map)
        if not fam_path.is_file():
            raise RecordError(f"family map not found: {fam_path}")
        families = json.loads(fam_path.read_text(encoding="utf-8"))

    summary = preference_summary(prefs)

    def _alignment_payload(pref_subset, metric_scores):
        result = metric_preference_alignment(
            pref_subset, metric_scores, corr_permutations=cfg.corr_permutations,
            seed=cfg.seed, rate_mode=args.pref_rate)
        corr = None
        if result.correlation is not None:
            c = result.correlation
            corr = {"pearson_r": c.pearson_r, "spearman_rho": c.spearman_rho,
                    "p_value": c.p_value, "n": c.n, "permutations": c.permutations}
        return {
            "pairwise_accuracy": result.pairwise_accuracy,
            "pairs_scored": result.pairs_scored,
            "metric_ties": result.metric_ties,
            "preference_ties": result.preference_ties,
            "correlation": corr,
            "correlation_note": result.correlation_note,
            "points": [{"pair_id": p.pair_id, "model_a": p.model_a, "model_b": p.model_b,
                        "delta_metric": p.delta_metric, "preference_rate": p.preference_rate}
                       for p in result.points],
        }

    metrics_payload = {}
    dropped = {}
    for metric in FAITHFULNESS_METRICS:
        metric_scores = scores[metric]
        usable = [p for p in prefs if p.model_a in metric_scores and p.model_b in metric_scores]
        missing = sorted({m for p in prefs for m in (p.model_a, p.model_b)
                          if m not in metric_scores})
        dropped[metric] = missing
        if not usable:
            metrics_payload[metric] = None
            continue
        metrics_payload[metric] = _alignment_payload(usable, metric_scores)

    families_payload = None
    if families is not None:
        families_payload = {}
        for metric in FAITHFULNESS_METRICS:
            metric_scores = scores[metric]
            groups: dict[str, list] = {}
            for p in prefs:
                if p.model_a not in metric_scores or p.model_b not in metric_scores:
                    continue
                fam_a = families.get(p.model_a)
                fam_b = families.get(p.model_b)
                name = f"within:{fam_a}" if fam_a == fam_b and fam_a is not None else "cross"
                groups.setdefault(name, []).append(p)
            families_payload[metric] = {
                name: _alignment_payload(group, metric_scores)
                for name, group in sorted(groups.items())
            }

    writer = _writer(args, cfg)
    writer.write_json("alignment.json", "alignment", {
        "rate_mode": args.pref_rate,
        "models": list(summary.models),
        "win_rates": summary.win_rate,
        "judgment_counts": summary.judgment_counts,
        "models_without_scores": dropped,
        "metrics": metrics_payload,
        "families": families_payload,
    })
    rows = []
    for metric, payload in metrics_payload.items():
        if payload is None:
            rows.append([metric, None, 0, None, None, None, 0])
            continue
        corr = payload["correlation"] or {}
        rows.append([metric, payload["pairwise_accuracy"], payload["pairs_scored"],
                     corr.get("pearson_r"), corr.get("spearman_rho"), corr.get("p_value"),
                     len(payload["points"])])
    writer.write_csv("alignment_summary.csv",
                     ("metric", "pairwise_accuracy", "pairs_scored", "pearson_r",
                      "spearman_rho", "p_value", "n_pairs"), rows)
    return EXIT_OK


def cmd_theory_check(args, cfg: RunConfig) -> int:
    which = args.which
    trials = args.trials
    sections = {}
    if which in ("coverage", "all"):
        sections["coverage"] = coverage_bound_sweep(trials, seed=cfg.seed)
        sections["coverage"]["holds"] = sections["coverage"]["violations"] == 0
    if which in ("ridge", "all"):
        sweep = ridge_variance_sweep(min(trials, 1000), seed=cfg.seed)
        identity = RidgeProblem(design=np.eye(2), lam=1.0, sigma=1.0,
                                theta_star=np.zeros(2))
        check = check_ridge_bounds(identity, trials=max(trials, 10_000), seed=cfg.seed)
        sections["ridge"] = {
            "sweep": sweep,
            "identity_case": {
                "variance_term": check.variance_term,
                "variance_bound": check.variance_bound,
                "bias_bound": check.bias_bound,
                "mc_mse": check.mc_mse,
                "mc_se": check.mc_se,
            },
            "holds": sweep["violations"] == 0 and check.holds,
        }
    if which in ("variance", "all"):
        grid = []
        mc_trials = max(trials, 10_000)
        all_hold = True
        for m in (4, 8):
            for rho in (0.0, 0.5, 1.0):
                check = check_variance_reduction(
                    CorrelatedNoiseSpec(sigma=1.0, m=m, rho_bar=rho),
                    trials=mc_trials, seed=cfg.seed)
                grid.append({"m": m, "rho_bar": rho,
                             "analytic_var": check.analytic_var, "mc_var": check.mc_var,
                             "rel_err": check.rel_err, "tol": check.tol,
                             "holds": check.holds})
                all_hold = all_hold and check.holds
        sections["variance"] = {"trials": mc_trials, "grid": grid, "holds": all_hold}

    writer = _writer(args, cfg)
    writer.write_json("theory_check.json", "theory_check", {
        "which": which,
        "trials": trials,
        "sections": sections,
        "all_hold": all(s["holds"] for s in sections.values()),
    })
    for name, section in sections.items():
        print(f"{'PASS' if section['holds'] else 'FAIL'} {name}")
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    report = load_report(args.input)
    writer = _writer(args, cfg)
    paths = export_plot_data(report, writer)
    for path in paths:
        print(path)
    return EXIT_OK


_HANDLERS = {
    "reconstruct": cmd_reconstruct,
    "diversity": cmd_diversity,
    "permanova": cmd_permanova,
    "coverage-budget": cmd_coverage_budget,
    "metrics": cmd_metrics,
    "agreement": cmd_agreement,
    "faithfulness": cmd_faithfulness,
    "align": cmd_align,
    "theory-check": cmd_theory_check,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _HANDLERS[args.subcommand](args, cfg)
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (RecordError, ReportKindError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
