"""Command line entry point: ``svmgeom {gen,fit,path,cv,experiment,verify}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import classifiers as clf
from .data import (
    Dataset,
    GaussianPairConfig,
    generate_gaussian_pair,
    load_dataset_csv,
    load_generator_config,
    normalize_labels,
    save_dataset_csv,
)
from .harness import (
    NAMED_EXPERIMENTS,
    CGrid,
    ExperimentConfig,
    cross_validate,
    dump_json,
    emit_plot_data,
    intercept_experiment,
    json_line,
    tuning_path,
)
from .kkt import regime_report, separable_hard_fit, thresholds, verify_kkt_hard, verify_kkt_soft
from .verify import verify_dataset


def _emit(obj, out):
    text = dump_json(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    if args.config:
        cfg = load_generator_config(args.config)
        cfg = replace(cfg, seed=args.seed)
    else:
        cfg = GaussianPairConfig(args.n_plus, args.n_minus, args.d, args.separation, args.seed)
    data = generate_gaussian_pair(cfg)
    save_dataset_csv(data, args.out if args.out else sys.stdout)


def cmd_fit(args):
    data = normalize_labels(load_dataset_csv(args.data))
    out = {"labels_flipped": data.flipped, "model_kind": args.model}
    if args.model in ("svm", "hard"):
        if args.model == "hard":
            sol = clf.hard_margin_svm(data, args.tol)
            out["kkt"] = verify_kkt_hard(data, sol).violations
        else:
            sol = clf.soft_margin_svm(data, args.C, args.tol)
            out["kkt"] = verify_kkt_soft(data, sol, sol.C).violations
        out["solution"] = sol.to_dict()
        model = clf.with_intercept_mode(sol, data, args.intercept)
        out["report"] = regime_report(data, sol, separable_hard_fit(data)).to_dict()
    else:
        model = {"md": clf.mean_difference, "fld": clf.fld, "mdp": clf.mdp_classifier}[args.model](data)
    out["model"] = model.to_dict()
    out["intercept_mode"] = args.intercept
    _emit(out, args.out)


def _grid(args):
    return CGrid(args.c_min, args.c_max, args.count)


def cmd_path(args):
    data = normalize_labels(load_dataset_csv(args.data))
    test = load_dataset_csv(args.test) if args.test else None
    if test is not None and data.flipped:
        test = Dataset(test.points, -test.labels, True)
    grid = _grid(args).resolve(thresholds(data))
    curve = tuning_path(data, test, grid, args.folds, args.stratified, args.intercept, args.seed)
    if args.plot_dir:
        emit_plot_data(curve, args.plot_dir, include_solutions=True)
    hard = separable_hard_fit(data)
    lines = []
    for row, sol in zip(curve.rows, curve.solutions):
        rec = regime_report(data, sol, hard).to_dict() if sol is not None else {"C": row.C}
        rec.update(train_error=row.train_error, cv_error=row.cv_error, cv_std=row.cv_std,
                   test_error=row.test_error, margin_width=row.margin_width, failed=row.failed)
        lines.append(json_line(rec))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_cv(args):
    data = normalize_labels(load_dataset_csv(args.data))
    res = cross_validate(data, args.C, args.folds, args.stratified, args.intercept, args.seed)
    _emit({"C": args.C, "mean_error": res.mean_error, "fold_errors": res.fold_errors}, args.out)


def cmd_experiment(args):
    if args.config:
        cfg = ExperimentConfig.from_dict(json.loads(Path(args.config).read_text(encoding="utf-8")))
    else:
        cfg = NAMED_EXPERIMENTS[args.name]
    cfg = replace(cfg, seed=args.seed)
    if args.repetitions:
        cfg = replace(cfg, repetitions=args.repetitions)
    summary = intercept_experiment(cfg)
    if args.plot_dir:
        emit_plot_data(summary, args.plot_dir)
    _emit(summary.to_dict(), args.out)


def cmd_verify(args):
    _emit(verify_dataset(load_dataset_csv(args.data), args.tol), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svmgeom", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=True):
        if data:
            sp.add_argument("data", help="CSV dataset, label in the last column")
        sp.add_argument("--out", help="output file (default: stdout)")

    def cv_flags(sp):
        sp.add_argument("--folds", type=int, default=5)
        sp.add_argument("--stratified", action="store_true")
        sp.add_argument("--intercept", choices=clf.INTERCEPT_MODES, default="standard")
        sp.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a Gaussian pair dataset as CSV")
    common(g, data=False)
    g.add_argument("--config", help="generator JSON (n_plus, n_minus, d, separation, seed)")
    g.add_argument("--n-plus", type=int, default=20)
    g.add_argument("--n-minus", type=int, default=20)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--separation", type=float, default=4.0)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fit", help="fit one model and print it as JSON")
    common(f)
    f.add_argument("--model", choices=("svm", "hard", "md", "fld", "mdp"), default="svm")
    f.add_argument("--C", type=float, default=1.0)
    f.add_argument("--tol", type=float, default=1e-6)
    f.add_argument("--intercept", choices=clf.INTERCEPT_MODES, default="standard")
    f.set_defaults(func=cmd_fit)

    pa = sub.add_parser("path", help="tuning curve over a C grid, one JSON row per C")
    common(pa)
    cv_flags(pa)
    pa.add_argument("--test", help="CSV test set")
    pa.add_argument("--c-min", type=float)
    pa.add_argument("--c-max", type=float)
    pa.add_argument("--count", type=int, default=30)
    pa.add_argument("--plot-dir", help="also write CSV panels and a manifest here")
    pa.set_defaults(func=cmd_path)

    c = sub.add_parser("cv", help="k-fold cross-validation error at one C")
    common(c)
    cv_flags(c)
    c.add_argument("--C", type=float, required=True)
    c.set_defaults(func=cmd_cv)

    e = sub.add_parser("experiment", help="CV-tuned intercept comparison")
    common(e, data=False)
    e.add_argument("name", nargs="?", default="intercept-benchmark", choices=sorted(NAMED_EXPERIMENTS))
    e.add_argument("--config", help="ExperimentConfig JSON file")
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--repetitions", type=int)
    e.add_argument("--plot-dir")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="run the regime and piling checks on a dataset")
    common(v)
    v.add_argument("--tol", type=float, default=1e-6)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
