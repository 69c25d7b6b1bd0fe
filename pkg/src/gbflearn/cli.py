"""Command-line front end.

Subcommands: generate | graph | spectrum | classify | experiment | diagnose.
Exit codes: 0 success, 2 usage or configuration, 3 data, 4 numerical.
Timestamps appear only inside JSON metadata fields, so result files are
byte-identical across reruns with the same config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import analysis, config as config_mod, datasets, rls, spectral
from .errors import GbfError, InvalidParameter, IoError
from .graphs import LaplacianKind, load_graph, save_graph


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except GbfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbf",
        description="Graph basis-function kernels, feature-augmented updates, "
        "and regularized least-squares classification on graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic point-cloud CSV")
    p.add_argument("dataset", choices=["two-moon", "slashed-o"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-part", type=int, default=300)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("graph", help="build a graph from a config's dataset and recipe")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser("spectrum", help="eigenvalues of a graph file's Laplacian")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--out", help="write eigenvalues (.json or .csv)")
    p.add_argument("--vectors", help="write the eigenvector matrix (binary)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("classify", help="run the augmented classifier end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="predictions CSV (default from config)")
    p.add_argument("--diagnostics", help="diagnostics JSON path")
    p.add_argument("--seed", type=int, help="override label-sampling seed")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("experiment", help="mean-accuracy table over random trials")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="table CSV (default from config)")
    p.add_argument("--json", dest="trials_json", help="per-trial JSON log")
    p.add_argument("--trials", type=int, help="override trial count")
    p.add_argument("--seed", type=int, help="override experiment seed")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("diagnose", help="power function, lambda_min, bound check")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="diagnostics JSON (default from config)")
    p.add_argument("--csv", dest="diag_csv", help="also write per-node CSV")
    p.add_argument("--seed", type=int, help="override label-sampling seed")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(handler=cmd_diagnose)

    return parser


def cmd_generate(args) -> int:
    if args.dataset == "two-moon":
        cloud = datasets.gen_two_moon(args.seed, args.n_per_part, args.noise)
        shapes = None
    else:
        cloud, shapes = datasets.gen_slashed_o(args.seed, args.n_per_part, args.noise)
    datasets.save_cloud_csv(cloud, args.out)
    if shapes is not None:
        config_mod.save_shapes(shapes, args.out + ".shapes.json")
    return 0


def cmd_graph(args) -> int:
    cfg = config_mod.load_config(args.config)
    cloud, _ = config_mod.config_cloud(cfg)
    graph = config_mod.config_graph(cfg, cloud)
    save_graph(graph, args.out)
    return 0


def cmd_spectrum(args) -> int:
    graph = load_graph(args.graph)
    spec = spectral.eigendecompose(graph)
    if not args.quiet:
        for value in spec.eigenvalues:
            print(repr(float(value)))
        if graph.kind is LaplacianKind.NORMALIZED:
            in_range = bool(
                spec.eigenvalues[0] >= -1e-10 and spec.eigenvalues[-1] <= 2 + 1e-10
            )
            print(f"# normalized spectrum within [0, 2]: {in_range}")
    if args.out:
        spectral.write_eigenvalues(spec, args.out)
    if args.vectors:
        spectral.write_vectors_binary(spec, args.vectors)
    return 0


def _labeled_from_config(cfg, pipeline, seed_override=None):
    labels_cfg = cfg.get("labels")
    if labels_cfg is None:
        raise InvalidParameter("config has no labels section")
    if "nodes" in labels_cfg:
        return rls.labeled_set(labels_cfg["nodes"], labels_cfg["values"])
    seed = seed_override if seed_override is not None else labels_cfg.get("seed", 0)
    if pipeline.truth is None:
        raise InvalidParameter("label sampling needs ground truth")
    rng = np.random.default_rng([int(seed), int(labels_cfg["count"])])
    nodes = datasets.sample_labeled_nodes(
        rng,
        pipeline.truth,
        int(labels_cfg["count"]),
        stratified=bool(labels_cfg.get("stratified", True)),
    )
    return rls.labeled_set(nodes, pipeline.truth[np.asarray(nodes) - 1])


def _augmented_columns(pipeline, nodes):
    cols = pipeline.kernel.columns(nodes)
    for spec in pipeline.features:
        cols = cols * spec.update_matrix(centers=nodes)
    return cols


def cmd_classify(args) -> int:
    cfg = config_mod.load_config(args.config)
    pipeline = config_mod.config_pipeline(cfg)
    data = _labeled_from_config(cfg, pipeline, args.seed)
    cols = _augmented_columns(pipeline, data.nodes)
    coeff = datasets.fit_columns(cols, data.nodes, data, pipeline.gamma)
    scores = cols @ coeff
    labels = rls.classify(scores)

    out = args.out or cfg.get("output", {}).get("predictions_csv")
    if not out:
        raise InvalidParameter("no output path: pass --out or set output.predictions_csv")
    _write_predictions(out, scores, labels)
    if not args.quiet:
        counts = {int(v): int(np.sum(labels == v)) for v in (-1, 1)}
        print(f"classified {len(labels)} nodes: {counts[1]} positive, "
              f"{counts[-1]} negative -> {out}")

    diag_path = args.diagnostics or cfg.get("output", {}).get("diagnostics_json")
    if diag_path:
        psi = _binary_prior(pipeline)
        report = analysis.diagnostics_report(
            pipeline.kernel, psi, data, pipeline.gamma
        )
        payload = report.to_json()
        payload["bound_check"] = _bound_check(pipeline, psi, data)
        with open(diag_path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def _binary_prior(pipeline):
    for spec in pipeline.features:
        if spec.kind == "binary":
            return spec
    return None


def _bound_check(pipeline, psi, data) -> dict:
    # The closed-form bound applies to a single binary alpha = -1 update
    # with ground truth available as the target signal.
    applicable = (
        psi is not None
        and psi.alpha == -1.0
        and len(pipeline.features) == 1
        and pipeline.truth is not None
    )
    if not applicable:
        return {"checked": False}
    report = analysis.error_bound(
        pipeline.kernel,
        psi,
        data.nodes,
        pipeline.gamma,
        pipeline.truth.astype(float),
        spectrum=pipeline.spectrum,
        gbf=pipeline.gbf,
    )
    return {
        "checked": True,
        "holds": report.holds,
        "max_error": float(np.max(report.lhs)),
        "max_bound": float(np.max(report.rhs)),
        "lambda_min": report.lambda_min,
    }


def _write_predictions(path, scores, labels) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "score", "label"])
            for k in range(len(scores)):
                writer.writerow([k + 1, repr(float(scores[k])), int(labels[k])])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def cmd_experiment(args) -> int:
    cfg = config_mod.load_config(args.config)
    pipeline = config_mod.config_pipeline(cfg)
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 10))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    report_cfg = cfg.get("report", {})
    started = time.time()
    result = datasets.run_experiment(
        pipeline,
        cfg.get("label_counts", [2, 4, 8, 16, 32, 64]),
        trials,
        seed,
        feature_prefixes=bool(report_cfg.get("feature_prefixes", False)),
        report_spectral=report_cfg.get("spectral"),
        stratified=bool(cfg.get("stratified", True)),
    )
    elapsed = time.time() - started

    if not args.quiet:
        for row in result.table_rows():
            print("  ".join(f"{cell:>16}" for cell in row))
    out = args.out or cfg.get("output", {}).get("table_csv")
    if out:
        _write_table(out, result)
    trials_json = args.trials_json or cfg.get("output", {}).get("trials_json")
    if trials_json:
        _write_trials(trials_json, result, cfg, seed, trials, elapsed)
    return 0


def _write_table(path, result) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in result.table_rows():
                writer.writerow(row)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def _write_trials(path, result, cfg, seed, trials, elapsed) -> None:
    payload = {
        "meta": {
            "name": result.name or cfg.get("name", ""),
            "seed": seed,
            "trials": trials,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "elapsed_seconds": round(elapsed, 3),
        },
        "label_counts": list(result.label_counts),
        "methods": list(result.methods),
        "spectral_accuracy": result.spectral_accuracy,
        "means": {
            method: {str(n): result.means[method][n] for n in result.label_counts}
            for method in result.methods
        },
        "trials": list(result.trials),
    }
    try:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def cmd_diagnose(args) -> int:
    cfg = config_mod.load_config(args.config)
    pipeline = config_mod.config_pipeline(cfg)
    data = _labeled_from_config(cfg, pipeline, args.seed)
    psi = _binary_prior(pipeline)
    report = analysis.diagnostics_report(pipeline.kernel, psi, data, pipeline.gamma)
    payload = report.to_json()
    payload["bound_check"] = _bound_check(pipeline, psi, data)

    out = args.out or cfg.get("output", {}).get("diagnostics_json")
    if not out:
        raise InvalidParameter("no output path: pass --out or set output.diagnostics_json")
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    if args.diag_csv:
        report.write_csv(args.diag_csv)
    if not args.quiet:
        print(f"lambda_min = {report.lambda_min:.6e}; "
              f"max power = {float(np.max(report.power)):.6e} -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
