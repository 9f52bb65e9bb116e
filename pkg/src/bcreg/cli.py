"""Command-line entry point for fits, experiments, and data slicing.

Commands
--------
fit           fit one regularized model to a CSV dataset
bias-variance Monte-Carlo bias/variance of the synthetic benchmarks
stream        block-streaming comparison of correction orders (linear)
kernel-stream the same comparison with kernel models
chunks        randomly slice a CSV dataset into equal-size chunk files

CSV inputs have a header row, comma-separated decimal numbers, and the
target in the last column.  Every randomized command takes --seed
(default 0); identical arguments and seed produce byte-identical output
files.  Results go to --out as JSON (default) or CSV, or to stdout.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .errors import (
    BcregError,
    CsvFormatError,
    CsvParseError,
    InsufficientDataError,
)
from .experiments import (
    SyntheticSpec,
    monte_carlo_bias_variance,
    slice_into_chunks,
    synth_block,
    synth_nonlinear_block,
)
from .kernels import KernelSpec, fit_kernel_regularized, median_bandwidth
from .linear import Dataset, fit_regularized
from .streaming import (
    DEFAULT_LAMBDA_GRID,
    AlgorithmSpec,
    CvConfig,
    algorithm_label,
    run_block_stream,
)

__all__ = ["parse_csv_dataset", "write_csv_dataset", "build_parser", "main", "entry"]


def parse_csv_dataset(path) -> Dataset:
    """Read a header-plus-rows CSV file; last column is the target."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError(f"{path}: empty file, expected a header row")
        if len(header) < 2:
            raise CsvFormatError(
                f"{path}: need at least two columns (features plus target), got {len(header)}"
            )
        width = len(header)
        rows = []
        for i, row in enumerate(reader, start=1):
            if not row:
                continue  # tolerate blank lines
            if len(row) != width:
                raise CsvFormatError(f"{path}: row {i} has {len(row)} cells, expected {width}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                for j, cell in enumerate(row, start=1):
                    try:
                        float(cell)
                    except ValueError:
                        raise CsvParseError(
                            f"{path}: row {i}, column {j}: cannot parse {cell!r} as a number",
                            row=i,
                            column=j,
                        ) from None
    if not rows:
        raise InsufficientDataError(f"{path}: no data rows after the header")
    data = np.array(rows, dtype=float)
    return Dataset(features=data[:, :-1], targets=data[:, -1])


def write_csv_dataset(dataset: Dataset, path, header=None) -> None:
    """Write a dataset as CSV with 17 significant digits (exact round trip)."""
    p = dataset.n_features
    names = list(header) if header is not None else [f"x{i + 1}" for i in range(p)] + ["y"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(dataset.n_rows):
            row = [format(v, ".17g") for v in dataset.features[i]]
            row.append(format(dataset.targets[i], ".17g"))
            writer.writerow(row)


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {text}")
    return value


def _order_list(text: str) -> list[int]:
    try:
        orders = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse orders {text!r}")
    if not orders or any(o < 0 for o in orders):
        raise argparse.ArgumentTypeError("orders must be nonnegative integers")
    return orders


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse number list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _bandwidth_policy(text: str):
    if text == "median":
        return "median"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be 'median' or a number, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("numeric bandwidth must be positive")
    return value


def _add_output_args(sub) -> None:
    sub.add_argument("--out", help="output file path (default: stdout)")
    sub.add_argument(
        "--format", choices=["json", "csv"], default="json", help="output format"
    )


def _add_kernel_args(sub) -> None:
    sub.add_argument(
        "--kernel", choices=["gaussian", "linear", "polynomial"], default="gaussian",
        help="kernel kind",
    )
    sub.add_argument(
        "--bandwidth", type=_bandwidth_policy, default="median",
        help="Gaussian bandwidth: 'median' (pairwise-distance heuristic) or a number",
    )
    sub.add_argument("--degree", type=int, default=2, help="polynomial kernel degree")
    sub.add_argument("--offset", type=float, default=0.0, help="polynomial kernel offset")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcreg",
        description="Bias-corrected regularized regression experiments. "
        "CSV inputs need a header row; the last column is the target.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one model to a CSV dataset")
    p_fit.add_argument("--input", required=True, help="CSV dataset path")
    p_fit.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="regularization strength")
    p_fit.add_argument("--order", type=_nonneg_int, default=0,
                       help="bias-correction order (0 = plain ridge)")
    p_fit.add_argument("--family", choices=["linear", "kernel"], default="linear")
    _add_kernel_args(p_fit)
    _add_output_args(p_fit)

    p_bv = sub.add_parser("bias-variance",
                          help="Monte-Carlo bias/variance on a synthetic benchmark")
    p_bv.add_argument("--model", type=int, choices=[1, 2], required=True)
    p_bv.add_argument("--lambda", dest="lam", type=_float_list, required=True,
                      help="one value or a comma-separated sweep")
    p_bv.add_argument("--order", type=_nonneg_int, default=0)
    p_bv.add_argument("--n", type=int, default=100, help="rows per dataset")
    p_bv.add_argument("--reps", type=int, default=1000, help="Monte-Carlo repetitions")
    p_bv.add_argument("--snr", type=float, default=10.0)
    p_bv.add_argument("--seed", type=_nonneg_int, default=0)
    _add_output_args(p_bv)

    p_st = sub.add_parser("stream", help="block-streaming comparison, linear family")
    src = p_st.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=int, choices=[1, 2],
                     help="synthetic benchmark id")
    src.add_argument("--input", help="CSV dataset to slice into a stream")
    p_st.add_argument("--blocks", type=int, default=20,
                      help="stream length; with --input, the chunk count "
                      "(one random chunk becomes the test set)")
    p_st.add_argument("--block-size", type=int, default=100, help="rows per synthetic block")
    p_st.add_argument("--test-size", type=int, default=1000, help="synthetic test rows")
    p_st.add_argument("--orders", type=_order_list, default=[0, 1],
                      help="comma-separated correction orders to compare")
    p_st.add_argument("--reps", type=int, default=1, help="repetitions to average over")
    p_st.add_argument("--folds", type=int, default=10, help="CV folds per block")
    p_st.add_argument("--grid", type=_float_list, default=None,
                      help="comma-separated lambda grid (default: 25 log-spaced in [1e-6, 1e2])")
    p_st.add_argument("--snr", type=float, default=10.0)
    p_st.add_argument("--classification", action="store_true",
                      help="also report sign-agreement error (targets must be +-1)")
    p_st.add_argument("--seed", type=_nonneg_int, default=0)
    _add_output_args(p_st)

    p_ks = sub.add_parser("kernel-stream",
                          help="block-streaming comparison, kernel family")
    p_ks.add_argument("--input", help="CSV dataset to slice (default: synthetic sine task)")
    p_ks.add_argument("--blocks", type=int, default=50)
    p_ks.add_argument("--block-size", type=int, default=50)
    p_ks.add_argument("--test-size", type=int, default=1000)
    p_ks.add_argument("--orders", type=_order_list, default=[0, 1])
    p_ks.add_argument("--reps", type=int, default=1)
    p_ks.add_argument("--folds", type=int, default=10)
    p_ks.add_argument("--grid", type=_float_list, default=None)
    p_ks.add_argument("--snr", type=float, default=10.0)
    p_ks.add_argument("--classification", action="store_true")
    p_ks.add_argument("--seed", type=_nonneg_int, default=0)
    _add_kernel_args(p_ks)
    _add_output_args(p_ks)

    p_ch = sub.add_parser("chunks", help="slice a CSV dataset into equal-size chunks")
    p_ch.add_argument("--input", required=True)
    p_ch.add_argument("--m", type=int, default=20, help="number of chunks")
    p_ch.add_argument("--seed", type=_nonneg_int, default=0)
    p_ch.add_argument("--out-dir", required=True, help="directory for chunk files")
    _add_output_args(p_ch)

    return parser


def _kernel_spec_from_args(args, rows) -> KernelSpec:
    """Build the kernel, resolving a 'median' bandwidth from the given rows."""
    if args.kernel == "linear":
        return KernelSpec.linear()
    if args.kernel == "polynomial":
        return KernelSpec.polynomial(args.degree, args.offset)
    h = median_bandwidth(rows) if args.bandwidth == "median" else args.bandwidth
    return KernelSpec.gaussian(h)


def _cmd_fit(args):
    dataset = parse_csv_dataset(args.input)
    config = {
        "command": "fit",
        "input": args.input,
        "lambda": args.lam,
        "order": args.order,
        "family": args.family,
    }
    if args.family == "linear":
        model = fit_regularized(dataset, args.lam, args.order)
        results = {
            "intercept": model.intercept,
            "weights": [float(w) for w in model.weights],
        }
        rows = [{"name": "intercept", "value": model.intercept}]
        rows += [{"name": f"w{i}", "value": float(w)} for i, w in enumerate(model.weights)]
    else:
        spec = _kernel_spec_from_args(args, dataset.features)
        model = fit_kernel_regularized(dataset, spec, args.lam, args.order)
        config["kernel"] = {
            "kind": spec.kind, "bandwidth": spec.bandwidth,
            "degree": spec.degree, "offset": spec.offset,
        }
        results = {"coeffs": [float(c) for c in model.coeffs]}
        rows = [{"name": f"c{i}", "value": float(c)} for i, c in enumerate(model.coeffs)]
    payload = {"config": config, "seed": None, "results": results}
    return payload, rows


def _cmd_bias_variance(args):
    model_id = f"model{args.model}"
    reports = []
    for lam in args.lam:
        spec = SyntheticSpec(model_id=model_id, n=args.n, snr=args.snr, seed=args.seed)
        rep = monte_carlo_bias_variance(spec, lam, args.order, args.reps)
        reports.append(
            {
                "lambda": rep.lam,
                "order": rep.order,
                "n": rep.n,
                "reps": rep.reps,
                "bias_norm": rep.bias_norm,
                "variance": rep.variance,
                "mse": rep.mse,
            }
        )
    config = {
        "command": "bias-variance",
        "model": args.model,
        "lambda": args.lam,
        "order": args.order,
        "n": args.n,
        "reps": args.reps,
        "snr": args.snr,
    }
    payload = {"config": config, "seed": args.seed, "results": reports}
    return payload, reports


def _real_stream_data(full: Dataset, blocks: int, seed: tuple):
    """Slice a dataset into `blocks` chunks; one random chunk is the test set."""
    rng = np.random.default_rng((*seed, 2))
    chunks = slice_into_chunks(full, blocks, rng)
    test_idx = int(rng.integers(blocks))
    test = chunks.pop(test_idx)
    return chunks, test


def _run_stream_command(args, family: str):
    if args.reps < 1:
        raise BcregError(f"reps must be >= 1, got {args.reps}")
    grid = tuple(args.grid) if args.grid is not None else DEFAULT_LAMBDA_GRID
    cv = CvConfig(grid=grid, folds=args.folds)
    algorithms = [AlgorithmSpec(family, o) for o in args.orders]
    labels = [algorithm_label(family, o) for o in args.orders]

    full = parse_csv_dataset(args.input) if args.input else None
    synthetic_model = getattr(args, "model", None)

    mse_sum = {label: None for label in labels}
    cls_sum = {label: None for label in labels}
    lam_sum = None
    steps = None
    for rep in range(args.reps):
        if full is not None:
            stream_blocks, test = _real_stream_data(full, args.blocks, (args.seed, rep))
            kernel_spec = (
                _kernel_spec_from_args(args, stream_blocks[0].features)
                if family == "kernel"
                else None
            )
        elif family == "linear":
            spec = SyntheticSpec(
                model_id=f"model{synthetic_model}", n=args.block_size,
                snr=args.snr, seed=args.seed,
            )
            stream_blocks = [
                synth_block(spec, rng=np.random.default_rng((args.seed, rep, t, 0)))
                for t in range(1, args.blocks + 1)
            ]
            test_spec = SyntheticSpec(
                model_id=f"model{synthetic_model}", n=args.test_size,
                snr=args.snr, seed=args.seed,
            )
            test = synth_block(test_spec, rng=np.random.default_rng((args.seed, rep, 0, 0)))
            kernel_spec = None
        else:
            stream_blocks = [
                synth_nonlinear_block(
                    args.block_size, rng=np.random.default_rng((args.seed, rep, t, 0)),
                    snr=args.snr,
                )
                for t in range(1, args.blocks + 1)
            ]
            test = synth_nonlinear_block(
                args.test_size, rng=np.random.default_rng((args.seed, rep, 0, 0)),
                snr=args.snr,
            )
            kernel_spec = _kernel_spec_from_args(args, stream_blocks[0].features)

        report = run_block_stream(
            stream_blocks,
            algorithms,
            test,
            cv=cv,
            seed=(args.seed, rep),
            classification=args.classification,
            kernel_spec=kernel_spec,
        )
        if steps is None:
            steps = len(report.per_step)
            lam_sum = np.zeros(steps)
            for label in labels:
                mse_sum[label] = np.zeros(steps)
                cls_sum[label] = np.zeros(steps)
        lam_sum += np.array(report.lambdas)
        mse_series = report.series("mse")
        for label in labels:
            mse_sum[label] += np.array(mse_series[label])
        if args.classification:
            cls_series = report.series("classification_error")
            for label in labels:
                cls_sum[label] += np.array(cls_series[label])

    results = {
        "t": list(range(1, steps + 1)),
        "lambda_mean": [float(v) for v in lam_sum / args.reps],
        "mse": {
            label: [float(v) for v in mse_sum[label] / args.reps] for label in labels
        },
    }
    if args.classification:
        results["classification_error"] = {
            label: [float(v) for v in cls_sum[label] / args.reps] for label in labels
        }

    config = {
        "command": "stream" if family == "linear" else "kernel-stream",
        "family": family,
        "model": synthetic_model,
        "input": args.input,
        "blocks": args.blocks,
        "block_size": None if args.input else args.block_size,
        "test_size": None if args.input else args.test_size,
        "orders": args.orders,
        "reps": args.reps,
        "folds": args.folds,
        "grid": [float(g) for g in grid],
        "snr": None if args.input else args.snr,
        "classification": args.classification,
    }
    if family == "kernel":
        config["kernel"] = {
            "kind": args.kernel,
            "bandwidth": args.bandwidth,
            "degree": args.degree,
            "offset": args.offset,
        }

    rows = []
    for i, t in enumerate(results["t"]):
        row = {"t": t, "lambda_mean": results["lambda_mean"][i]}
        for label in labels:
            row[f"mse_{label}"] = results["mse"][label][i]
        if args.classification:
            for label in labels:
                row[f"ce_{label}"] = results["classification_error"][label][i]
        rows.append(row)
    payload = {"config": config, "seed": args.seed, "results": results}
    return payload, rows


def _cmd_stream(args):
    return _run_stream_command(args, "linear")


def _cmd_kernel_stream(args):
    args.model = None
    return _run_stream_command(args, "kernel")


def _cmd_chunks(args):
    with open(args.input, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    dataset = parse_csv_dataset(args.input)
    chunks = slice_into_chunks(dataset, args.m, np.random.default_rng(args.seed))
    os.makedirs(args.out_dir, exist_ok=True)
    width = len(str(args.m - 1))
    files = []
    for i, chunk in enumerate(chunks):
        path = os.path.join(args.out_dir, f"chunk_{i:0{width}d}.csv")
        write_csv_dataset(chunk, path, header=header)
        files.append(path)
    size = dataset.n_rows // args.m
    config = {"command": "chunks", "input": args.input, "m": args.m}
    results = {
        "files": files,
        "rows_per_chunk": size,
        "dropped_rows": dataset.n_rows - size * args.m,
    }
    rows = [{"chunk": i, "file": f, "rows": size} for i, f in enumerate(files)]
    payload = {"config": config, "seed": args.seed, "results": results}
    return payload, rows


COMMANDS = {
    "fit": _cmd_fit,
    "bias-variance": _cmd_bias_variance,
    "stream": _cmd_stream,
    "kernel-stream": _cmd_kernel_stream,
    "chunks": _cmd_chunks,
}


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def _write_output(payload, rows, out, fmt) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            fieldnames = list(rows[0].keys())
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([_csv_cell(row.get(name)) for name in fieldnames])
        text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, rows = COMMANDS[args.command](args)
        _write_output(payload, rows, args.out, args.format)
    except (BcregError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
