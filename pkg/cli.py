#!/usr/bin/env python3
"""
Command-line interface for structured DMD experiments
"""
import argparse
import sys

from config import safe_print
from errors import StructDmdError
from experiment_config import load_experiment_config
from pipeline import ExperimentPipeline, convert_model_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_experiment_arguments(parser):
    parser.add_argument(
        "config",
        help="Experiment config file (flat key = value)"
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config key (repeatable)"
    )
    parser.add_argument(
        "--full-scale",
        action="store_true",
        help="Use the n0 = 40 Burgers' discretization (lifted order 1640; takes minutes)"
    )
    parser.add_argument(
        "-o", "--output-dir",
        default=None,
        help="Directory for models, CSVs and reports (default: config output_dir or ./output)"
    )
    parser.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="Suppress progress output"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="structdmd",
        description="Fit structured discrete-time models (linear, bilinear, quadratic-bilinear) to snapshot data",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py train experiments/vdp.cfg
  python cli.py train experiments/burgers.cfg --set tau_r=1e-4
  python cli.py train experiments/burgers.cfg --full-scale
  python cli.py test output/burgers_model.txt experiments/burgers.cfg
  python cli.py svd-report experiments/burgers.cfg
  python cli.py convert output/vdp_model.txt --to continuous -o output/vdp_ct.txt

Exit codes: 0 success, 2 configuration error, 3 numerical failure
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Simulate, fit, reduce, validate and export a model")
    _add_experiment_arguments(train)

    test = sub.add_parser("test", help="Compare a saved model with the system under the test input")
    test.add_argument("model", help="Saved model file")
    _add_experiment_arguments(test)

    svd = sub.add_parser("svd-report", help="Write normalized singular values of Omega and Gamma")
    _add_experiment_arguments(svd)

    convert = sub.add_parser("convert", help="Convert a saved model between discrete and continuous time")
    convert.add_argument("model", help="Saved model file")
    convert.add_argument("--to", choices=["continuous", "discrete"], required=True,
                         help="Target representation")
    convert.add_argument("--dt", type=float, default=None, help="Time step for --to discrete")
    convert.add_argument("-o", "--output", required=True, help="Destination model file")
    return parser


def _report_failure(result):
    safe_print("\n" + "=" * 70)
    safe_print("❌ RUN FAILED")
    safe_print("=" * 70)
    safe_print(f"{result.get('error_type', 'Error')}: {result.get('error', 'Unknown error')}")
    return result.get("exit_code", 1)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "convert":
            direction = "d2c" if args.to == "continuous" else "c2d"
            path = convert_model_file(args.model, direction, args.output, dt=args.dt)
            safe_print(f"✅ Converted model saved to: {path}")
            return EXIT_OK

        config = load_experiment_config(args.config, args.overrides, full_scale=args.full_scale)
        pipeline = ExperimentPipeline(config, output_dir=args.output_dir,
                                      verbose=False if args.quiet else None)

        if args.command == "train":
            result = pipeline.run_train()
        elif args.command == "test":
            result = pipeline.run_test(args.model)
        else:
            result = pipeline.run_svd_report()

        if not result["success"]:
            return _report_failure(result)
        if args.command == "test" and not args.quiet:
            safe_print(f"✨ Relative output error: {result['relative_error']:.4e}")
        return EXIT_OK

    except StructDmdError as e:
        safe_print(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        safe_print("\n\n⚠️  Run cancelled by user")
        return 130


if __name__ == "__main__":
    sys.exit(main())
