"""
Command-line entry point

    python -m basket_cds.cli --config configs/homogeneous.toml
    python -m basket_cds.cli --table 2 --out table2.csv
    python -m basket_cds.cli --sweep c --out theta_c.csv
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from basket_cds.errors import BasketCDSError, ConfigError
from basket_cds.montecarlo import SimulationPlan
from basket_cds.results import FLOAT_FORMAT, write_results
from basket_cds.runner import figure_scenario, reproduce_table, run_scenario, sensitivity_sweep
from basket_cds.scenario_config import DEFAULT_PATHS, METHODS, apply_overrides, parse_scenario, read_scenario_document
from basket_cds.workbook import export_results_to_excel, export_tables_to_excel

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_ENGINE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='basket-cds',
        description='Price k-th-to-default basket CDS under default contagion.',
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--config', type=Path, help='scenario TOML file')
    source.add_argument('--table', type=int, choices=(1, 2, 3), help='reproduce a reference table')
    parser.add_argument('--sweep', choices=('a', 'c'),
                        help='sensitivity curve in a or c (with --config, or the built-in n=10 preset)')
    parser.add_argument('--method', choices=METHODS, help='override run.method')
    parser.add_argument('--paths', type=int, help='override mc.paths')
    parser.add_argument('--seed', type=int, help='override mc.seed')
    parser.add_argument('--chunks', type=int, help='override mc.parallel_chunks (worker threads)')
    parser.add_argument('--out', type=Path, help='output file (.csv or .xlsx); stdout when omitted')
    parser.add_argument('--timings', action='store_true', help='add the wall_clock_ms column')
    parser.add_argument('--perturb-degenerate', action='store_true',
                        help='shift c by 1e-7 when mixture rates collide instead of failing')
    parser.add_argument('--log-level', default='WARNING',
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), help='logging verbosity')
    return parser


def _emit_frame(df: pd.DataFrame, out: Optional[Path], title: str):
    if out is not None and out.suffix.lower() == '.xlsx':
        out.write_bytes(export_tables_to_excel({title: df}).getvalue())
        return
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _plan_from_flags(args) -> SimulationPlan:
    return SimulationPlan(
        paths=args.paths if args.paths is not None else DEFAULT_PATHS,
        seed=args.seed if args.seed is not None else 0,
        parallel_chunks=args.chunks if args.chunks is not None else 1,
    )


def _run(args) -> int:
    if args.table is not None:
        if args.sweep:
            raise ConfigError(['--sweep: use with --config or on its own, not with --table'])
        df = reproduce_table(args.table, method=args.method or 'analytic', plan=_plan_from_flags(args))
        _emit_frame(df, args.out, f"Table {args.table}")
        return EXIT_OK

    if args.config is None:
        # --sweep on its own uses the built-in curve scenario
        config = figure_scenario(args.sweep)
    else:
        data = apply_overrides(read_scenario_document(args.config), method=args.method, paths=args.paths,
                               seed=args.seed, chunks=args.chunks,
                               out=str(args.out) if args.out is not None else None)
        config = parse_scenario(data, name=args.config.stem)

    if args.sweep:
        mode = 'analytic' if config.model_type == 'homogeneous' and config.method == 'analytic' else 'fd'
        df = sensitivity_sweep(config, args.sweep, mode=mode)
        _emit_frame(df, args.out, f"theta_{args.sweep}")
        return EXIT_OK

    rows = run_scenario(config, timings=args.timings, perturb_degenerate=args.perturb_degenerate)
    out = args.out or (Path(config.output_path) if config.output_path else None)
    if config.output_format == 'xlsx' and out is not None:
        out.write_bytes(export_results_to_excel(rows, timings=args.timings).getvalue())
    else:
        text = write_results(rows, out, timings=args.timings)
        if out is None:
            sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None and args.table is None and args.sweep is None:
        parser.error('one of --config, --table or --sweep is required')
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        return _run(args)
    except ConfigError as e:
        for message in e.errors:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except BasketCDSError as e:
        print(f"engine error: {e}", file=sys.stderr)
        for note in getattr(e, '__notes__', []):
            print(f"  {note}", file=sys.stderr)
        return EXIT_ENGINE
    except Exception:
        logger.exception('unexpected failure')
        return EXIT_UNEXPECTED


if __name__ == '__main__':
    sys.exit(main())
