"""
majority-lab: phòng thí nghiệm độ phức tạp truy vấn cho MAJORITY
Command line entry point: simulate, verify, optimal, quantum, bounds, calibrate
"""

import argparse
import csv
import io
import json
import sys

from modules import (
    log_error,
    log_debug,
    set_log_dir,
    set_debug_logging_enabled,
    LabConfig,
    ConfigError,
    parse_seed,
    BitString,
    ALGORITHMS,
    run_on,
    xor_gadget,
    compile_run,
    QueryFamily,
    optimal_certificate,
    GuardError,
    bounds_rows,
    ExperimentConfig,
    ZeroSidedContractBreach,
    run_experiment,
    unknown_rate_experiment,
    emit_results,
    calibrate,
    SUITES,
    run_suites,
    default_budget
)
from modules.analysis import BOUNDS_COLUMNS
from modules.bruteforce import optimal_depth
from modules.experiments import DEFAULT_D_GRID, emit_calibration
from modules.quantum import xor_gadget_distribution

# Fix encoding for Windows console
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# verify --quick: below the acceptance sizes, for a fast look only
QUICK_MC_N = 1024
QUICK_MC_TRIALS = 2000


def _int_list(text):
    return [int(part, 0) for part in text.split(',') if part.strip()]


def _float_list(text):
    return [float(part) for part in text.split(',') if part.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog='majority-lab',
        description='Query-complexity lab for MAJORITY in the XOR decision tree model')
    parser.add_argument('--config', help='path to config.json (default: next to this script)')
    parser.add_argument('--seed', type=parse_seed, help='master seed (overrides config and $MAJORITY_LAB_SEED)')
    parser.add_argument('--log-dir', help='directory for majority_lab_debug.log and error_log.txt')
    parser.add_argument('--debug', action='store_true', help='enable debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    def add_seed(command_parser):
        # own dest: subparser defaults would otherwise reset the global --seed
        command_parser.add_argument('--seed', dest='command_seed', type=parse_seed, help='master seed')

    sim = sub.add_parser('simulate', help='Monte Carlo run of a randomized algorithm')
    sim.add_argument('--n', type=int, required=True)
    sim.add_argument('--class', dest='input_class', choices=['fixed', 'balanced', 'uniform'], default='balanced')
    sim.add_argument('--ones', type=int, help='A for the fixed class')
    sim.add_argument('--algorithm', choices=sorted(ALGORITHMS), default='greedy')
    sim.add_argument('--trials', type=int)
    sim.add_argument('--epsilon', type=float)
    sim.add_argument('--d', type=float)
    sim.add_argument('--r', type=float, action='append', help='tail parameter (repeatable)')
    sim.add_argument('--budget', help="query budget C' or 'auto' for the default budget")
    sim.add_argument('--workers', type=int)
    sim.add_argument('--executor', choices=['auto', 'thread', 'process'])
    sim.add_argument('--compact', action='store_true', default=None, help='size-only blocks')
    sim.add_argument('--out', help='result file')
    sim.add_argument('--format', choices=['csv', 'json'], default='csv')
    add_seed(sim)

    ver = sub.add_parser('verify', help='run verification suites')
    ver.add_argument('--suite', nargs='+', choices=list(SUITES) + ['all'], default=['all'])
    ver.add_argument('--n-max', type=int, default=14, help='largest N for exhaustive suites')
    ver.add_argument('--truncation-n-max', type=int, default=12)
    ver.add_argument('--quantum-n-max', type=int, default=14)
    ver.add_argument('--mc-n', type=int, default=4096, help='N for the Monte Carlo suite')
    ver.add_argument('--trials', type=int, default=10_000, help='trials per Monte Carlo class')
    ver.add_argument('--uniform-trials', type=int, default=100_000, help='trials for the uniform class')
    ver.add_argument('--quick', action='store_true',
                     help=f'Monte Carlo smoke run: N={QUICK_MC_N}, {QUICK_MC_TRIALS} trials per class')
    add_seed(ver)

    opt = sub.add_parser('optimal', help='exact optimal decision tree depth by minimax')
    opt.add_argument('--n', type=int, required=True)
    opt.add_argument('--family', choices=[f.value for f in QueryFamily], default='xor')
    opt.add_argument('--strict', action='store_true', help='three-way target instead of weak MAJORITY')
    opt.add_argument('--out', help='write the JSON certificate here')

    qua = sub.add_parser('quantum', help='XOR gadget table and cost-equivalence report')
    qua.add_argument('--input', default='1111111', help='bit string for the sample run')
    qua.add_argument('--algorithm', choices=sorted(ALGORITHMS), default='greedy')

    bnd = sub.add_parser('bounds', help='closed-form bounds table as CSV')
    bnd.add_argument('--n-max', type=int, default=64)
    bnd.add_argument('--epsilon', type=float)
    bnd.add_argument('--d', type=float)
    bnd.add_argument('--out')

    cal = sub.add_parser('calibrate', help='calibrate d on training sizes, validate on held-out sizes')
    cal.add_argument('--epsilon', type=float)
    cal.add_argument('--trials', type=int)
    cal.add_argument('--train', type=_int_list, default=[1 << 10, 1 << 12])
    cal.add_argument('--holdout', type=_int_list, default=[1 << 11, 1 << 13])
    cal.add_argument('--d-grid', type=_float_list, default=list(DEFAULT_D_GRID))
    cal.add_argument('--workers', type=int)
    cal.add_argument('--out')
    add_seed(cal)
    return parser


def cmd_simulate(args, lab):
    budget = None
    if args.budget is not None:
        if args.budget == 'auto':
            budget = default_budget(max(args.n, 1), args.epsilon or lab.epsilon, args.d or lab.budget_d)
        else:
            budget = int(args.budget)
    config = ExperimentConfig.from_lab_config(
        lab, n=args.n, ones=args.ones, input_class=args.input_class, algorithm=args.algorithm,
        trials=args.trials, master_seed=args.seed, epsilon=args.epsilon, d=args.d, tail_r=args.r,
        workers=args.workers, executor=args.executor, compact=args.compact,
        output_path=args.out, output_format=args.format)
    result = run_experiment(config)
    stats = result.stats
    print(f"N={config.n} A={config.ones} B={config.zeros} algorithm={config.algorithm} "
          f"trials={config.trials} seed={config.master_seed}")
    print(f"comparisons: mean={stats.mean:.4f} var={stats.variance:.4f} min={stats.min:g} "
          f"p50={stats.p50:g} p90={stats.p90:g} p99={stats.p99:g} max={stats.max:g}")
    if result.prefix_center is not None:
        print(f"prefix M: mean={result.prefix_mean:.2f} center={result.prefix_center:.2f}")
    failed = False
    for tail in result.tail_reports:
        status = 'PASS' if tail.passed else ('FAIL' if tail.asserted else 'NOTE')
        failed |= tail.failed
        print(f"tail r={tail.r:g}: Pr[C >= {tail.threshold:.1f}] = {tail.empirical:.5f} "
              f"cap={tail.cap:.5f} {status}")
    if budget is not None:
        rate = unknown_rate_experiment(config.replace(budget=budget))
        print(f"budget={budget}: unknown rate={rate:.5f} (epsilon={config.epsilon})")
    if args.out:
        emit_results([result.stats_record()], result.tail_reports, args.out, args.format)
        print(f"wrote {args.out}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_verify(args, lab):
    if args.quick:
        args.mc_n, args.trials, args.uniform_trials = QUICK_MC_N, QUICK_MC_TRIALS, QUICK_MC_TRIALS
    options = {
        'exact': {'n_max': args.n_max, 'truncation_n_max': min(args.truncation_n_max, args.n_max)},
        'sandwich': {'n_max': args.n_max},
        'appendix': {'n_max': args.n_max},
        'quantum': {'n_max': min(args.quantum_n_max, args.n_max)},
        'montecarlo': {'n': args.mc_n, 'trials': args.trials, 'uniform_trials': args.uniform_trials,
                       'seed': lab.default_seed, 'epsilon': lab.epsilon, 'd': lab.budget_d,
                       'workers': lab.workers},
    }
    reports = run_suites(args.suite, **options)
    failures = 0
    for report in reports:
        for line in report.lines():
            print(line)
        failures += len(report.failures)
        notes = [c for c in report.findings if not c.passed]
        print(f"[{report.name}] {len(report.checks)} checks, {len(report.failures)} failures, "
              f"{len(notes)} findings")
    return EXIT_FAILED if failures else EXIT_OK


def cmd_optimal(args, lab):
    if args.strict:
        depth = optimal_depth(args.n, args.family, weak=False)
        certificate = {'N': args.n, 'family': args.family, 'target': 'strict', 'depth': depth}
        matched = True
    else:
        certificate = optimal_certificate(args.n, args.family)
        matched = certificate['matched_formula']
    text = json.dumps(certificate, indent=2) + "\n"
    print(text, end='')
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
    return EXIT_OK if matched else EXIT_FAILED


def cmd_quantum(args, lab):
    print("X0 X1 | XOR  P(wrong)   oracle calls")
    exact = True
    for x0 in (0, 1):
        for x1 in (0, 1):
            answer, calls = xor_gadget(x0, x1)
            wrong = float(xor_gadget_distribution(x0, x1)[1 - answer])
            exact &= answer == x0 ^ x1 and calls == 1
            print(f" {x0}  {x1} |  {answer}   {wrong:.2e}   {calls}")
    x = BitString.from_string(args.input)
    result = run_on(args.algorithm, x, tracing=True)
    quantum = compile_run(result.ledger, x.n, bits=x)
    print(f"{args.algorithm} on {x}: verdict={result.verdict.name} classical={result.total_cost} "
          f"(bit={result.ledger.bit_queries}, xor={result.ledger.xor_queries}) quantum={quantum}")
    return EXIT_OK if exact and quantum == result.total_cost else EXIT_FAILED


def cmd_bounds(args, lab):
    rows = bounds_rows(args.n_max, epsilon=args.epsilon or lab.epsilon, d=args.d or lab.budget_d)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(BOUNDS_COLUMNS)
    for row in rows:
        writer.writerow(row.as_row())
    if args.out:
        with open(args.out, 'w', encoding='utf-8', newline='') as f:
            f.write(buffer.getvalue())
        print(f"wrote {args.out}")
    else:
        print(buffer.getvalue(), end='')
    return EXIT_OK


def cmd_calibrate(args, lab):
    base = ExperimentConfig.from_lab_config(
        lab, n=max(args.train + args.holdout), input_class='balanced', algorithm='greedy',
        trials=args.trials, master_seed=args.seed, epsilon=args.epsilon, workers=args.workers)
    report = calibrate(base, train_sizes=args.train, holdout_sizes=args.holdout, d_grid=args.d_grid)
    for row in report.rows:
        print(f"{row['phase']:8s} N={row['N']:6d} d={row['d']:g} budget={row['budget']} "
              f"unknown={row['unknown_rate']:.5f} {'PASS' if row['pass'] else 'FAIL'}")
    print(f"chosen d={report.d} validated={report.validated}")
    if args.out:
        emit_calibration(report, args.out)
    return EXIT_OK if report.validated else EXIT_FAILED


COMMANDS = {
    'simulate': cmd_simulate,
    'verify': cmd_verify,
    'optimal': cmd_optimal,
    'quantum': cmd_quantum,
    'bounds': cmd_bounds,
    'calibrate': cmd_calibrate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, 'command_seed', None) is not None:
        args.seed = args.command_seed
    if args.log_dir:
        set_log_dir(args.log_dir)
    lab = LabConfig.load(args.config)
    set_debug_logging_enabled(args.debug or lab.debug_logging)
    if args.seed is not None:
        lab.default_seed = args.seed
    log_debug(f"majority-lab {args.command}: {vars(args)}")
    try:
        return COMMANDS[args.command](args, lab)
    except (ConfigError, GuardError, ValueError) as e:
        log_error(f"Invalid arguments for {args.command}", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroSidedContractBreach as e:
        log_error("Zero-sided contract breach", e)
        print(f"FAILED: {e}", file=sys.stderr)
        return EXIT_FAILED
    except OSError as e:
        log_error(f"I/O error in {args.command}", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
