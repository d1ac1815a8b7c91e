################################################################################
#
# polyest_run.py 		polyest
#
# Main program: bound tables, verification suites, extremal witnesses and
# power-series analysis. Tables go to stdout (csv or json), logging to
# stderr. Exit codes: 0 success, 1 failed verification, 2 usage error.
#
################################################################################

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from polyest import bounds
from polyest.config import FORMATS, RunConfig
from polyest.extremal import build_extremal_lp, build_extremal_x, verify_extremal
from polyest.forms import Partition
from polyest.series import PowerSeries, derivative_floor, radius_uniform, reexpand, \
    rho_bar, verify_analyticity
from polyest.suites import SUITES, run_suite
from polyest.utilities import MyParser, PolyestError, UsageError, format_number, \
    integer_partitions, parse_int_range, parse_p, parse_vector

logger = logging.getLogger('polyest')

PINCH_TOL = 1e-12
DERIVATIVE_ORDERS = (1, 2, 3)


def _plain(obj):
    """Replace non-finite floats by strings so that json output is strict."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_number(obj)
    return obj


def write_json(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(_plain(obj), indent=1) + '\n')


def write_csv(header, rows, stream=None):
    writer = csv.writer(stream or sys.stdout, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])


###############################################################################
# bounds
###############################################################################

def _bound_value(report):
    return 'overflow' if report.value is None else report.value


def bound_rows(m_values, n_values, p_values, sharp=False):
    """
    One row per (partition, space): the lower bound, the upper bound and
    its branches, and whether the two pinch.
    """
    rows = []
    for m in m_values:
        if m < 1:
            raise UsageError('m must be >= 1, got %d' % m)
        n_range = [n for n in (range(1, m + 1) if n_values is None else n_values)
                   if 1 <= n <= m]
        for n in n_range:
            for parts in integer_partitions(m, exact_parts=n):
                partition = Partition(parts)
                cells = [('generic', bounds.bound_x_lower(partition),
                          bounds.bound_real_min(partition))]
                upper_fn = bounds.bound_lp_upper_sharp if sharp else bounds.bound_lp_upper
                for p in p_values:
                    cells.append((bounds.space_tag(p), bounds.bound_lp_lower(partition, p),
                                  upper_fn(partition, p)))
                for space, lower, upper in cells:
                    branches = {name: (None if value > bounds.LOG_FLOAT_MAX
                                       else math.exp(value))
                                for name, value in upper.branches.items()}
                    rows.append({'m': m, 'n': n, 'partition': str(partition),
                                 'space': space, 'lower': _bound_value(lower),
                                 'upper': _bound_value(upper), 'branches': branches,
                                 'log_lower': lower.log_value,
                                 'log_upper': upper.log_value,
                                 'pinch': abs(lower.log_value - upper.log_value) <= PINCH_TOL})
    if not rows:
        raise UsageError('No partition of m in %s has a number of parts in %s'
                         % (list(m_values), n_values))
    return rows


def cmd_bounds(args, config):
    m_values = parse_int_range(args.m)
    n_values = parse_int_range(args.n) if args.n is not None else None
    p_values = [parse_p(t) for t in args.p.split(',') if t.strip()] if args.p else []
    rows = bound_rows(m_values, n_values, p_values, args.sharp)
    logger.info('bounds: %d rows', len(rows))
    if config.format == 'json':
        for row in rows:
            row['branches'] = {k: 'overflow' if v is None else v
                               for k, v in row['branches'].items()}
        write_json(rows)
    else:
        header = ['m', 'n', 'partition', 'space', 'lower', 'upper', 'branches',
                  'log_lower', 'log_upper', 'pinch']
        table = []
        for row in rows:
            row = dict(row)
            row['branches'] = ';'.join('%s=%s' % (k, format_number(v))
                                       for k, v in row['branches'].items())
            table.append([row[h] for h in header])
        write_csv(header, table)
    return 0


###############################################################################
# verify
###############################################################################

def cmd_verify(args, config):
    result = run_suite(args.suite, config)
    if config.format == 'json':
        write_json(result.to_json())
    else:
        header = ['suite', 'checks', 'passed', 'claim', 'instance']
        rows = [[result.name, result.checks, result.passed, '', '']]
        for failure in result.failures:
            rows.append([result.name, '', '', failure.get('claim', ''),
                         json.dumps(_plain(failure), sort_keys=True)])
        write_csv(header, rows)
    if not result.passed:
        logger.warning('suite %s: %d of %d checks failed', result.name,
                       len(result.failures), result.checks)
        return 1
    return 0


###############################################################################
# extremal
###############################################################################

def cmd_extremal(args, config):
    partition = Partition.parse(args.partition)
    if args.p is None:
        instance = build_extremal_x(partition)
    else:
        instance = build_extremal_lp(partition, parse_p(args.p))
    report = verify_extremal(instance, config.budget, config.seed, config.caps)
    write_json({'instance': instance.to_json(), 'report': report.to_json()})
    return 0 if report.passed else 1


###############################################################################
# radius
###############################################################################

def _load_series(fname):
    try:
        with open(fname) as f:
            obj = json.load(f)
    except OSError as err:
        raise UsageError('Cannot read series file %s: %s' % (fname, err))
    except ValueError as err:
        raise UsageError('Series file %s is not valid JSON: %s' % (fname, err))
    return PowerSeries.from_json(obj)


def radius_report(series, config, y=None, x=None, K=None):
    radius = radius_uniform(series, config.budget, config.seed)
    bar = rho_bar(series, config.budget, config.seed, radius)
    out = {'degree': series.degree, 'space': series.space.tag,
           'rho': radius.rho, 'method': radius.method,
           'rho_bar': bar.rho_bar, 'rho_bar_empirical': bar.empirical,
           'rho_bar_floor': bar.floor,
           'fully_analytic_everywhere': math.isinf(radius.rho),
           'derivative_floors': {n: derivative_floor(radius.rho, n)
                                 for n in DERIVATIVE_ORDERS}}
    passed = True
    if y is not None and x is not None:
        check = verify_analyticity(series, y, x, K=K, bar=bar)
        reexpanded = check.values['reexpanded']
        direct = check.values['direct']
        out['check'] = check.to_json()
        out['check']['rel_error'] = abs(reexpanded - direct) / max(abs(direct), 1e-300)
        passed = check.passed
    elif y is not None:
        plan = reexpand(series, y, K, bar=bar)
        out['valid_ball_radius'] = plan.valid_ball_radius
    return out, passed


def _flatten(obj, prefix=''):
    items = []
    for key, value in obj.items():
        name = '%s%s' % (prefix, key)
        if isinstance(value, dict):
            items.extend(_flatten(value, name + '.'))
        elif isinstance(value, list):
            items.append((name, ';'.join(str(v) for v in value)))
        else:
            items.append((name, value))
    return items


def cmd_radius(args, config):
    series = _load_series(args.series)
    y = parse_vector(args.y) if args.y is not None else None
    x = parse_vector(args.x) if args.x is not None else None
    if x is not None and y is None:
        raise UsageError('--x needs --y (the re-expansion center)')
    out, passed = radius_report(series, config, y, x, args.K)
    if config.format == 'json':
        write_json(out)
    else:
        rows = [[k, 'none' if v is None else v] for k, v in _flatten(out)]
        write_csv(['quantity', 'value'], rows)
    return 0 if passed else 1


###############################################################################
# main
###############################################################################

def _common_flags():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--seed', type=int, help='master seed (default 42)')
    common.add_argument('--budget', type=int, help='random restarts per estimate (default 256)')
    common.add_argument('--format', choices=FORMATS, help='output format (default csv)')
    common.add_argument('--threads', type=int, help='worker threads for suites (default 1)')
    common.add_argument('--config', help='full path to config filename')
    common.add_argument('--override-caps', dest='override_caps', action='store_true',
                        help='lift the degree cap of the polarization sum')
    common.add_argument('-v', '--verbose', action='count',
                        help='-v for INFO, -vv for DEBUG logging')
    common.add_argument('-pc', '--printconfig', action='store_true',
                        help='print config parameters to screen')
    return common


def build_parser():
    common = _common_flags()
    parser = MyParser(prog='polyest', parents=[common],
                      description='Polarization constants, l_p norm estimates and '
                                  'power-series radii.')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    p_bounds = commands.add_parser('bounds', parents=[common], help='tabulate bounds')
    p_bounds.add_argument('--m', required=True, help="degree range, e.g. '2..6'")
    p_bounds.add_argument('--n', help="number of parts, e.g. '1..3' (default all)")
    p_bounds.add_argument('--p', help="comma separated l_p exponents, e.g. '2,4,inf'")
    p_bounds.add_argument('--sharp', action='store_true',
                          help='use the sharpened l_p upper bound')
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = commands.add_parser('verify', parents=[common], help='run a verification suite')
    p_verify.add_argument('suite', help='one of %s' % ', '.join(SUITES))
    p_verify.set_defaults(func=cmd_verify)

    p_extremal = commands.add_parser('extremal', parents=[common],
                                     help='extremal witness as json')
    p_extremal.add_argument('--partition', required=True, help="e.g. '2,1'")
    p_extremal.add_argument('--p', help='l_p exponent; generic space when omitted')
    p_extremal.set_defaults(func=cmd_extremal)

    p_radius = commands.add_parser('radius', parents=[common], help='analyse a power series')
    p_radius.add_argument('--series', required=True, help='series json file')
    p_radius.add_argument('--y', help="re-expansion center, e.g. '0.3'")
    p_radius.add_argument('--x', help='point checked against the direct sum')
    p_radius.add_argument('--K', type=int, help='re-expansion degree cap')
    p_radius.set_defaults(func=cmd_radius)
    return parser


def _setup_logging(verbose, printconfig):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format='%(levelname)s:%(name)s: %(message)s')
    logging.getLogger('polyest').setLevel(level)
    if printconfig:
        logging.getLogger('polyest.config').setLevel(min(level, logging.INFO))


def load_config(args):
    config = RunConfig.from_file(args.config) if getattr(args, 'config', None) \
        else RunConfig()
    return config.updated(seed=getattr(args, 'seed', None),
                          budget=getattr(args, 'budget', None),
                          format=getattr(args, 'format', None),
                          threads=getattr(args, 'threads', None),
                          override_caps=getattr(args, 'override_caps', None))


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) == 0:
        parser.print_help(sys.stderr)
        sys.exit(1)

    args = parser.parse_args(argv)
    _setup_logging(getattr(args, 'verbose', 0), getattr(args, 'printconfig', False))
    try:
        config = load_config(args)
        if getattr(args, 'printconfig', False):
            config.print_config_params()
        return args.func(args, config)
    except PolyestError as err:
        sys.stderr.write('error: %s\n' % err)
        return 2


if __name__ == '__main__':
    sys.exit(main() or 0)
