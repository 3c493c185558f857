# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Command-line front end.

    entrolab_cli compute --state ghz:m=3,d=2 --partition A:B:C --which I
    entrolab_cli squash --mode c --state file:rho.json --partition A:B:C
    entrolab_cli suite --samples 100 --seed 1
    entrolab_cli flower --m 3 --d 2 --table

Exit codes: 0 success, 2 usage or input error, 3 suite violation, 4 a
non-finite value.
'''

import argparse
import csv
import io
import json
import math
import sys

import attr

from entrolab.lib.env_base import EnvBase
from entrolab.lib.qstate import StateError
from entrolab.lib.sampling import BadParams
from entrolab.lib.stateio import read_state
from entrolab.lib.text import flower_lines, rows_lines, suite_lines
from entrolab.lib.util import all_finite, class_logger
from entrolab.measures.classical import (
    DistributionError, EVE, ideal_key_dist, intrinsic_info,
    read_distribution_csv, s_arrow,
)
from entrolab.measures.entropic import (
    BadBasis, BadPartition, Partition, cond_multi_info,
    measured_mutual_info, venn_info,
)
from entrolab.measures.env import Env
from entrolab.measures.extensions import ExtensionMismatch
from entrolab.measures.harness import run_suites
from entrolab.measures.keybounds import (
    dw_rate, lockability_demo, pdit_normalization_check,
    sample_channel_extensions,
)
from entrolab.measures.reports import report_rows, to_json
from entrolab.measures.squashed import (
    bipartite_squashed_upper, c_squashed_upper, q_squashed_upper,
)
from entrolab.measures.states import (
    paired_partition, party_labels, pdit, random_pdit_spec,
    resolve_named_state,
)


EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NONFINITE = 0, 2, 3, 4
VERBS = ('compute', 'squash', 'suite', 'flower', 'keybound', 'intrinsic',
         'demo-lock')
INPUT_ERRORS = (StateError, BadPartition, BadBasis, DistributionError,
                BadParams, ExtensionMismatch, EnvBase.Error, OSError)


class UsageError(Exception):
    '''Raised on a bad command line.'''


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError(message)


@attr.s(slots=True, frozen=True)
class Command(object):
    '''A parsed command line: the verb and its options.'''
    verb = attr.ib()
    options = attr.ib()
    partition = attr.ib(default=None)
    format = attr.ib(default=None)


def _add_optimizer_flags(parser):
    group = parser.add_argument_group('optimizer')
    group.add_argument('--seed', type=int, help='random seed')
    group.add_argument('--restarts', type=int, help='number of restarts')
    group.add_argument('--max-iters', type=int,
                       help='iteration cap per restart')
    group.add_argument('--max-evals', type=int,
                       help='evaluation cap per restart')
    group.add_argument('--method', help='scipy local minimizer')
    group.add_argument('--ensemble-size', type=int,
                       help='members of searched ensembles')
    group.add_argument('--extension-dim', type=int,
                       help='dimension of searched quantum extensions')
    group.add_argument('--environment-dim', type=int,
                       help='Kraus rank of searched channels')
    group.add_argument('--sequential', action='store_true',
                       help='run restarts on the calling thread')


def _add_state_flags(parser, required=True):
    parser.add_argument('--state', required=required,
                        help='named state like ghz:m=3,d=2, or file:PATH '
                        'of a JSON state')
    parser.add_argument('--partition',
                        help='parties joined by ":", labels by ",", and '
                        'an optional conditioner after "|"')


def make_parser():
    parser = ArgumentParser(
        'entrolab_cli',
        description='Multipartite squashed entanglement and related '
        'quantities')
    parser.add_argument('--format', choices=('json', 'csv', 'table'),
                        help='output format (default: ENTROLAB_FORMAT or '
                        'json)')
    verbs = parser.add_subparsers(dest='verb', metavar='verb')

    compute = verbs.add_parser('compute', help='multipartite information')
    _add_state_flags(compute)
    compute.add_argument('--which', default='I',
                         choices=('I', 'S', 'venn', 'measured'))
    compute.add_argument('--seed', type=int, help='seed of the measured '
                         'information search')

    squash = verbs.add_parser('squash', help='squashed entanglement bounds')
    _add_state_flags(squash)
    squash.add_argument('--mode', default='q', choices=('q', 'c', 'b'),
                        help='quantum, classical or bipartite')
    squash.add_argument('--which', default='I', choices=('I', 'S'))
    squash.add_argument('--known-value', type=float,
                        help='value certifying the bound if matched')
    _add_optimizer_flags(squash)

    suite = verbs.add_parser('suite', help='identity and axiom suites')
    suite.add_argument('--samples', type=int, default=100)
    suite.add_argument('--seed', type=int)
    suite.add_argument('--tol', type=float, default=1e-8)
    suite.add_argument('--sequential', action='store_true')

    flower = verbs.add_parser('flower', help='flower state values')
    flower.add_argument('--m', type=int, nargs='+', default=[3])
    flower.add_argument('--d', type=int, nargs='+', default=[2])
    flower.add_argument('--table', action='store_true',
                        help='shorthand for --format table')

    keybound = verbs.add_parser('keybound', help='distillable key bounds')
    _add_state_flags(keybound, required=False)
    keybound.add_argument('--key-labels',
                          help='one key label per party, comma separated')
    keybound.add_argument('--m', type=int, default=3)
    keybound.add_argument('--d', type=int, default=2)
    keybound.add_argument('--shield', type=int, default=2)
    keybound.add_argument('--rank', type=int, default=2)
    keybound.add_argument('--extensions', type=int, default=20,
                          help='random channel extensions to sample')
    keybound.add_argument('--ext-dim', type=int, default=2)
    keybound.add_argument('--seed', type=int)

    intrinsic = verbs.add_parser('intrinsic', help='intrinsic information')
    source = intrinsic.add_mutually_exclusive_group(required=True)
    source.add_argument('--key-dist',
                        help='ideal key like m=3,d=2,eve=independent')
    source.add_argument('--dist', help='CSV distribution file')
    intrinsic.add_argument('--eve', default=EVE)
    intrinsic.add_argument('--eve-size', type=int)
    _add_optimizer_flags(intrinsic)

    demo = verbs.add_parser('demo-lock', help='lockability of the flower')
    demo.add_argument('--m', type=int, default=3)
    demo.add_argument('--d', type=int, default=2)
    return parser


def parse_partition(text):
    if text is None:
        return None
    try:
        return Partition.from_string(text)
    except BadPartition as e:
        raise UsageError(f'--partition: {e}') from None


def parse_args(argv):
    '''Return a Command, raising UsageError on a bad command line.'''
    args = make_parser().parse_args(argv)
    if args.verb is None:
        raise UsageError(f'a verb is required: one of {", ".join(VERBS)}')
    options = vars(args)
    verb = options.pop('verb')
    fmt = options.pop('format')
    if options.pop('table', False):
        fmt = 'table'
    partition = parse_partition(options.pop('partition', None))
    for name in ('samples', 'extensions', 'ext_dim', 'restarts', 'max_iters',
                 'max_evals', 'eve_size'):
        value = options.get(name)
        if value is not None and value < 1:
            raise UsageError(f'--{name.replace("_", "-")} must be '
                             f'positive, got {value}')
    return Command(verb, options, partition, fmt)


def resolve_state(text):
    '''(state, default partition) for "file:PATH" or a named state.'''
    if text.startswith('file:'):
        return read_state(text[5:]), None
    return resolve_named_state(text)


def _state_and_partition(cmd):
    state, default = resolve_state(cmd.options['state'])
    part = cmd.partition or default
    if part is None:
        raise UsageError('--partition is required for file states')
    return state, part


def _optimizer(cmd, env):
    o = cmd.options
    return env.optimizer_config(
        seed=o.get('seed'), restarts=o.get('restarts'),
        max_iters=o.get('max_iters'), max_evals=o.get('max_evals'),
        method=o.get('method'), ensemble_size=o.get('ensemble_size'),
        extension_dim=o.get('extension_dim'),
        environment_dim=o.get('environment_dim'),
        concurrent=False if o.get('sequential') else None)


def _seed(cmd, env):
    seed = cmd.options.get('seed')
    return env.seed if seed is None else seed


def run_compute(cmd, env):
    state, part = _state_and_partition(cmd)
    which = cmd.options['which']
    result = {'state': cmd.options['state'], 'partition': str(part),
              'which': which}
    if which == 'venn':
        result['value'] = venn_info(state, part)
    elif which == 'measured':
        cfg = env.optimizer_config(seed=_seed(cmd, env)).evolve(
            restarts=32, max_iters=200)
        measured = measured_mutual_info(state, part, search=cfg)
        result['value'] = measured.value
        result['certified'] = 'lower-estimate'
    else:
        result['value'] = cond_multi_info(state, part, which)
    return result


def run_squash(cmd, env):
    state, part = _state_and_partition(cmd)
    cfg = _optimizer(cmd, env)
    mode, which = cmd.options['mode'], cmd.options['which']
    known = cmd.options.get('known_value')
    if mode == 'b':
        return bipartite_squashed_upper(state, part, cfg)
    if mode == 'c':
        return c_squashed_upper(state, part, which, cfg, known)
    return q_squashed_upper(state, part, which, cfg, known)


def run_flower(cmd, env):
    rows = []
    for m in cmd.options['m']:
        for d in cmd.options['d']:
            record = lockability_demo(m, d)
            log_d = math.log2(d)
            for extension, which, value, known in (
                    ('purifying', 'I', record.full_value_I, m + log_d),
                    ('trivial', 'S', record.full_value_S, m + log_d),
                    ('measured', 'I', record.measured_value_I,
                     m + m / 2 * log_d),
                    ('trivial', 'I', record.trivial_value_I,
                     m + (m - 1) * log_d),
                    ('locked', 'I', record.locked_value, 0.0)):
                rows.append({'m': m, 'd': d, 'which': which,
                             'extension': extension, 'value': value,
                             'paper_value': known, 'delta': value - known})
    return rows


def run_keybound(cmd, env):
    o = cmd.options
    seed = _seed(cmd, env)
    if o.get('state'):
        state, part = _state_and_partition(cmd)
        keys = (o['key_labels'].split(',') if o.get('key_labels')
                else [party[0] for party in part.parties])
        return {'dw_rate': dw_rate(state, part, keys)}
    spec = random_pdit_spec(o['m'], o['d'], seed, o['shield'], o['rank'])
    gamma = pdit(spec)
    extensions = sample_channel_extensions(gamma, o['extensions'],
                                           o['ext_dim'], seed)
    report = pdit_normalization_check(spec, extensions)
    return {
        'dw_rate': dw_rate(gamma, paired_partition(spec.m),
                           party_labels(spec.m)),
        'normalization': to_json(report),
        'key_upper_bound': report.notes.get('key_upper_bound'),
        'passed': report.passed,
    }


def _key_dist(text):
    params = {}
    for item in filter(None, (s.strip() for s in text.split(','))):
        key, eq, value = item.partition('=')
        if not eq:
            raise UsageError(f'--key-dist: bad item "{item}"')
        params[key.strip()] = value.strip()
    try:
        m, d = int(params.pop('m')), int(params.pop('d'))
        eve_size = params.pop('eve_size', None)
        eve_size = int(eve_size) if eve_size else None
    except (KeyError, ValueError):
        raise UsageError('--key-dist needs integer m and d') from None
    eve_mode = params.pop('eve', 'independent')
    if params:
        raise UsageError(f'--key-dist: unknown keys {sorted(params)}')
    return ideal_key_dist(m, d, eve_mode, eve_size)


def run_intrinsic(cmd, env):
    o = cmd.options
    if o.get('key_dist'):
        dist = _key_dist(o['key_dist'])
    else:
        dist = read_distribution_csv(o['dist'])
    cfg = _optimizer(cmd, env)
    return {
        'intrinsic_info': to_json(intrinsic_info(dist, o['eve'], cfg,
                                                 eve_size=o['eve_size'])),
        's_arrow': to_json(s_arrow(dist, o['eve'], cfg,
                                   eve_size=o['eve_size'])),
    }


def run_suite(cmd, env):
    o = cmd.options
    return run_suites(o['samples'], _seed(cmd, env), o['tol'],
                      concurrent=env.concurrent and not o['sequential'])


def run_demo_lock(cmd, env):
    return lockability_demo(cmd.options['m'], cmd.options['d'])


RUNNERS = {
    'compute': run_compute,
    'squash': run_squash,
    'suite': run_suite,
    'flower': run_flower,
    'keybound': run_keybound,
    'intrinsic': run_intrinsic,
    'demo-lock': run_demo_lock,
}


def _suite_failed(result):
    return isinstance(result, list) and any(
        getattr(item, 'expected', None) is not None
        and item.report.passed != item.expected for item in result)


def render(result, fmt, verb):
    '''The text written to standard output.'''
    if fmt == 'json':
        return json.dumps(to_json(result), sort_keys=True, indent=2) + '\n'
    if fmt == 'table':
        if verb == 'flower':
            lines = flower_lines(result)
        elif verb == 'suite':
            lines = suite_lines(result)
        else:
            lines = rows_lines(*report_rows(_flat(result)))
        return '\n'.join(lines) + '\n'
    header, rows = report_rows(_flat(result))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _flat(result):
    # Nested reports are encoded as JSON text inside a single row
    if isinstance(result, dict):
        return {key: json.dumps(value, sort_keys=True)
                if isinstance(value, (dict, list)) else value
                for key, value in result.items()}
    return result


def run(cmd, env=None, out=None):
    '''Execute a command, writing its report to out.  Returns the exit
    code.'''
    if env is None:
        env = Env()
    if out is None:
        out = sys.stdout
    logger = class_logger(__name__, 'CLI')
    result = RUNNERS[cmd.verb](cmd, env)
    encoded = to_json(result)
    if not all_finite(encoded):
        logger.error(f'{cmd.verb} produced a non-finite value')
        out.write(json.dumps(encoded, sort_keys=True) + '\n')
        return EXIT_NONFINITE
    out.write(render(result, cmd.format or env.format, cmd.verb))
    if _suite_failed(result):
        logger.error('suite violations beyond tolerance')
        return EXIT_VIOLATION
    if isinstance(result, dict) and result.get('passed') is False:
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None, env=None, out=None):
    '''Parse and run a command line; returns the exit code.'''
    logger = class_logger(__name__, 'CLI')
    try:
        cmd = parse_args(sys.argv[1:] if argv is None else argv)
        return run(cmd, env, out)
    except UsageError as e:
        logger.error(f'usage: {e}')
        return EXIT_USAGE
    except INPUT_ERRORS as e:
        logger.error(f'{e.__class__.__name__}: {e}')
        return EXIT_USAGE
