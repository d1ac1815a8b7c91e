################################################################################
#
# config.py 		polyest
#
# Read in and define the run parameters (seed, restart budget, output
# format, threads and oracle caps) from a config file; see
# ./scripts/pe_write_config.py for producing a config file,
# or the example in ./data/example/
################################################################################

import logging
import os
from dataclasses import dataclass, field, replace

from polyest.utilities import UsageError

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')


@dataclass(frozen=True)
class Caps:
    """
    Cost limits of the oracles and of the polarization sum.

    Attributes:
    -----------
    oracle_max_degree: int
        largest m accepted by the dense tensor oracle
    oracle_max_dim: int
        largest d accepted by the dense tensor oracle
    polarize_max_degree: int
        largest m for the 2^m sign-pattern sum
    grid_max_points: int
        largest mesh accepted by the grid norm oracle
    override: bool
        lift polarize_max_degree
    """
    oracle_max_degree: int = 8
    oracle_max_dim: int = 6
    polarize_max_degree: int = 24
    grid_max_points: int = 4000000
    override: bool = False


@dataclass
class RunConfig:
    """
    Effective run configuration: config-file values overridden by
    command-line flags. Identical RunConfig and inputs give
    byte-identical output.
    """
    seed: int = 42
    budget: int = 256
    format: str = 'csv'
    threads: int = 1
    caps: Caps = field(default_factory=Caps)
    config_fname: str = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 0 <= int(self.seed) < 2**64:
            raise UsageError('seed must be a 64-bit nonnegative integer, got %s' % self.seed)
        if int(self.budget) < 1:
            raise UsageError('budget must be >= 1, got %s' % self.budget)
        if self.format not in FORMATS:
            raise UsageError('format must be one of %s, got %s' % (FORMATS, self.format))
        if int(self.threads) < 1:
            raise UsageError('threads must be >= 1, got %s' % self.threads)
        caps = self.caps
        if min(caps.oracle_max_degree, caps.oracle_max_dim,
               caps.polarize_max_degree, caps.grid_max_points) < 1:
            raise UsageError('caps must be positive, got %s' % (caps,))

    @classmethod
    def from_file(cls, config_fname):
        """
        Parse `keyword value ...` lines; empty lines and lines starting
        with `#` or `!` are skipped.
        """
        if not os.path.isfile(config_fname):
            raise UsageError('Config file not found: %s' % config_fname)

        # Read and filter empty lines
        with open(config_fname) as f:
            all_lines = [line.strip() for line in f if line.strip()]

        # Remove commented lines
        lines = [line for line in all_lines
                 if not line.startswith('#') and not line.startswith('!')]

        values = {'config_fname': config_fname}
        caps = Caps()
        for line in lines:
            words = line.split()
            keyword, args = words[0].lower(), words[1:]
            try:
                if keyword == 'seed':
                    values['seed'] = int(args[0])
                elif keyword in ('budget', 'restarts'):
                    values['budget'] = int(args[0])
                elif keyword in ('format', 'output'):
                    values['format'] = args[0].lower()
                elif keyword in ('threads', 'nthreads'):
                    values['threads'] = int(args[0])
                elif keyword == 'caps':
                    if len(args) != 4:
                        raise UsageError('caps needs 4 values: oracle_degree oracle_dim '
                                         'polarize_degree grid_points')
                    caps = replace(caps, oracle_max_degree=int(args[0]),
                                   oracle_max_dim=int(args[1]),
                                   polarize_max_degree=int(args[2]),
                                   grid_max_points=int(float(args[3])))
                elif keyword == 'override_caps':
                    caps = replace(caps, override=True)
                else:
                    raise UsageError('Unknown keyword in %s: %s' % (config_fname, keyword))
            except (IndexError, ValueError):
                raise UsageError('Malformed line in %s: %s' % (config_fname, line))
        values['caps'] = caps
        return cls(**values)

    def updated(self, **flags):
        """Copy with command-line flags applied; None means not given."""
        flags = {k: v for k, v in flags.items() if v is not None}
        if flags.pop('override_caps', False):
            flags['caps'] = replace(flags.get('caps', self.caps), override=True)
        return replace(self, **flags)

    def print_config_params(self):
        logger.info('Config file: %s', self.config_fname or '(defaults)')
        logger.info('Seed: %d', self.seed)
        logger.info('Restart budget: %d', self.budget)
        logger.info('Output format: %s', self.format)
        logger.info('Threads: %d', self.threads)
        logger.info('Caps: oracle m <= %d, oracle d <= %d, polarize m <= %d%s, grid <= %d points',
                    self.caps.oracle_max_degree, self.caps.oracle_max_dim,
                    self.caps.polarize_max_degree,
                    ' (override)' if self.caps.override else '',
                    self.caps.grid_max_points)
