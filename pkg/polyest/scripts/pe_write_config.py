################################################################################
#
# pe_write_config.py 		polyest
#
# Script to aid writing a config file for polyest runs.
# Use either automatic for writing a default one or interactive to make your own
################################################################################

import os
import sys

from polyest.config import FORMATS, Caps
from polyest.utilities import MyParser


class WritePolyestConfig:

    def __init__(self, config_path='.'):
        self.config_path = config_path
        self.seed = 42
        self.budget = 256
        self.format = 'csv'
        self.threads = 1

        caps = Caps()
        self.oracle_max_degree = caps.oracle_max_degree
        self.oracle_max_dim = caps.oracle_max_dim
        self.polarize_max_degree = caps.polarize_max_degree
        self.grid_max_points = caps.grid_max_points
        self.override_caps = False

    def _ask(self, prompt, default, cast):
        answer = input('%s [%s]: ' % (prompt, default)).strip()
        if answer == '':
            return default
        try:
            return cast(answer)
        except ValueError:
            print('Cannot parse %s; keeping %s' % (answer, default))
            return default

    def interactive_var(self):
        print('Press Enter for default values.')
        self.seed = self._ask('Seed', self.seed, int)
        self.budget = self._ask('Random restarts per estimate', self.budget, int)
        self.format = self._ask('Output format (%s)' % ', '.join(FORMATS), self.format, str)
        self.threads = self._ask('Number of threads', self.threads, int)

        print('\nNow enter the caps..')
        self.oracle_max_degree = self._ask('Oracle max degree', self.oracle_max_degree, int)
        self.oracle_max_dim = self._ask('Oracle max dimension', self.oracle_max_dim, int)
        self.polarize_max_degree = self._ask('Polarization max degree',
                                             self.polarize_max_degree, int)
        self.grid_max_points = self._ask('Grid max points', self.grid_max_points, int)
        self.override_caps = self._ask('Override caps (y/n)', 'n', str).lower() == 'y'

    def print_to_file(self, interactive_write=False):

        if interactive_write:
            self.interactive_var()

        if not os.path.isdir(self.config_path):
            os.mkdir(self.config_path)

        self.config_fname = os.path.join(self.config_path, 'polyest_config.dat')
        with open(self.config_fname, 'w') as f:
            f.write('# polyest run parameters\n')
            f.write('seed %d\n' % self.seed)
            f.write('budget %d\n' % self.budget)
            f.write('format %s\n' % self.format)
            f.write('threads %d\n' % self.threads)
            f.write('! oracle_degree oracle_dim polarize_degree grid_points\n')
            f.write('caps %d %d %d %d\n' % (self.oracle_max_degree, self.oracle_max_dim,
                                            self.polarize_max_degree, self.grid_max_points))
            if self.override_caps:
                f.write('override_caps\n')

        print('Written config file: %s\n' % self.config_fname)
        return self.config_fname


def main():

    config_writer = WritePolyestConfig()

    parser = MyParser()
    parser.add_argument("-a", "--auto", help="write default config file",
                        action="store_true")
    parser.add_argument("-i", "--interactive", help="write config file based on user input",
                        action="store_true")

    if len(sys.argv) == 1:
        parser.print_help(sys.stderr)
        sys.exit(1)

    args = parser.parse_args()

    if args.auto:
        config_writer.print_to_file()
    elif args.interactive:
        config_writer.print_to_file(interactive_write=True)


if __name__ == '__main__':
    sys.exit(main() or 0)
