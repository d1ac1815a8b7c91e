import unittest
import os
import shutil
import tempfile

from polyest.config import Caps, RunConfig
from polyest.scripts.pe_write_config import WritePolyestConfig
from polyest.utilities import UsageError, get_polyest_Dir

"""
TEST CASE 1: stock config file

The stock config file at polyest/data/example/polyest_config.dat
should contain the following:

seed 42
budget 64
format csv
threads 2
caps 8 6 24 4000000
"""

class TCConfigFile(unittest.TestCase):

    def setUp(self):
        code_path = get_polyest_Dir()
        # read example config file
        self.config_ex = code_path + '/data/example/polyest_config.dat'
        self.config = RunConfig.from_file(self.config_ex)
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        try:
            shutil.rmtree(self.tmpdir)
        except OSError as oserr:
            print(oserr)

    def write(self, text):
        fname = os.path.join(self.tmpdir, 'config.dat')
        with open(fname, 'w') as f:
            f.write(text)
        return fname

    def test_config_file_exists(self):
        self.assertTrue(os.path.isfile(self.config_ex))

    def test_example_params(self):
        self.assertEqual(self.config.seed, 42)
        self.assertEqual(self.config.budget, 64)
        self.assertEqual(self.config.format, 'csv')
        self.assertEqual(self.config.threads, 2)
        self.assertEqual(self.config.caps, Caps())
        self.assertEqual(self.config.config_fname, self.config_ex)

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual((config.seed, config.budget, config.format, config.threads),
                         (42, 256, 'csv', 1))
        self.assertFalse(config.caps.override)

    def test_comments_and_aliases(self):
        fname = self.write('# comment\n! another\n\nrestarts 10\noutput JSON\n'
                           'nthreads 3\noverride_caps\n')
        config = RunConfig.from_file(fname)
        self.assertEqual(config.budget, 10)
        self.assertEqual(config.format, 'json')
        self.assertEqual(config.threads, 3)
        self.assertTrue(config.caps.override)

    def test_rejects(self):
        with self.assertRaises(UsageError):
            RunConfig.from_file(self.write('colour blue\n'))
        with self.assertRaises(UsageError):
            RunConfig.from_file(self.write('seed\n'))
        with self.assertRaises(UsageError):
            RunConfig.from_file(self.write('caps 1 2 3\n'))
        with self.assertRaises(UsageError):
            RunConfig.from_file(os.path.join(self.tmpdir, 'missing.dat'))
        with self.assertRaises(UsageError):
            RunConfig(seed=-1)
        with self.assertRaises(UsageError):
            RunConfig(format='xml')
        with self.assertRaises(UsageError):
            RunConfig(budget=0)

    def test_flags_override(self):
        config = self.config.updated(seed=7, budget=None, override_caps=True)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.budget, 64)
        self.assertTrue(config.caps.override)
        self.assertFalse(self.config.caps.override)
        with self.assertRaises(UsageError):
            self.config.updated(threads=0)

    def test_writer(self):
        writer = WritePolyestConfig(self.tmpdir)
        writer.budget = 128
        fname = writer.print_to_file()
        config = RunConfig.from_file(fname)
        self.assertEqual(config.budget, 128)
        self.assertEqual(config.seed, 42)
        self.assertEqual(config.caps, Caps())


if __name__ == '__main__':
    unittest.main()
