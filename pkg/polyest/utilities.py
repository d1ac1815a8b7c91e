################################################################################
#
# utilities.py 		polyest
#
# Utility functions used throughout polyest: errors, argument parser,
# partition/multi-index combinatorics, log-domain special functions,
# seed splitting and number formatting.
################################################################################

import argparse
import math
import os
import sys

import numpy as np
from scipy.special import gammaln


###############################################################################
# Errors
###############################################################################

class PolyestError(Exception):
	"""Root of all errors raised by polyest."""


class InputRejected(PolyestError, ValueError):
	"""A precondition of an operation is violated."""


class CapExceeded(InputRejected):
	"""An oracle or evaluation-cost cap is exceeded."""


class SeriesDivergence(PolyestError, ArithmeticError):
	"""Partial sums of a power series are not Cauchy within budget."""


class UsageError(PolyestError):
	"""Malformed command line or config file input."""


###############################################################################
# Partitions and multi-indices
###############################################################################

def multi_indices(m, d):
	"""
	All multi-indices alpha of length d with |alpha| = m, in
	lexicographically decreasing order (x1^m first).
	"""
	if d == 1:
		yield (m,)
		return
	for first in range(m, -1, -1):
		for rest in multi_indices(m - first, d - 1):
			yield (first,) + rest


def bounded_compositions(total, bounds):
	"""
	All tuples gamma with 0 <= gamma_i <= bounds[i] and sum(gamma) = total.
	"""
	if len(bounds) == 0:
		if total == 0:
			yield ()
		return
	remaining = sum(bounds[1:])
	low = max(0, total - remaining)
	high = min(bounds[0], total)
	for g in range(low, high + 1):
		for rest in bounded_compositions(total - g, bounds[1:]):
			yield (g,) + rest


def integer_partitions(m, max_parts=None, exact_parts=None, largest=None):
	"""
	Partitions of m as non-increasing tuples of positive integers.

	Parameters:
	-----------
	m: int
		integer to partition (m >= 1)
	max_parts: int
		only partitions with at most this many parts
	exact_parts: int
		only partitions with exactly this many parts
	largest: int
		upper limit for the largest part (used by the recursion)
	"""
	if largest is None:
		largest = m
	if max_parts is None:
		max_parts = m
	if exact_parts is not None:
		max_parts = min(max_parts, exact_parts)
	if m == 0:
		if exact_parts is None or exact_parts == 0:
			yield ()
		return
	if max_parts == 0:
		return
	for first in range(min(m, largest), 0, -1):
		sub_exact = None if exact_parts is None else exact_parts - 1
		for rest in integer_partitions(m - first, max_parts - 1, sub_exact, first):
			yield (first,) + rest


def blocks(parts):
	"""Slot ranges [start, stop) of each part when the parts are laid out in order."""
	offsets = np.concatenate(([0], np.cumsum(parts)))
	return [(int(offsets[i]), int(offsets[i + 1])) for i in range(len(parts))]


###############################################################################
# Log-domain special functions
###############################################################################

def log_factorial(k):
	return float(gammaln(k + 1.0))


def log_binomial(n, k):
	if k < 0 or k > n:
		return -np.inf
	return float(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))


def binomial_weight(n, k):
	"""
	C(n, k) as a float: exact integer arithmetic up to n = 170,
	log-domain above (where factorials overflow double precision).
	"""
	if k < 0 or k > n:
		return 0.0
	if n <= 170:
		return float(math.comb(n, k))
	return math.exp(log_binomial(n, k))


def xlogx(k):
	"""k*ln(k) with the convention 0*ln(0) = 0."""
	return 0.0 if k == 0 else k * math.log(k)


###############################################################################
# Seeds and formatting
###############################################################################

def restart_rng(seed, *counter):
	"""
	Counter-based random stream: identical (seed, counter) pairs give
	identical streams regardless of which thread asks for them.
	"""
	return np.random.default_rng(np.random.SeedSequence(int(seed),
									spawn_key=tuple(int(c) for c in counter)))


def derive_seed(seed, *counter):
	"""Integer seed of the child stream (seed, counter)."""
	state = np.random.SeedSequence(int(seed), spawn_key=tuple(int(c) for c in counter))
	return int(state.generate_state(1, dtype=np.uint64)[0])


def format_number(x):
	"""Shortest round-trip decimal rendering of a number."""
	if x is None:
		return 'overflow'
	if isinstance(x, (bool, np.bool_)):
		return str(bool(x)).lower()
	if isinstance(x, (int, np.integer)):
		return str(int(x))
	x = float(x)
	if math.isinf(x):
		return 'inf' if x > 0 else '-inf'
	return repr(x)


def parse_vector(text):
	"""Parse '0.3,0.1' into a float array; raises UsageError."""
	try:
		return np.array([float(t) for t in text.split(',') if t.strip() != ''])
	except ValueError:
		raise UsageError('Cannot parse vector: %s' % text)


def parse_int_range(text):
	"""
	Parse '2..5', '2-5', '3' or '2,4,7' into a list of ints;
	raises UsageError on malformed or empty ranges.
	"""
	text = text.strip()
	try:
		for sep in ('..', '-'):
			if sep in text:
				a, b = text.split(sep)
				values = list(range(int(a), int(b) + 1))
				break
		else:
			values = [int(t) for t in text.split(',') if t.strip() != '']
	except ValueError:
		raise UsageError('Malformed integer range: %s' % text)
	if len(values) == 0:
		raise UsageError('Empty integer range: %s' % text)
	return values


def parse_p(text):
	"""Parse an l_p exponent: a float >= 1 or 'inf'."""
	if text.strip().lower() in ('inf', 'infinity', 'oo'):
		return np.inf
	try:
		p = float(text)
	except ValueError:
		raise UsageError('Malformed p value: %s' % text)
	if not p >= 1:
		raise UsageError('p must satisfy 1 <= p <= inf, got %s' % text)
	return p


###############################################################################
# Others
###############################################################################

def printline():
	print('---------------------------------------------------------------------')


def get_polyest_Dir():
	return os.path.dirname(os.path.realpath(__file__))


class MyParser(argparse.ArgumentParser):
	def error(self, message):
		sys.stderr.write('error: %s\n' % message)
		self.print_help(sys.stderr)
		sys.exit(2)
