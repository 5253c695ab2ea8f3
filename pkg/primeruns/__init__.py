# primeruns
#
# Arithmetic functions at consecutive primes: exhaustive run searches,
# admissible tuples and residue selections, multidimensional sieve weights,
# lower bounds for M_k and digit-sum constructions. See README.md.

__version__ = "0.1.0"
