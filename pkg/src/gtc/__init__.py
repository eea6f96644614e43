"""Group-theoretic cryptography toolkit.

Words and platform groups, a Tietze-transformation engine with tracked
isomorphisms, seedable key-exchange protocol simulations, word-problem
and homomorphic encryption schemes, attack reductions, and brute-force
deciders for the underlying algorithmic problems.
"""

__version__ = "0.1.0"
