"""
Haar unitaries and matrix permanents
====================================

Every probability in a boson-sampling experiment is the squared modulus of a
permanent of an N x N block of the interferometer unitary.  This script draws
a Haar unitary, extracts one block and evaluates its permanent two ways.
"""

import time

import numpy as np

from boson_owf import haar_random_unitary, permanent_naive, permanent_ryser, submatrix

###############################################################################
# A seeded 26-mode unitary.  The same seed always gives the same matrix, and
# the checksum is what gets written next to it on disk.
U = haar_random_unitary(26, seed=1)
print(f"M={U.M}  unitarity defect={U.unitarity_defect:.1e}  checksum={U.checksum()[:16]}...")

###############################################################################
# Three photons enter ports (0, 5, 9) and leave through (2, 3, 20).  Rows of
# the block are output ports, columns are input ports.
block = submatrix(U, (0, 5, 9), (2, 3, 20))
per = permanent_ryser(block)
print(f"Per = {per:.6f}   |Per|^2 = {abs(per) ** 2:.3e}")
print(f"naive expansion agrees: {np.isclose(per, permanent_naive(block))}")

###############################################################################
# Ryser's formula also takes stacks of matrices, which is how whole output
# distributions are enumerated.
rng = np.random.default_rng(0)
for n in (4, 8, 12, 16):
    stack = rng.standard_normal((64, n, n)) + 1j * rng.standard_normal((64, n, n))
    t = time.perf_counter()
    permanent_ryser(stack)
    print(f"N={n:2d}: 64 permanents in {1e3 * (time.perf_counter() - t):7.1f} ms")
