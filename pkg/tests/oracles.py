"""Independent reference constructions used by several test modules."""

import itertools

import numpy as np
import scipy.linalg


def position_space_half(sides, parity):
    """Dense staggered half-Hamiltonian straight from its site-by-site hopping rule.

    odd:  H_o|x> = -(i/2) sum_j (-1)^(x_1+..+x_j) |x + (-1)^x_j e_j>
    even: H_e|x> = +(i/2) sum_j (-1)^(x_1+..+x_j) |x - (-1)^x_j e_j>
    """
    sign = 1 if parity == "odd" else -1
    n = int(np.prod(sides))
    h = np.zeros((n, n), dtype=complex)
    for x in itertools.product(*(range(L) for L in sides)):
        i = np.ravel_multi_index(x, sides)
        for j in range(len(sides)):
            stag = (-1) ** sum(x[: j + 1])
            y = list(x)
            y[j] = (y[j] + sign * (-1) ** x[j]) % sides[j]
            h[np.ravel_multi_index(y, sides), i] += -sign * 0.5j * stag
    return h


def dense_walk_expm(sides, theta):
    """``expm(-i a H_e) expm(-i a H_o)`` with ``a = theta * 2 / sqrt(d)``."""
    a = theta * 2 / np.sqrt(len(sides))
    ho = position_space_half(sides, "odd")
    he = position_space_half(sides, "even")
    return scipy.linalg.expm(-1j * a * he) @ scipy.linalg.expm(-1j * a * ho)
