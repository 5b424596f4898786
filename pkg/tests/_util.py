"""Small helpers shared by the test modules."""

import cmath
import math

PHI = (1 + 5**0.5) / 2


def polar(r, phi):
    return r * cmath.exp(1j * phi)


def normres(a, b):
    """Scale-free residual used throughout the suite."""
    a, b = complex(a), complex(b)
    return abs(a - b) / (1 + max(abs(a), abs(b)))


def relerr(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


TAU = 2 * math.pi
