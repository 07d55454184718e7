"""Independent oracles shared by the test modules."""

import mpmath as mp
import numpy as np


def mp_airy_all(z, dps=None):
    """Oracle ``(Ai, Ai', Ai(1, z), Ai(2, z))`` from mpmath.

    ``Ai(1, z) = int_0^z Ai - 1/3`` and ``Ai(2, z) = z Ai(1, z) - Ai'(z)`` are the
    primitives vanishing at +infinity.  The primitive loses about
    ``|z|^{3/2}`` digits to cancellation, so the working precision grows with it.
    """
    if dps is None:
        dps = 40 + int(abs(complex(z)) ** 1.5)
    with mp.workdps(dps):
        zm = mp.mpc(complex(z))
        ai = mp.airyai(zm)
        aip = mp.airyai(zm, 1)
        a1 = mp.airyai(zm, -1) - mp.mpf(1) / 3
        a2 = zm * a1 - aip
        return tuple(complex(v) for v in (ai, aip, a1, a2))


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
