import numpy as np


def effective_interference(a, b, c):
    """I(a, b, c) = ab / (b + ac): the large-system interference an interferer with received power a
    causes to a user with received power b at SINR c behind an MMSE receiver."""
    a = np.asarray(a, dtype=float)
    return a * b / (b + a * c)
