"""Independent reference implementations used only by the tests.

These deliberately avoid the code paths of the package under test: the
matrix exponential is a plain scaled Taylor summation, and the squeezer
forms are textbook closed formulas.
"""

import numpy as np


def taylor_expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaled power-series summation.

    Scales the input so its 1-norm is below 1/2, sums the Taylor series
    to machine precision, and squares back.  Slow and simple; used as the
    oracle for the package's exponential.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = 0
    while norm > 0.5:
        norm /= 2.0
        squarings += 1
    scaled = a / (2.0 ** squarings)
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ scaled / k
        result = result + term
        if np.max(np.abs(term)) < 1e-20:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def squeezer_matrix(g: float) -> np.ndarray:
    """Transfer matrix of a single two-mode squeezer on (s1, i1).

    Closed form for the continuous device with only the first converter
    active: ``A_s1_out = cosh(g) A_s1 + i sinh(g) A_i1^+``.
    """
    m = np.eye(4, dtype=complex)
    m[0, 0] = np.cosh(g)
    m[0, 2] = 1j * np.sinh(g)
    m[2, 0] = -1j * np.sinh(g)
    m[2, 2] = np.cosh(g)
    return m
