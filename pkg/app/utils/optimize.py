import math
from typing import Callable

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


def golden_section_search(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float]:
    """
    Minimize a unimodal function on [a, b].

    Args:
        f: Scalar objective.
        a: Left end of the bracket.
        b: Right end of the bracket.
        tol: Stop once the bracket is narrower than this.
        max_iter: Hard cap on iterations.

    Returns:
        (x_min, f(x_min)).
    """
    c = b - (b - a) / GOLDEN_RATIO
    d = a + (b - a) / GOLDEN_RATIO
    fc, fd = f(c), f(d)

    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) / GOLDEN_RATIO
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) / GOLDEN_RATIO
            fd = f(d)

    x_min = (a + b) / 2
    return x_min, f(x_min)
