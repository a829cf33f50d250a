"""Real roots of real cubics (trigonometric / Cardano form plus Newton polish)."""

from __future__ import annotations

import math

__all__ = ["real_cubic_roots", "cubic_residual"]


def _horner(coeffs, y):
    a, b, c, d = coeffs
    p = ((a * y + b) * y + c) * y + d
    dp = (3.0 * a * y + 2.0 * b) * y + c
    return p, dp


def cubic_residual(coeffs, y) -> float:
    """Residual of ``coeffs`` at ``y`` relative to the size of its terms."""
    a, b, c, d = coeffs
    p, _ = _horner(coeffs, y)
    scale = abs(a * y * y * y) + abs(b * y * y) + abs(c * y) + abs(d)
    return abs(p) / scale if scale > 0 else abs(p)


def _polish(coeffs, y, steps=8):
    best = y
    best_res = cubic_residual(coeffs, y)
    for _ in range(steps):
        if best_res == 0.0:
            break
        p, dp = _horner(coeffs, best)
        if dp == 0.0:
            break
        cand = best - p / dp
        res = cubic_residual(coeffs, cand)
        if res >= best_res:
            break
        best, best_res = cand, res
    return best


def real_cubic_roots(a, b, c, d):
    """Sorted real roots of ``a y^3 + b y^2 + c y + d = 0`` with ``a != 0``.

    Repeated roots are returned with their multiplicity when the discriminant
    is resolvably zero; otherwise nearly-coincident pairs may be reported as
    one real root (numerically indistinguishable).
    """
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    B, C, D = b / a, c / a, d / a
    # y = scale * z keeps the monic coefficients in [-1, 1] and avoids overflow
    scale = max(abs(B), math.sqrt(abs(C)), abs(D) ** (1.0 / 3.0))
    if scale == 0.0:
        return [0.0, 0.0, 0.0]
    B, C, D = B / scale, C / scale / scale, D / scale / scale / scale
    shift = B / 3.0
    p = C - B * B / 3.0
    q = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    size = (q / 2.0) ** 2 + abs(p / 3.0) ** 3
    if p == 0.0 and q == 0.0:
        ts = [0.0, 0.0, 0.0]
    elif disc > 1e-14 * size:
        s = math.sqrt(disc)
        u = -q / 2.0 + s
        v = -q / 2.0 - s
        ts = [math.copysign(abs(u) ** (1.0 / 3.0), u) + math.copysign(abs(v) ** (1.0 / 3.0), v)]
    elif p >= 0.0:
        # disc ~ 0 with p ~ 0: triple root
        ts = [0.0, 0.0, 0.0]
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        phi = math.acos(max(-1.0, min(1.0, arg)))
        ts = [r * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0) for k in range(3)]
    monic = (1.0, B, C, D)
    return sorted(_polish(monic, t - shift) * scale for t in ts)
