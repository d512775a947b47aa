"""Formal group expansion of a Weierstrass curve at the origin.

Solving w = z^3 + a1*z*w + a2*z^2*w + a3*w^2 + a4*z*w^2 + a6*w^3 by
fixed-point iteration in Z[[z]] truncated at degree 9 gives
w(z) = z^3 (1 + A1 z + ... + A6 z^6) with exact integer coefficients.
The degree-9 truncation x^3 + A1 x^4 + ... + A6 x^9 is the nonic used
as a polynomial dynamical system.
"""

from __future__ import annotations

from .errors import NumericError

_DEG = 9


def _mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (_DEG + 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, qj in enumerate(q):
            if i + j > _DEG:
                break
            out[i + j] += pi * qj
    return out


def _shift(p: list[int], k: int) -> list[int]:
    return ([0] * k + p)[: _DEG + 1]


def _scale(p: list[int], c: int) -> list[int]:
    return [c * x for x in p]


def _add(*polys: list[int]) -> list[int]:
    out = [0] * (_DEG + 1)
    for p in polys:
        for i, x in enumerate(p):
            out[i] += x
    return out


def _relation_rhs(a: tuple[int, int, int, int, int], w: list[int]) -> list[int]:
    a1, a2, a3, a4, a6 = a
    w2 = _mul(w, w)
    w3 = _mul(w2, w)
    z3 = [0] * (_DEG + 1)
    z3[3] = 1
    return _add(
        z3,
        _scale(_shift(w, 1), a1),
        _scale(_shift(w, 2), a2),
        _scale(w2, a3),
        _scale(_shift(w2, 1), a4),
        _scale(w3, a6),
    )


def expand_formal_group(a: tuple[int, int, int, int, int]) -> tuple[int, ...]:
    """(A1, ..., A6) with w(z) = z^3 (1 + A1 z + ... + A6 z^6).

    The iteration must reach its fixed point within 9 rounds; anything
    else indicates a broken truncation and raises.
    """
    w = [0] * (_DEG + 1)
    for _ in range(_DEG):
        new = _relation_rhs(a, w)
        if new == w:
            if w[:3] != [0, 0, 0] or w[3] != 1:
                raise NumericError("formal expansion lost its leading z^3 term")
            return tuple(w[4:])
        w = new
    raise NumericError("formal group expansion did not converge within 9 iterations")


def defining_relation_residual(
    a: tuple[int, int, int, int, int], expansion: tuple[int, ...]
) -> tuple[int, ...]:
    """Coefficients of RHS(w) - w through degree 9; all zero iff the
    expansion satisfies the defining relation."""
    w = [0, 0, 0, 1, *expansion][: _DEG + 1]
    w += [0] * (_DEG + 1 - len(w))
    rhs = _relation_rhs(a, w)
    return tuple(r - x for r, x in zip(rhs, w))


def nonic_polynomial(a: tuple[int, int, int, int, int]) -> list[complex]:
    """Ascending coefficients of x^3 + A1 x^4 + ... + A6 x^9, length 10."""
    expansion = expand_formal_group(a)
    return [0j, 0j, 0j, 1 + 0j, *(complex(c) for c in expansion)]


def nonic_integer_coefficients(a: tuple[int, int, int, int, int]) -> list[int]:
    """Same polynomial with exact integer coefficients (for printing)."""
    return [0, 0, 0, 1, *expand_formal_group(a)]
