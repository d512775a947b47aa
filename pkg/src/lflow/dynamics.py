"""Escape-time dynamics of truncated L-series and related maps.

A map is iterated from a grid of pixel centers (escape_time_field) or
from a deterministic cloud of random seeds (estimate_escape_rate).  A
point escapes at the first iterate k <= K whose value exceeds the
radius R in modulus or is non-finite; overflow to inf/nan counts as
escape, never as an error.  Survivor counts S_0..S_K feed a
least-squares fit of ln S_k against k whose negated slope is the
escape rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericError
from .lseries import AnTable, eval_truncated_l_many
from .rng import unit_uniform_array

NEVER = 0
CUMULATIVE = "cumulative"
FINAL = "final"


class Window(NamedTuple):
    re_min: float
    re_max: float
    im_min: float
    im_max: float


DEFAULT_WINDOW = Window(-1.5, 4.5, 0.0, 12.0)


def _check_window(window) -> Window:
    w = Window(*map(float, window))
    if not (w.re_min < w.re_max and w.im_min < w.im_max):
        raise ValueError(f"degenerate window {w}")
    return w


class DirichletMap:
    """z -> sum_{n<=m} a_n n^(-z) for a coefficient table."""

    def __init__(self, table: AnTable):
        self.table = table

    def apply_many(self, z: np.ndarray) -> np.ndarray:
        return eval_truncated_l_many(self.table, z)

    def __repr__(self):
        return f"DirichletMap({self.table.label or self.table.m})"


class PolynomialMap:
    """z -> c_0 + c_1 z + ... + c_d z^d, coefficients ascending."""

    def __init__(self, coefficients):
        self.coefficients = tuple(complex(c) for c in coefficients)
        if not self.coefficients:
            raise ValueError("polynomial needs at least one coefficient")

    def apply_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(all="ignore"):
            acc = np.full(z.shape, self.coefficients[-1], dtype=np.complex128)
            for c in reversed(self.coefficients[:-1]):
                acc = acc * z + c
        return acc

    def __repr__(self):
        return f"PolynomialMap(degree={len(self.coefficients) - 1})"


class ScaledExpMap:
    """z -> lam * exp(z)."""

    def __init__(self, lam: complex):
        self.lam = complex(lam)

    def apply_many(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return self.lam * np.exp(np.asarray(z, dtype=np.complex128))

    def __repr__(self):
        return f"ScaledExpMap({self.lam})"


def apply_map(spec, z: complex) -> complex:
    """Scalar application, bit-identical to the vector path."""
    return complex(spec.apply_many(np.array([z], dtype=np.complex128))[0])


def _escaped(z: np.ndarray, radius: float) -> np.ndarray:
    bad = ~np.isfinite(z.real) | ~np.isfinite(z.imag)
    with np.errstate(invalid="ignore"):
        out = bad | (np.abs(z) > radius)
    return out


def _iterate_cumulative(spec, z0: np.ndarray, radius: float, iterations: int):
    """Returns (escape iterate per seed with 0 = never, survivors S_0..S_K)."""
    z = z0.astype(np.complex128, copy=True)
    alive = np.arange(z0.size)
    escape = np.zeros(z0.size, dtype=np.int32)
    survivors = [z0.size]
    for k in range(1, iterations + 1):
        if alive.size:
            z[alive] = spec.apply_many(z[alive])
            gone = _escaped(z[alive], radius)
            escape[alive[gone]] = k
            alive = alive[~gone]
        survivors.append(int(alive.size))
    return escape, survivors


def escape_iterate(spec, z0: complex, radius: float, iterations: int, mode: str = CUMULATIVE) -> int:
    """Smallest k <= iterations with |z_k| > radius (or non-finite z_k);
    NEVER (= 0) if the orbit stays bounded.  mode=FINAL tests only the
    last iterate."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    z = np.array([z0], dtype=np.complex128)
    if mode == CUMULATIVE:
        escape, _ = _iterate_cumulative(spec, z, radius, iterations)
        return int(escape[0])
    if mode == FINAL:
        for _ in range(iterations):
            z = spec.apply_many(z)
        return iterations if bool(_escaped(z, radius)[0]) else NEVER
    raise ValueError(f"unknown escape mode {mode!r}")


@dataclass(frozen=True)
class EscapeField:
    values: np.ndarray  # shape (height, width), entries in {NEVER, 1..K}
    window: Window
    radius: float
    iterations: int

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def escape_time_field(
    spec, window, width: int, height: int, radius: float, iterations: int, mode: str = CUMULATIVE
) -> EscapeField:
    """Escape iterate per pixel.  Pixel (i, j) seeds at the cell center
    re_min + (i+0.5)*dre/width + 1j*(im_max - (j+0.5)*dim/height), so
    row 0 sits at the top of the window."""
    w = _check_window(window)
    if width < 1 or height < 1:
        raise ValueError("field dimensions must be positive")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    cols = w.re_min + (np.arange(width, dtype=np.float64) + 0.5) * (w.re_max - w.re_min) / width
    rows = w.im_max - (np.arange(height, dtype=np.float64) + 0.5) * (w.im_max - w.im_min) / height
    z0 = (cols[np.newaxis, :] + 1j * rows[:, np.newaxis]).ravel()
    if mode == CUMULATIVE:
        escape, _ = _iterate_cumulative(spec, z0, radius, iterations)
    elif mode == FINAL:
        z = z0.astype(np.complex128, copy=True)
        for _ in range(iterations):
            z = spec.apply_many(z)
        escape = np.where(_escaped(z, radius), np.int32(iterations), np.int32(NEVER))
    else:
        raise ValueError(f"unknown escape mode {mode!r}")
    values = escape.reshape(height, width).astype(np.int32)
    values.setflags(write=False)
    return EscapeField(values, w, float(radius), int(iterations))


def fit_decay(survivors) -> tuple[float, float]:
    """(escape rate, r_squared) from survivor counts S_0..S_K.

    Least squares on {(k, ln S_k) : 1 <= k <= K, S_k > 0}, rate = -slope.
    S_K = S_0 means nothing escaped: rate exactly 0.  S_1 = 0 means
    everything escaped immediately: rate +inf.  With fewer than two
    positive points the endpoint formula ln(S_0/S_k*)/k* is used.
    """
    s = [int(x) for x in survivors]
    if len(s) < 2:
        raise ValueError("need survivor counts S_0..S_K with K >= 1")
    if s[0] <= 0:
        raise ValueError("S_0 must be positive")
    for prev, cur in zip(s, s[1:]):
        if cur < 0 or cur > prev:
            raise ValueError(f"survivor counts must be nonincreasing and nonnegative: {s}")
    if s[-1] == s[0]:
        return 0.0, 1.0
    if s[1] == 0:
        return math.inf, 1.0
    points = [(k, math.log(s[k])) for k in range(1, len(s)) if s[k] > 0]
    if len(points) < 2:
        k_star, _ = points[0]
        return math.log(s[0] / s[k_star]) / k_star, 1.0
    n = len(points)
    mean_k = sum(k for k, _ in points) / n
    mean_y = sum(y for _, y in points) / n
    sxx = sum((k - mean_k) ** 2 for k, _ in points)
    sxy = sum((k - mean_k) * (y - mean_y) for k, y in points)
    syy = sum((y - mean_y) ** 2 for _, y in points)
    slope = sxy / sxx
    if syy == 0.0:
        return (0.0 if slope == 0.0 else -slope), 1.0
    r_squared = min(1.0, (sxy * sxy) / (sxx * syy))
    return (0.0 if slope == 0.0 else -slope), r_squared


class RateParams(NamedTuple):
    window: Window
    n_seeds: int
    radius: float
    iterations: int
    master_seed: int


@dataclass(frozen=True)
class EscapeRateEstimate:
    tau: float
    survivors: tuple[int, ...]
    r_squared: float
    params: RateParams


def seed_cloud(window, n_seeds: int, master_seed: int) -> np.ndarray:
    """Deterministic seed cloud: seed i uses counters 2i and 2i+1."""
    w = _check_window(window)
    u = unit_uniform_array(master_seed, 0, 2 * n_seeds)
    ux, uy = u[0::2], u[1::2]
    return (w.re_min + ux * (w.re_max - w.re_min)) + 1j * (w.im_min + uy * (w.im_max - w.im_min))


def estimate_escape_rate(
    spec, window, n_seeds: int, radius: float, iterations: int, master_seed: int
) -> EscapeRateEstimate:
    """Escape rate of a map over a window from n_seeds random seeds."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    w = _check_window(window)
    z0 = seed_cloud(w, n_seeds, master_seed)
    _, survivors = _iterate_cumulative(spec, z0, radius, iterations)
    tau, r_squared = fit_decay(survivors)
    return EscapeRateEstimate(
        tau=tau,
        survivors=tuple(survivors),
        r_squared=r_squared,
        params=RateParams(w, int(n_seeds), float(radius), int(iterations), int(master_seed)),
    )
