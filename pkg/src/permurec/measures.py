"""Positive measures on the dyadic grid of the unit square.

A measure lives on a ``2**depth x 2**depth`` grid of axis-parallel
cells. Cell ``(i, j)`` covers ``[i*s, (i+1)*s] x [j*s, (j+1)*s]`` with
``s = 2**-depth``, so ``i`` runs along x and ``j`` along y. Three
constructions are supported:

* ``lebesgue``: constant mass ``4**-depth`` per cell.
* ``cascade``: dyadic multiplicative cascade. Each refinement level
  draws independent unit-mean lognormal weights; a cell's raw mass is
  the product of its ancestors' weights times the Lebesgue mass, and
  the grid is then normalised to total mass one. The per-level log
  weights are kept on the measure so that downstream field recovery can
  be compared against what was actually planted.
* ``exp-field``: exponential of a mean-zero Gaussian field with an
  approximately logarithmic correlation structure, synthesised
  spectrally on the torus (power spectrum ``1/|k|**2``) and truncated
  at the grid scale. The coupling constant ``rho = -cos(pi*gamma**2/4)``
  of the associated curve pair is recorded in the metadata.

All randomness comes from the generator handed in (or built from the
seed argument), and the draw order is fixed: cascades draw one standard
normal block per level, coarse to fine; exp-field draws the real then
the imaginary spectral block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Tuple

import numpy as np

__all__ = [
    "MAX_DEPTH",
    "MEASURE_KINDS",
    "GridMeasure",
    "coupling_rho",
    "background_charge",
    "build_measure",
    "mass_of_region",
    "log_mass_field",
]

MAX_DEPTH = 12
MEASURE_KINDS = ("lebesgue", "cascade", "exp-field")

# Tolerance on total mass after normalisation; float cumsums of a few
# thousand positive terms stay far below this.
_NORM_TOL = 1e-12


def coupling_rho(gamma_sq: float) -> float:
    """Correlation of the coordinate pair coupled to a gamma-measure.

    For gamma**2 = 2 this is exactly zero (independent coordinates).
    """
    return -math.cos(math.pi * gamma_sq / 4.0)


def background_charge(gamma: float) -> float:
    """The constant 2/gamma + gamma/2 attached to a field of parameter gamma."""
    if not 0 < gamma < 2:
        raise ValueError(f"gamma must lie in (0, 2), got {gamma}")
    return 2.0 / gamma + gamma / 2.0


@dataclass(frozen=True)
class GridMeasure:
    """Normalised cell masses on the dyadic grid.

    Attributes
    ----------
    depth : int
        Dyadic refinement depth, between 1 and 12.
    mass : ndarray
        Shape ``(side, side)`` array of strictly positive cell masses
        summing to one; ``mass[i, j]`` is the mass of cell ``(i, j)``.
    kind : str
        One of ``lebesgue``, ``cascade``, ``exp-field``.
    gamma : float or None
        Field strength for kinds that use one.
    meta : dict
        Construction byproducts (planted cascade log weights, spectral
        field, coupling constant). Not part of equality.
    """

    depth: int
    mass: np.ndarray
    kind: str
    gamma: Optional[float] = None
    meta: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be in [1, {MAX_DEPTH}], got {self.depth}")
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        side = 2**self.depth
        arr = np.asarray(self.mass, dtype=float)
        if arr.shape != (side, side):
            raise ValueError(f"mass grid must have shape {(side, side)}, got {arr.shape}")
        if not np.all(arr > 0):
            raise ValueError("every cell mass must be strictly positive")
        total = float(arr.sum())
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"cell masses must sum to 1 within {_NORM_TOL}, got {total!r}")
        object.__setattr__(self, "mass", arr)

    @property
    def side(self) -> int:
        return 2**self.depth

    @property
    def spacing(self) -> float:
        """Side length of one cell."""
        return 1.0 / self.side

    @property
    def n_cells(self) -> int:
        return 4**self.depth

    def mass_at(self, i: int, j: int) -> float:
        self._check_cell(i, j)
        return float(self.mass[i, j])

    def _check_cell(self, i: int, j: int) -> None:
        if not (0 <= i < self.side and 0 <= j < self.side):
            raise ValueError(f"cell ({i}, {j}) outside the {self.side}x{self.side} grid")

    def __repr__(self):  # pragma: no cover - cosmetic
        g = f", gamma={self.gamma}" if self.gamma is not None else ""
        return f"GridMeasure(depth={self.depth}, kind={self.kind!r}{g})"


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _build_lebesgue(depth: int) -> GridMeasure:
    side = 2**depth
    mass = np.full((side, side), 1.0 / side**2)
    return GridMeasure(depth=depth, mass=mass, kind="lebesgue")


def _build_cascade(depth: int, sigma: float, rng: np.random.Generator) -> GridMeasure:
    if sigma <= 0:
        raise ValueError(f"cascade sigma must be positive, got {sigma}")
    side = 2**depth
    log_weights = []
    log_mass = np.zeros((side, side))
    for level in range(1, depth + 1):
        block = 2**level
        z = rng.standard_normal((block, block))
        # unit-mean lognormal: E[exp(sigma*Z - sigma^2/2)] = 1
        logw = sigma * z - sigma**2 / 2.0
        log_weights.append(logw)
        reps = side // block
        log_mass += np.repeat(np.repeat(logw, reps, axis=0), reps, axis=1)
    raw = np.exp(log_mass) / side**2
    total = float(raw.sum())
    meta = {
        "sigma": sigma,
        "log_weights": tuple(w.copy() for w in log_weights),
        "normalisation": total,
    }
    return GridMeasure(depth=depth, mass=raw / total, kind="cascade", meta=meta)


def _build_exp_field(depth: int, gamma: float, rng: np.random.Generator) -> GridMeasure:
    if not 0 < gamma < 2:
        raise ValueError(f"gamma must lie in (0, 2), got {gamma}")
    side = 2**depth
    re = rng.standard_normal((side, side))
    im = rng.standard_normal((side, side))
    freq = np.fft.fftfreq(side) * side  # integer frequencies
    k2 = freq[:, None] ** 2 + freq[None, :] ** 2
    with np.errstate(divide="ignore"):
        amp = np.where(k2 > 0, 1.0 / np.sqrt(k2), 0.0)
    # ifft2 carries a 1/side^2 factor; scale back so the field variance
    # stays O(log side) rather than vanishing with resolution.
    h = np.real(np.fft.ifft2((re + 1j * im) * amp)) * side
    h -= h.mean()
    raw = np.exp(gamma * h) / side**2
    total = float(raw.sum())
    meta = {
        "rho": coupling_rho(gamma**2),
        "field": h,
        "normalisation": total,
    }
    return GridMeasure(depth=depth, mass=raw / total, kind="exp-field", gamma=gamma, meta=meta)


def build_measure(kind: str, depth: int, seed=0, *, sigma: float = 0.5,
                  gamma: Optional[float] = None) -> GridMeasure:
    """Build a measure of the given kind at the given depth.

    Parameters
    ----------
    kind : str
        ``lebesgue``, ``cascade`` or ``exp-field``.
    depth : int
        Dyadic depth in [1, 12].
    seed : int, SeedSequence or Generator
        Source of randomness; ignored by ``lebesgue``.
    sigma : float
        Lognormal width for cascades.
    gamma : float, optional
        Field strength for ``exp-field`` (defaults to sqrt(2)).
    """
    if kind not in MEASURE_KINDS:
        raise ValueError(f"unknown measure kind {kind!r}; expected one of {MEASURE_KINDS}")
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in [1, {MAX_DEPTH}], got {depth}")
    if kind == "lebesgue":
        return _build_lebesgue(depth)
    rng = _as_rng(seed)
    if kind == "cascade":
        return _build_cascade(depth, sigma, rng)
    g = math.sqrt(2.0) if gamma is None else float(gamma)
    return _build_exp_field(depth, g, rng)


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------


def mass_of_region(measure: GridMeasure, cells: Iterable[Tuple[int, int]]) -> float:
    """Total mass of a set of cells. Duplicate cells count once."""
    seen = set()
    total = 0.0
    for cell in cells:
        i, j = cell
        measure._check_cell(i, j)
        if (i, j) in seen:
            continue
        seen.add((i, j))
        total += float(measure.mass[i, j])
    return total


def log_mass_field(measure: GridMeasure, gamma: float = 1.0,
                   eps: Optional[float] = None) -> np.ndarray:
    """Field ``(1/gamma) * log mass(ball of radius eps)`` on cell centres.

    The ball around the centre of cell ``(i, j)`` collects every cell
    whose centre lies within Euclidean distance ``eps``; centres at
    exactly ``eps`` are included. The ball is truncated at the grid
    boundary. ``eps`` defaults to twice the cell spacing and may not be
    smaller than one spacing (the ball would see nothing but its own
    cell, which carries no scale information).
    """
    if not 0 < gamma < 2:
        raise ValueError(f"gamma must lie in (0, 2), got {gamma}")
    s = measure.spacing
    if eps is None:
        eps = 2.0 * s
    if eps < s:
        raise ValueError(f"eps must be at least one cell spacing {s!r}, got {eps!r}")
    r = eps / s
    r2 = r * r * (1.0 + 1e-12)  # keep centres at exactly eps inside
    reach = int(math.floor(r + 1e-9))
    side = measure.side
    acc = np.zeros((side, side))
    for di in range(-reach, reach + 1):
        for dj in range(-reach, reach + 1):
            if di * di + dj * dj > r2:
                continue
            src_i = slice(max(0, -di), min(side, side - di))
            src_j = slice(max(0, -dj), min(side, side - dj))
            dst_i = slice(max(0, di), min(side, side + di))
            dst_j = slice(max(0, dj), min(side, side + dj))
            acc[dst_i, dst_j] += measure.mass[src_i, src_j]
    return np.log(acc) / gamma
