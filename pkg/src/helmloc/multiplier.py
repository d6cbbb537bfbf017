"""Spectral application of Phi(-Laplacian) on a periodic box.

Grid functions live on the torus prod_i [0, L_i) sampled at shape_i points
per axis.  The forward transform keeps the e^{-i y.xi} sign and carries the
weight prod(L)/prod(N), so a constant 1 maps to prod(L) at the zero mode.
The torus is a verification instrument: it exactly contains the plane waves
of interest but says nothing on its own about bounded solutions on R^d.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .symbols import DomainError, Symbol, evaluate

__all__ = [
    "GridFunction",
    "ResidualReport",
    "grid_coordinates",
    "sample",
    "frequencies",
    "frequency_norm_sq",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "apply_spectral_factor",
    "helmholtz_residual",
    "polyharmonic_residual",
    "write_grid_function",
    "read_grid_function",
    "write_residual_csv",
]


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a periodic box (physical or spectral)."""

    d: int
    shape: tuple
    box: tuple
    data: np.ndarray = field(repr=False)
    spectral: bool = False

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        box = tuple(float(L) for L in self.box)
        if self.d < 1 or len(shape) != self.d or len(box) != self.d:
            raise DomainError("shape and box must have one entry per dimension")
        if any(n <= 0 or n % 2 for n in shape):
            raise DomainError(f"samples per axis must be positive and even, got {shape}")
        if any(not (L > 0 and math.isfinite(L)) for L in box):
            raise DomainError("box lengths must be positive")
        data = np.asarray(self.data, dtype=complex)
        if data.size != math.prod(shape):
            raise DomainError(f"data has {data.size} samples, expected {math.prod(shape)}")
        data = data.reshape(shape).copy()
        data.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "data", data)

    def with_data(self, data, spectral: bool | None = None) -> "GridFunction":
        return GridFunction(self.d, self.shape, self.box, data,
                            self.spectral if spectral is None else spectral)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.box) / math.prod(self.shape)

    def l2_norm(self) -> float:
        """Physical L^2 norm over one period."""
        if self.spectral:
            raise DomainError("l2_norm expects a physical grid function")
        return float(math.sqrt(self.cell_volume) * np.linalg.norm(self.data))

    def linf_norm(self) -> float:
        return float(np.max(np.abs(self.data), initial=0.0))


@dataclass(frozen=True)
class ResidualReport:
    residual_l2: float
    residual_linf: float
    relative_l2: float
    per_mode_bound: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def grid_coordinates(shape: Sequence[int], box: Sequence[float]):
    """Sample coordinates y_i = L_i j / N_i, broadcast with indexing='ij'."""
    axes = [np.arange(n) * (L / n) for n, L in zip(shape, box)]
    return np.meshgrid(*axes, indexing="ij")


def sample(func: Callable, shape: Sequence[int], box: Sequence[float]) -> GridFunction:
    """Sample ``func(*coords)`` on the grid."""
    coords = grid_coordinates(shape, box)
    vals = np.broadcast_to(np.asarray(func(*coords), dtype=complex), coords[0].shape)
    return GridFunction(len(shape), tuple(shape), tuple(box), vals)


def frequencies(gf: GridFunction) -> list:
    """Per-axis angular frequencies 2 pi k / L in numpy FFT order."""
    return [2.0 * math.pi * np.fft.fftfreq(n, d=1.0 / n) / L for n, L in zip(gf.shape, gf.box)]


def frequency_norm_sq(gf: GridFunction) -> np.ndarray:
    grids = np.meshgrid(*frequencies(gf), indexing="ij")
    return sum(g * g for g in grids)


def _nyquist_mask(shape) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    for axis, n in enumerate(shape):
        idx = [slice(None)] * len(shape)
        idx[axis] = n // 2
        mask[tuple(idx)] = True
    return mask


def forward_transform(gf: GridFunction) -> GridFunction:
    if gf.spectral:
        raise DomainError("grid function is already spectral")
    return gf.with_data(np.fft.fftn(gf.data) * gf.cell_volume, spectral=True)


def inverse_transform(gf: GridFunction) -> GridFunction:
    if not gf.spectral:
        raise DomainError("grid function is not spectral")
    return gf.with_data(np.fft.ifftn(gf.data) / gf.cell_volume, spectral=False)


def apply_spectral_factor(gf: GridFunction, factor: np.ndarray) -> GridFunction:
    """Multiply the spectrum by a real ``factor`` and return to physical space.

    Nyquist modes are zeroed so real inputs stay real.
    """
    spec = forward_transform(gf).data * factor
    spec = np.where(_nyquist_mask(gf.shape), 0.0, spec)
    return inverse_transform(gf.with_data(spec, spectral=True))


def _symbol_on_grid(sym: Symbol, gf: GridFunction) -> np.ndarray:
    xi2 = frequency_norm_sq(gf)
    vals = np.asarray(evaluate(sym, xi2.ravel()), dtype=float).reshape(xi2.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ArithmeticError(f"symbol {sym.name} not finite at |xi|^2 = {xi2[k]} (index {k})")
    return vals


def apply_multiplier(sym: Symbol, gf: GridFunction) -> GridFunction:
    """Phi(-Laplacian) u: multiply each mode by Phi(|xi_k|^2)."""
    return apply_spectral_factor(gf, _symbol_on_grid(sym, gf))


def _report(res: GridFunction, u: GridFunction, bound: float = 0.0) -> ResidualReport:
    r2 = res.l2_norm()
    u2 = u.l2_norm()
    rel = 0.0 if u2 == 0 else r2 / u2
    return ResidualReport(r2, res.linf_norm(), rel, bound)


def helmholtz_residual(sym: Symbol, gf: GridFunction) -> ResidualReport:
    """Norms of Phi(-Laplacian) u - Phi(1) u.

    ``per_mode_bound`` is min over occupied non-Nyquist modes of
    |Phi(|xi|^2) - Phi(1)| times ||u||_2.
    """
    vals = _symbol_on_grid(sym, gf)
    shift = vals - float(evaluate(sym, 1.0))
    res = apply_spectral_factor(gf, shift)
    spec = forward_transform(gf).data
    occupied = (np.abs(spec) > 1e-12 * np.max(np.abs(spec), initial=0.0)) & ~_nyquist_mask(gf.shape)
    bound = float(np.min(np.abs(shift[occupied]))) * gf.l2_norm() if np.any(occupied) else 0.0
    return _report(res, gf, bound)


def polyharmonic_residual(gf: GridFunction, j0: int) -> ResidualReport:
    """Norms of (-Laplacian - 1)^j0 u."""
    if j0 < 1:
        raise DomainError("j0 must be >= 1")
    factor = (frequency_norm_sq(gf) - 1.0) ** j0
    return _report(apply_spectral_factor(gf, factor), gf)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def write_grid_function(gf: GridFunction, path) -> None:
    """Little-endian container: d, shape (int64), box (float64), re/im pairs."""
    header = struct.pack(f"<q{gf.d}q{gf.d}d", gf.d, *gf.shape, *gf.box)
    body = np.empty(2 * gf.data.size, dtype="<f8")
    flat = gf.data.ravel()
    body[0::2], body[1::2] = flat.real, flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())


def read_grid_function(path) -> GridFunction:
    with open(path, "rb") as fh:
        raw = fh.read()
    (d,) = struct.unpack_from("<q", raw, 0)
    if d < 1:
        raise DomainError(f"bad dimension {d} in container")
    shape = struct.unpack_from(f"<{d}q", raw, 8)
    box = struct.unpack_from(f"<{d}d", raw, 8 + 8 * d)
    offset = 8 + 16 * d
    body = np.frombuffer(raw, dtype="<f8", offset=offset)
    if body.size != 2 * math.prod(shape):
        raise DomainError("container payload does not match its header")
    return GridFunction(d, shape, box, body[0::2] + 1j * body[1::2])


RESIDUAL_COLUMNS = ("label", "residual_l2", "residual_linf", "relative_l2", "per_mode_bound")


def write_residual_csv(rows, path) -> None:
    """``rows`` is an iterable of (label, ResidualReport)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESIDUAL_COLUMNS)
        for label, rep in rows:
            w.writerow([label, repr(rep.residual_l2), repr(rep.residual_linf),
                        repr(rep.relative_l2), repr(rep.per_mode_bound)])
