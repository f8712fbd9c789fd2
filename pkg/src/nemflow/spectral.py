"""Periodic grid geometry and Fourier kernels.

Conventions
-----------
Fields live on an ``n x n`` grid over the square ``[0, L)^2`` with
``x_i = i L / n``; array axis 0 is x, axis 1 is y (``indexing="ij"``).
Spectral coefficients use full complex FFT ordering and are normalised
by ``1/n^2`` so that the ``(0, 0)`` coefficient is the spatial mean::

    c_k = n^-2 sum_x f(x) exp(-i xi_k . x),   xi_k = 2 pi k / L.

The continuum transform ``F f(xi) = (2 pi)^-1 int f exp(-i x.xi) dx``
relates to these coefficients through ``F f(xi_k) ~= L^2 / (2 pi) c_k``
(see :func:`continuum_factor`); Plancherel reads
``int |f|^2 dx = L^2 sum_k |c_k|^2``.

Leading axes are treated as field components, so a velocity is an
array of shape ``(2, n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, NumericalInputError, SymmetryError

SYMMETRY_TOL = 1e-10


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Square periodic box with its wavevector table and dealias mask."""

    n: int
    length: float
    k: np.ndarray = field(init=False, repr=False)
    xi: np.ndarray = field(init=False, repr=False)
    xi_deriv: np.ndarray = field(init=False, repr=False)
    xi2: np.ndarray = field(init=False, repr=False)
    dealias_mask: np.ndarray = field(init=False, repr=False)
    nyquist: np.ndarray = field(init=False, repr=False)
    shell_k2: np.ndarray = field(init=False, repr=False)
    shell_index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.n
        k1 = np.rint(sfft.fftfreq(n) * n).astype(np.int64)
        kk = np.stack(np.meshgrid(k1, k1, indexing="ij"))
        xi = (2.0 * np.pi / self.length) * kk
        nyq = (kk == -n // 2)
        xi_d = np.where(nyq, 0.0, xi)
        mask = (np.abs(kk[0]) < n / 3) & (np.abs(kk[1]) < n / 3)
        k2 = kk[0] ** 2 + kk[1] ** 2
        shell_k2, shell_index = np.unique(k2, return_inverse=True)
        set_ = object.__setattr__
        set_(self, "k", _frozen(kk))
        set_(self, "xi", _frozen(xi))
        set_(self, "xi_deriv", _frozen(xi_d))
        set_(self, "xi2", _frozen(xi[0] ** 2 + xi[1] ** 2))
        set_(self, "dealias_mask", _frozen(mask))
        set_(self, "nyquist", _frozen(nyq[0] | nyq[1]))
        set_(self, "shell_k2", _frozen(shell_k2))
        set_(self, "shell_index", _frozen(shell_index.reshape(n, n)))

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dxi(self) -> float:
        """Spacing of the wavevector lattice, ``2 pi / L``."""
        return 2.0 * np.pi / self.length

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def shell_xi2(self) -> np.ndarray:
        """``|xi|^2`` of every distinct shell, aligned with ``shell_k2``."""
        return self.dxi ** 2 * self.shell_k2

    def coords(self):
        """Physical grid coordinates ``(x, y)``, each of shape ``(n, n)``."""
        x1 = np.arange(self.n) * self.dx
        return np.meshgrid(x1, x1, indexing="ij")

    def index_of(self, k1: int, k2: int):
        """Array index of the mode with integer wavenumbers ``(k1, k2)``."""
        return (k1 % self.n, k2 % self.n)

    def shell_sum(self, values) -> np.ndarray:
        """Sum per-mode ``values`` over shells of equal ``|k|^2``."""
        return np.bincount(self.shell_index.ravel(), weights=np.ravel(values),
                           minlength=self.shell_k2.size)


def make_grid(n: int, length: float) -> SpectralGrid:
    """Build a :class:`SpectralGrid`; ``n`` must be even and at least 8."""
    if int(n) != n or n % 2 or n < 8:
        raise ConfigurationError(f"grid size n must be an even integer >= 8, got {n!r}")
    if not np.isfinite(length) or length <= 0:
        raise ConfigurationError(f"box length must be positive, got {length!r}")
    return SpectralGrid(int(n), float(length))


def continuum_factor(grid: SpectralGrid) -> float:
    """Factor converting grid coefficients to the ``1/(2 pi)`` continuum transform."""
    return grid.length ** 2 / (2.0 * np.pi)


def conj_reflect(fh: np.ndarray) -> np.ndarray:
    """Return ``g`` with ``g(k) = conj(fh(-k))`` on the last two axes."""
    return np.conj(np.roll(fh[..., ::-1, ::-1], 1, axis=(-2, -1)))


def symmetry_defect(fh: np.ndarray) -> float:
    """Largest ``|c(k) - conj(c(-k))|`` relative to ``max |c|``."""
    scale = np.max(np.abs(fh)) if fh.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(fh - conj_reflect(fh))) / scale)


# Unchecked transforms used inside the time stepper.
def to_spectral(f: np.ndarray) -> np.ndarray:
    n = f.shape[-1]
    return sfft.fft2(f, axes=(-2, -1)) / (n * n)


def to_physical(fh: np.ndarray) -> np.ndarray:
    n = fh.shape[-1]
    return sfft.ifft2(fh, axes=(-2, -1)).real * (n * n)


def forward_transform(grid: SpectralGrid, f) -> np.ndarray:
    """Mean-normalised DFT of real samples (trailing shape ``(n, n)``)."""
    f = np.asarray(f, dtype=float)
    if f.shape[-2:] != grid.shape:
        raise ConfigurationError(f"field shape {f.shape} does not match grid {grid.shape}")
    if not np.all(np.isfinite(f)):
        raise NumericalInputError("field contains NaN or Inf values")
    return to_spectral(f)


def inverse_transform(grid: SpectralGrid, fh, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Real samples of conjugate-symmetric coefficients."""
    fh = np.asarray(fh, dtype=complex)
    if fh.shape[-2:] != grid.shape:
        raise ConfigurationError(f"spectrum shape {fh.shape} does not match grid {grid.shape}")
    defect = symmetry_defect(fh)
    if defect > tol:
        raise SymmetryError(f"coefficients are not conjugate symmetric (defect {defect:.3e})")
    return to_physical(fh)


def gradient(grid: SpectralGrid, fh) -> np.ndarray:
    """Spectral gradient ``(d/dx, d/dy)``; Nyquist contributions are dropped."""
    return 1j * grid.xi_deriv * np.asarray(fh)[..., None, :, :]


def divergence(grid: SpectralGrid, vh) -> np.ndarray:
    """Spectral divergence of a vector field with components on axis -3."""
    vh = np.asarray(vh)
    return 1j * (grid.xi_deriv[0] * vh[..., 0, :, :] + grid.xi_deriv[1] * vh[..., 1, :, :])


def laplacian(grid: SpectralGrid, fh) -> np.ndarray:
    return -grid.xi2 * np.asarray(fh)


def dealias(grid: SpectralGrid, fh) -> np.ndarray:
    """Two-thirds rule truncation."""
    return np.asarray(fh) * grid.dealias_mask


def leray_project(grid: SpectralGrid, vh) -> np.ndarray:
    """Project a vector field onto its divergence-free part.

    The mean mode passes through untouched.  Modes on a Nyquist line are
    removed: their reflected partner aliases onto itself, so no real
    solenoidal field can carry them.
    """
    vh = np.asarray(vh, dtype=complex)
    xi = grid.xi
    xi2 = np.where(grid.xi2 == 0.0, 1.0, grid.xi2)
    proj = (xi[0] * vh[..., 0, :, :] + xi[1] * vh[..., 1, :, :]) / xi2
    out = vh - xi * proj[..., None, :, :]
    return np.where(grid.nyquist, 0.0, out)


def parseval_energy(grid: SpectralGrid, fh) -> float:
    """``int |f|^2 dx`` evaluated from coefficients (summed over components)."""
    fh = np.asarray(fh)
    return float(grid.length ** 2 * np.sum(fh.real ** 2 + fh.imag ** 2))
