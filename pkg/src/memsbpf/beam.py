"""Clamped-free Euler-Bernoulli cantilever: modal frequencies, mode shapes,
a finite-difference eigen-check, lumped parameters and length synthesis."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import linalg, sparse

from memsbpf.errors import GeometryError
from memsbpf.materials import POLYSILICON, Material

# ratio m_eff / (rho b h L) making sqrt(k_tip/m_eff) equal the mode-1
# frequency, i.e. 3 / (k1 L)^4 with k1 L = 1.8751...
M_EFF_COEFF = 0.2427


@dataclass(frozen=True)
class CantileverBeam:
    length: float
    width: float
    thickness: float
    gap: float
    material: Material = POLYSILICON

    def __post_init__(self):
        for name in ("length", "width", "thickness", "gap"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise GeometryError(f"{name} must be > 0, got {value}")
        if self.length / self.thickness < 10:
            warnings.warn(
                f"L/h = {self.length / self.thickness:.3g} < 10; thin-beam theory is doubtful",
                stacklevel=3,
            )

    @property
    def area(self) -> float:
        return self.width * self.thickness

    @property
    def inertia(self) -> float:
        return self.width * self.thickness**3 / 12.0

    def with_(self, **changes) -> CantileverBeam:
        return replace(self, **changes)


@dataclass(frozen=True)
class LumpedBeam:
    k_eff: float  # N/m
    m_eff: float  # kg

    @property
    def omega(self) -> float:
        return math.sqrt(self.k_eff / self.m_eff)

    @property
    def frequency(self) -> float:
        return self.omega / (2.0 * math.pi)


@dataclass(frozen=True)
class ModalResult:
    mode_index: int
    frequency: float
    mode_constant: float
    x: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_m", "phi"])
        for xi, pi in zip(self.x.tolist(), self.phi.tolist()):
            w.writerow([repr(xi), repr(pi)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "mode_index": self.mode_index,
            "frequency_Hz": self.frequency,
            "mode_constant": self.mode_constant,
            "x_m": self.x.tolist(),
            "phi": self.phi.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _char(x: float) -> float:
    # cos x cosh x + 1, scaled by 1/cosh x so it stays O(1) for large x
    return math.cos(x) + 1.0 / math.cosh(x)


def _char_prime(x: float) -> float:
    return -math.sin(x) - math.tanh(x) / math.cosh(x)


@lru_cache(maxsize=None)
def _mode_constants(n_max: int) -> tuple[float, ...]:
    roots = []
    for n in range(1, n_max + 1):
        # (2n - 1) pi / 2 is an excellent start; the gap shrinks like e^-x
        x = (2 * n - 1) * math.pi / 2.0
        if n == 1:
            x = 1.875
        for _ in range(50):
            step = _char(x) / _char_prime(x)
            x -= step
            if abs(step) < 1e-12 * x:
                break
        roots.append(x)
    return tuple(roots)


def mode_constants(n_max: int) -> list[float]:
    """First ``n_max`` roots of cos(x) cosh(x) = -1 (the k_n L values)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return list(_mode_constants(n_max))


def mode_constant(n: int) -> float:
    return _mode_constants(n)[n - 1]


def natural_frequency(beam: CantileverBeam, n: int = 1) -> float:
    """f_n = sqrt(knL^4/12) * h/L^2 * sqrt(E/rho) / 2 pi.

    Width does not appear; it cancels between stiffness and mass.
    """
    if n < 1:
        raise ValueError("mode index must be >= 1")
    kn = mode_constant(n)
    omega = math.sqrt(kn**4 / 12.0) * beam.thickness / beam.length**2 * beam.material.sound_speed
    return omega / (2.0 * math.pi)


def synthesize_length(f_target: float, h: float, material: Material = POLYSILICON) -> float:
    """Beam length whose mode-1 frequency is ``f_target``."""
    if not f_target > 0:
        raise ValueError("f_target must be > 0")
    kn = mode_constant(1)
    return math.sqrt(math.sqrt(kn**4 / 12.0) * h * material.sound_speed / (2.0 * math.pi * f_target))


def mode_shape(beam: CantileverBeam, n: int = 1, samples: int = 201) -> tuple[np.ndarray, np.ndarray]:
    """Sampled clamped-free mode shape normalized to unit tip deflection."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    kl = mode_constant(n)
    x = np.linspace(0.0, beam.length, samples)
    return x, _shape(kl, x / beam.length)


def _shape(kl: float, s: np.ndarray) -> np.ndarray:
    sigma = (math.cosh(kl) + math.cos(kl)) / (math.sinh(kl) + math.sin(kl))
    z = kl * s
    # cosh - sigma sinh rewritten to avoid cancelling two huge terms
    hyper = 0.5 * ((1.0 - sigma) * np.exp(z) + (1.0 + sigma) * np.exp(-z))
    phi = hyper - np.cos(z) + sigma * np.sin(z)
    tip = 0.5 * ((1.0 - sigma) * math.exp(kl) + (1.0 + sigma) * math.exp(-kl)) - math.cos(kl) + sigma * math.sin(kl)
    return phi / tip


def modal_analysis(beam: CantileverBeam, n_modes: int = 3, samples: int = 201) -> list[ModalResult]:
    out = []
    for n in range(1, n_modes + 1):
        x, phi = mode_shape(beam, n, samples)
        out.append(ModalResult(n, natural_frequency(beam, n), mode_constant(n), x, phi))
    return out


def _fd_matrices(nodes: int) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Nondimensional stiffness/mass for unknowns w_1..w_N on a unit beam.

    Central 5-point fourth-difference stencil. Clamped root: w_0 = 0 and
    ghost w_-1 = w_1. Free tip (w'' = w''' = 0): ghosts
    w_N+1 = 2w_N - w_N-1 and w_N+2 = 4w_N - 4w_N-1 + w_N-2. Halving the tip
    row (and its mass) makes the system symmetric.
    """
    n = nodes
    h = 1.0 / n
    stencil = (1.0, -4.0, 6.0, -4.0, 1.0)

    def expand(j):
        if j == 0:
            return ()
        if j == -1:
            return ((1, 1.0),)
        if j <= n:
            return ((j, 1.0),)
        if j == n + 1:
            return ((n, 2.0), (n - 1, -1.0))
        return ((n, 4.0), (n - 1, -4.0), (n - 2, 1.0))

    rows, cols, vals = [], [], []
    for i in range(1, n + 1):
        weight = 0.5 if i == n else 1.0
        for offset, c in zip(range(-2, 3), stencil):
            for j, cj in expand(i + offset):
                rows.append(i - 1)
                cols.append(j - 1)
                vals.append(weight * c * cj / h**4)
    k = sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    m = np.ones(n)
    m[-1] = 0.5
    return k, m


def fd_modal_oracle(beam: CantileverBeam, nodes: int = 400, n_modes: int = 3) -> list[float]:
    """Lowest modal frequencies from a finite-difference discretization of
    EI y'''' + rho A y_tt = 0 on a clamped-free beam.

    Independent of the closed-form mode constants; use it to check them.
    """
    if nodes < 50:
        raise GeometryError(f"fd_modal_oracle needs >= 50 nodes, got {nodes}")
    k, m = _fd_matrices(nodes)
    # banded upper form for eig_banded is not worth it at these sizes
    lam = linalg.eigh(k.toarray(), np.diag(m), eigvals_only=True, subset_by_index=[0, n_modes - 1])
    mat = beam.material
    scale = mat.youngs_modulus * beam.inertia / (mat.density * beam.area * beam.length**4)
    return [math.sqrt(v * scale) / (2.0 * math.pi) for v in lam]


def lumped_params(beam: CantileverBeam) -> LumpedBeam:
    """Tip stiffness 3EI/L^3 and the mass that reproduces mode 1."""
    k_eff = 3.0 * beam.material.youngs_modulus * beam.inertia / beam.length**3
    m_eff = M_EFF_COEFF * beam.material.density * beam.width * beam.thickness * beam.length
    return LumpedBeam(k_eff, m_eff)
