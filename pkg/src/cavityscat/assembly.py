"""Aperture linear systems: diagonal impedance blocks, kernel blocks,
incident-wave vectors, and the dense solve."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from math import pi

import numpy as np
import scipy.linalg as sla

from .errors import SingularSystemError
from .modal import ModalTables, build_modal_tables
from .model import Cavity, IncidentWave, ProblemSpec
from .quadrature import SingularBlockCache, cross_block_matrix

RCOND_WARN = 1e-14


@dataclass(frozen=True)
class ModeLayout:
    polarization: str
    N: int
    K: int

    @property
    def modes(self) -> range:
        return range(1, self.N + 1) if self.polarization == "TM" else range(0, self.N + 1)

    @property
    def block(self) -> int:
        return self.N if self.polarization == "TM" else self.N + 1

    @property
    def size(self) -> int:
        return self.K * self.block

    def row(self, k: int, n: int) -> int:
        return k * self.block + (n - 1 if self.polarization == "TM" else n)

    def block_slice(self, k: int) -> slice:
        return slice(k * self.block, (k + 1) * self.block)


@dataclass
class ApertureSystem:
    lhs: np.ndarray
    rhs: np.ndarray
    layout: ModeLayout


@dataclass
class ApertureSolution:
    """Aperture Fourier coefficients per cavity, plus solver diagnostics."""

    coefficients: tuple[np.ndarray, ...]
    layout: ModeLayout
    rcond: float
    diagnostics: list = field(default_factory=list)

    def coefficient(self, k: int, n: int) -> complex:
        idx = n - 1 if self.layout.polarization == "TM" else n
        return complex(self.coefficients[k][idx])


def _cexpm1(z: complex) -> complex:
    if abs(z) < 0.5:
        term = z
        acc = z
        for j in range(2, 24):
            term = term * z / j
            acc += term
            if abs(term) <= 1e-18 * abs(acc):
                break
        return acc
    return cmath.exp(z) - 1.0


def _phase_integral(p: float, w: float) -> complex:
    """I_0^w e^{i p x} dx = (e^{i p w} - 1)/(i p), stable through p = 0."""
    z = 1j * p * w
    if p == 0.0:
        return complex(w)
    return _cexpm1(z) / (1j * p)


def exp_trig_integral(alpha: float, mu: float, w: float, kind: str) -> complex:
    """I_0^w e^{i alpha x} trig(mu x) dx in closed form.

    The exponential form keeps the degenerate directions alpha = +-mu exact:
    the resonant branch (terms proportional to w) emerges from the p -> 0
    limit of (e^{ipw}-1)/(ip) rather than a separate formula.
    """
    ip = _phase_integral(alpha + mu, w)
    im = _phase_integral(alpha - mu, w)
    if kind == "sin":
        return (ip - im) / 2j
    return (ip + im) / 2.0


def incident_vector_tm(wave: IncidentWave, cavity: Cavity, m: int) -> complex:
    """F_k(m) = -2 i beta I_0^{w} e^{i alpha (x + a)} sin(m pi x / w) dx."""
    mu = m * pi / cavity.w
    return (-2j * wave.beta * cmath.exp(1j * wave.alpha * cavity.a)
            * exp_trig_integral(wave.alpha, mu, cavity.w, "sin"))


def incident_vector_te(wave: IncidentWave, cavity: Cavity, m: int) -> complex:
    """G_k(m) = 2 I_0^{w} e^{i alpha (x + a)} cos(m pi x / w) dx."""
    mu = m * pi / cavity.w
    return (2.0 * cmath.exp(1j * wave.alpha * cavity.a)
            * exp_trig_integral(wave.alpha, mu, cavity.w, "cos"))


def _tm_diag_block(spec: ProblemSpec, tables: ModalTables, cache: SingularBlockCache,
                   k: int) -> np.ndarray:
    cav = spec.cavities[k]
    k0 = spec.wave.kappa0
    w = cav.w
    c = k0 * w / (2.0 * pi)
    modes = np.arange(1, spec.N + 1)
    sin_b = cache.matrix("sin", modes, c)
    cos_b = cache.matrix("cos", modes, c)
    scale = (w / (2.0 * pi)) ** 2
    mn = modes[:, None] * modes[None, :]
    return (0.5j * k0 * k0 * scale * sin_b
            - 0.5j * mn * pi * pi / (w * w) * scale * cos_b)


def _tm_cross_block(spec: ProblemSpec, k: int, j: int) -> np.ndarray:
    cav_k, cav_j = spec.cavities[k], spec.cavities[j]
    k0 = spec.wave.kappa0
    modes = range(1, spec.N + 1)
    ss = cross_block_matrix(cav_k, cav_j, modes, modes, k0, "sin", spec.quad)
    cc = cross_block_matrix(cav_k, cav_j, modes, modes, k0, "cos", spec.quad)
    marr = np.arange(1, spec.N + 1)
    mn = marr[:, None] * marr[None, :]
    return 0.5j * k0 * k0 * ss - 0.5j * mn * pi * pi / (cav_j.w * cav_k.w) * cc


def build_system(spec: ProblemSpec, tables: ModalTables | None = None,
                 cache: SingularBlockCache | None = None) -> ApertureSystem:
    """Assemble (D - M) U = F (TM) or (D_hat - M_hat) U = G (TE)."""
    tables = tables or build_modal_tables(spec)
    cache = cache or SingularBlockCache(spec.quad)
    layout = ModeLayout(spec.polarization, spec.N, spec.K)
    size = layout.size
    lhs = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    k0 = spec.wave.kappa0

    if spec.polarization == "TM":
        for k, cav in enumerate(spec.cavities):
            sl = layout.block_slice(k)
            imped = np.array([tables.connection(k, n).impedance for n in layout.modes])
            block = np.diag(0.5 * cav.w * imped) - _tm_diag_block(spec, tables, cache, k)
            lhs[sl, sl] = block
            rhs[sl] = [incident_vector_tm(spec.wave, cav, m) for m in layout.modes]
            for j in range(spec.K):
                if j == k:
                    continue
                lhs[sl, layout.block_slice(j)] = -_tm_cross_block(spec, k, j)
    else:
        modes = np.arange(0, spec.N + 1)
        for k, cav in enumerate(spec.cavities):
            sl = layout.block_slice(k)
            c = k0 * cav.w / (2.0 * pi)
            cos_b = cache.matrix("cos", modes, c)
            t_hat = np.array([tables.connection(k, n).impedance for n in layout.modes])
            mhat = (-0.5j) * (cav.w / (2.0 * pi)) ** 2 * cos_b * t_hat[None, :]
            dvec = np.full(layout.block, 0.5 * cav.w)
            dvec[0] = cav.w
            lhs[sl, sl] = np.diag(dvec) - mhat
            rhs[sl] = [incident_vector_te(spec.wave, cav, m) for m in layout.modes]
            for j in range(spec.K):
                if j == k:
                    continue
                cc = cross_block_matrix(cav, spec.cavities[j], modes, modes, k0, "cos", spec.quad)
                t_j = np.array([tables.connection(j, n).impedance for n in layout.modes])
                lhs[sl, layout.block_slice(j)] = 0.5j * cc * t_j[None, :]  # -M_hat_{k,j}

    if not np.all(np.isfinite(lhs)):
        raise SingularSystemError("assembled matrix contains non-finite entries")
    return ApertureSystem(lhs=lhs, rhs=rhs, layout=layout)


class SystemFactorization:
    """LU factorization of an aperture matrix, reusable across right-hand sides."""

    def __init__(self, sys: ApertureSystem):
        self.layout = sys.layout
        try:
            self._lu, self._piv = sla.lu_factor(sys.lhs)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SingularSystemError(f"LU factorization failed: {exc}") from exc
        if not np.all(np.isfinite(self._lu)):
            raise SingularSystemError("system singular: non-finite LU factors")
        anorm = np.linalg.norm(sys.lhs, 1)
        gecon = sla.get_lapack_funcs("gecon", (self._lu,))
        self.rcond, info = gecon(self._lu, anorm, norm="1")
        self.rcond = float(self.rcond)
        if info != 0 or self.rcond == 0.0:
            raise SingularSystemError(f"system singular (rcond = {self.rcond:g})")

    def solve(self, rhs: np.ndarray) -> ApertureSolution:
        x = sla.lu_solve((self._lu, self._piv), rhs)
        lay = self.layout
        coeffs = tuple(x[lay.block_slice(k)].copy() for k in range(lay.K))
        diags = []
        if self.rcond < RCOND_WARN:
            diags.append(f"ill-conditioned system: rcond = {self.rcond:.3e}")
        return ApertureSolution(coefficients=coeffs, layout=lay, rcond=self.rcond,
                                diagnostics=diags)


def solve_system(sys: ApertureSystem) -> ApertureSolution:
    """Dense LU with partial pivoting; attaches the 1-norm rcond estimate."""
    return SystemFactorization(sys).solve(sys.rhs)


def solve(spec: ProblemSpec):
    """Convenience end-to-end solve; returns (tables, solution)."""
    tables = build_modal_tables(spec)
    cache = SingularBlockCache(spec.quad)
    solution = solve_system(build_system(spec, tables, cache))
    return tables, solution
