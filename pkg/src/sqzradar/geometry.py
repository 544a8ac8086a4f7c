"""Transverse top-hat modes, split-detector overlaps, beamsplitters and loss."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm, logm
from scipy.special import gammaln
from scipy.sparse.linalg import expm_multiply

from .errors import NonUnitaryError, RegisterMismatchError
from .fock import LinearOperator, ModeLabel, ModeRegister, PortTag, StateVector, single_mode_lower

UNITARITY_TOL = 1e-12


class Shape(str, Enum):
    EVEN = "u0"  # unit top hat on [-W/2, W/2]
    FLIPPED = "u1"  # -1 on [-W/2, 0], +1 on (0, W/2]


@dataclass(frozen=True)
class TransverseMode:
    shape: Shape
    displacement: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if not self.width > 0:
            raise ValueError(f"beam width must be positive, got {self.width}")
        if not self.displacement >= 0:
            raise ValueError(f"displacement must be nonnegative, got {self.displacement}")

    @property
    def index(self) -> int:
        return 0 if self.shape is Shape.EVEN else 1

    def segments(self) -> list[tuple[float, float, float]]:
        """Piecewise-constant pieces ``(start, stop, value)``."""
        lo = self.displacement - self.width / 2
        hi = self.displacement + self.width / 2
        if self.shape is Shape.EVEN:
            return [(lo, hi, 1.0)]
        return [(lo, self.displacement, -1.0), (self.displacement, hi, 1.0)]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for lo, hi, val in self.segments():
            # left-closed at the outer edge, matching the (W/2]-style definition up to measure zero
            out = np.where((x >= lo) & (x <= hi), val, out)
        return out


def _check_pair(a: TransverseMode, b: TransverseMode):
    if not math.isclose(a.width, b.width, rel_tol=1e-12):
        raise ValueError(f"mode widths differ: {a.width} vs {b.width}")
    for m in (a, b):
        if m.displacement > m.width / 2 * (1 + 1e-12):
            raise ValueError(
                f"displacement {m.displacement} outside the validity range [0, W/2]"
            )


def _piecewise_integral(a: TransverseMode, b: TransverseMode, signed: bool) -> float:
    edges = {0.0} if signed else set()
    for m in (a, b):
        for lo, hi, _ in m.segments():
            edges.update((lo, hi))
    pts = sorted(edges)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        val = float(a(mid)) * float(b(mid))
        if signed:
            val *= 1.0 if mid > 0 else -1.0
        total += val * (hi - lo)
    return total


def signed_overlap(a: TransverseMode, b: TransverseMode) -> float:
    """Integral of ``sign(x) u_a(x) u_b(x)``, exact over the piecewise-constant pieces."""
    _check_pair(a, b)
    return _piecewise_integral(a, b, signed=True)


def plain_overlap(a: TransverseMode, b: TransverseMode) -> float:
    """Integral of ``u_a(x) u_b(x)``."""
    _check_pair(a, b)
    return _piecewise_integral(a, b, signed=False)


def quadrature_overlap(a: TransverseMode, b: TransverseMode, signed: bool, points: int = 100_000) -> float:
    """Midpoint-rule estimate over ``[-W, W]``; independent check of the exact overlaps."""
    if points < 10:
        raise ValueError("quadrature needs at least 10 points")
    _check_pair(a, b)
    w = a.width
    h = 2.0 * w / points
    x = -w + h * (np.arange(points) + 0.5)
    f = a(x) * b(x)
    if signed:
        f = f * np.sign(x)
    return float(f.sum() * h)


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Two-port splitter: ``out_a = t in_a + r in_b``, ``out_b = r in_a + t' in_b``.

    ``t'`` is fixed by unitarity (``t' = -t^* r / r^*``, or ``t^*`` when
    ``r = 0``).  With ``t = t' = 1/sqrt(2)`` and ``r = i/sqrt(2)`` this is
    the balanced splitter used for balanced detection.
    """

    t: complex
    r: complex

    def __post_init__(self):
        total = abs(self.t) ** 2 + abs(self.r) ** 2
        if abs(total - 1.0) > UNITARITY_TOL:
            raise NonUnitaryError(f"|t|^2 + |r|^2 = {total!r}, expected 1")

    @classmethod
    def balanced(cls) -> "BeamSplitterSpec":
        return cls(1 / math.sqrt(2), 1j / math.sqrt(2))

    @classmethod
    def loss(cls, eta: float, phase: float = 0.0) -> "BeamSplitterSpec":
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {eta}")
        return cls(math.sqrt(eta) * cmath.exp(1j * phase), math.sqrt(1.0 - eta))

    @property
    def t_prime(self) -> complex:
        if self.r == 0:
            return complex(self.t).conjugate()
        return -complex(self.t).conjugate() * self.r / complex(self.r).conjugate()

    @property
    def mode_matrix(self) -> np.ndarray:
        return np.array([[self.t, self.r], [self.r, self.t_prime]], dtype=complex)


def _generator_coefficients(spec: BeamSplitterSpec) -> np.ndarray:
    """Anti-Hermitian ``G`` with ``exp(G)`` equal to the splitter's mode matrix."""
    gen = logm(spec.mode_matrix)
    return 0.5 * (gen - gen.conj().T)


def _two_mode_generator(na: int, nb: int, spec: BeamSplitterSpec) -> sp.csr_matrix:
    """Sparse ``sum_jk G_jk a_j^dag a_k`` on the truncated ``(na, nb)`` space."""
    g = _generator_coefficients(spec)
    a = sp.kron(single_mode_lower(na), sp.identity(nb), format="csr")
    b = sp.kron(sp.identity(na), single_mode_lower(nb), format="csr")
    ad, bd = a.conj().T, b.conj().T
    return (g[0, 0] * (ad @ a) + g[1, 1] * (bd @ b) + g[0, 1] * (ad @ b) + g[1, 0] * (bd @ a)).tocsr()


def _two_mode_block(na: int, nb: int, spec: BeamSplitterSpec) -> sp.csr_matrix:
    """Unitary on the ``(na, nb)`` two-mode space, one dense block per photon-number sector.

    The generator conserves total photon number, so the truncated generator
    is block diagonal and each block is exponentiated exactly.
    """
    gen = _generator_coefficients(spec)
    rows, cols, vals = [], [], []
    for total in range(na + nb - 1):
        i = np.arange(max(0, total - nb + 1), min(na, total + 1))
        j = total - i
        size = i.size
        block = np.diag(gen[0, 0] * i + gen[1, 1] * j).astype(complex)
        # position k holds (i[k], j[k]); k+1 has one more photon in mode a
        up = gen[0, 1] * np.sqrt((i[:-1] + 1) * j[:-1])  # a^dag b
        down = gen[1, 0] * np.sqrt(i[1:] * (j[1:] + 1))  # b^dag a
        block[np.arange(1, size), np.arange(size - 1)] += up
        block[np.arange(size - 1), np.arange(1, size)] += down
        u = expm(block)
        flat = i * nb + j
        p, q = np.nonzero(u)
        rows.append(flat[p])
        cols.append(flat[q])
        vals.append(u[p, q])
    rows, cols, vals = (np.concatenate(x) for x in (rows, cols, vals))
    return sp.csr_matrix((vals, (rows, cols)), shape=(na * nb, na * nb))


def _axes_for(register: ModeRegister, mode_a: ModeLabel, mode_b: ModeLabel) -> tuple[int, int]:
    ia, ib = register.index(mode_a), register.index(mode_b)
    if ia == ib:
        raise ValueError("beamsplitter needs two distinct modes")
    return ia, ib


def two_mode_bs_unitary(
    register: ModeRegister, mode_a: ModeLabel, mode_b: ModeLabel, spec: BeamSplitterSpec
) -> LinearOperator:
    """Full-register unitary sending coherent amplitudes ``(a, b)`` to ``M (a, b)``."""
    ia, ib = _axes_for(register, mode_a, mode_b)
    dims = register.dims
    block = _two_mode_block(dims[ia], dims[ib], spec).tocoo()
    rest_axes = [k for k in range(len(dims)) if k not in (ia, ib)]
    rest_dims = [dims[k] for k in rest_axes]
    rest = np.indices(rest_dims).reshape(len(rest_dims), -1) if rest_dims else np.zeros((0, 1), int)
    n_rest = rest.shape[1]

    def flat(two_mode_index):
        i, j = np.divmod(two_mode_index, dims[ib])
        multi = [None] * len(dims)
        multi[ia] = np.repeat(i, n_rest)
        multi[ib] = np.repeat(j, n_rest)
        for k, axis in enumerate(rest_axes):
            multi[axis] = np.tile(rest[k], i.size)
        return np.ravel_multi_index(multi, dims)

    rows = flat(block.row)
    cols = flat(block.col)
    vals = np.repeat(block.data, n_rest)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(register.dim, register.dim))
    return LinearOperator(register, mat)


def apply_beamsplitter(
    state: StateVector, mode_a: ModeLabel, mode_b: ModeLabel, spec: BeamSplitterSpec
) -> StateVector:
    """Apply the splitter to a state by contracting only the two affected axes."""
    register = state.register
    ia, ib = _axes_for(register, mode_a, mode_b)
    dims = register.dims
    gen = _two_mode_generator(dims[ia], dims[ib], spec)
    tensor = np.moveaxis(state.tensor(), (ia, ib), (0, 1))
    moved_shape = tensor.shape
    out = expm_multiply(gen, tensor.reshape(dims[ia] * dims[ib], -1))
    out = np.moveaxis(out.reshape(moved_shape), (0, 1), (ia, ib))
    return StateVector(register, out.reshape(-1))


def ancilla_label(mode: ModeLabel) -> ModeLabel:
    return ModeLabel(mode.frequency_tag, mode.transverse_index, PortTag.VAC)


def _vacuum_port_map(cutoff: int, spec: BeamSplitterSpec) -> np.ndarray:
    """Matrix taking ``|n>`` (other port empty) to ``sum_k c_nk |k, n-k>``.

    With ``a^dag -> t a^dag + r b^dag`` the coefficients are
    ``sqrt(C(n, k)) t^k r^(n-k)``; no truncation error arises because
    neither output count can exceed ``n``.
    """
    n = np.arange(cutoff)[:, None]
    k = np.arange(cutoff)[None, :]
    valid = k <= n
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(np.where(valid, n - k, 0) + 1)
    coeff = np.where(
        valid,
        np.exp(0.5 * np.where(valid, log_binom, 0.0))
        * np.power(complex(spec.t), k)
        * np.power(complex(spec.r), np.where(valid, n - k, 0)),
        0.0,
    )
    out = np.zeros((cutoff * cutoff, cutoff), dtype=complex)
    nn, kk = np.nonzero(valid)
    out[kk * cutoff + (nn - kk), nn] = coeff[nn, kk]
    return out


def loss_channel(state: StateVector, mode: ModeLabel, eta: float, phase: float = 0.0) -> StateVector:
    """Purified loss: append a vacuum ancilla and mix it in with ``|t|^2 = eta``.

    ``phase`` is the transmission phase ``arg t``; it rotates the surviving
    amplitude.  The ancilla stays in the returned register, right after the
    existing modes.
    """
    spec = BeamSplitterSpec.loss(eta, phase)
    register = state.register
    anc = ancilla_label(mode)
    if anc in register:
        raise RegisterMismatchError(f"register already holds ancilla {anc}")
    cutoff = register.cutoff(mode)
    bigger = register.appended(anc, cutoff)
    axis = register.index(mode)
    tensor = np.moveaxis(state.tensor(), axis, 0)
    rest_shape = tensor.shape[1:]
    mixed = _vacuum_port_map(cutoff, spec) @ tensor.reshape(cutoff, -1)
    # axes now (mode, ancilla, rest...); put them back in register order
    mixed = mixed.reshape((cutoff, cutoff) + rest_shape)
    mixed = np.moveaxis(mixed, (0, 1), (axis, len(bigger) - 1))
    return StateVector(bigger, mixed.reshape(-1))
