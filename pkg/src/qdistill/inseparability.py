"""PPT decision and the local filter built from the negative eigenvector of ``rho^T2``."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotInseparable
from .qlinalg import I2, dagger, herm_eig, kron, svd2c
from .qstate import DensityMatrix, partial_transpose

INSEPARABLE_TOL = 1e-10
# Schmidt coefficients closer than this give an identity filter
BALANCED_TOL = 1e-9


@dataclass(frozen=True)
class PptVerdict:
    min_eigenvalue: float
    witness: np.ndarray
    inseparable: bool


@dataclass(frozen=True)
class SchmidtForm:
    a: float
    b: float
    u1: np.ndarray
    u2: np.ndarray


@dataclass(frozen=True)
class Filter:
    """Diagonal contraction ``w`` applied by one party (``side`` is ``'A'`` or ``'B'``)."""

    w: np.ndarray
    side: str = "B"

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex)
        if w.shape != (2, 2):
            raise ValueError(f"filter must be 2x2, got {w.shape}")
        if abs(w[0, 1]) > 0 or abs(w[1, 0]) > 0:
            raise ValueError("filter must be diagonal")
        diag = np.diag(w)
        if np.any(np.abs(diag.imag) > 0) or np.any(diag.real < 0):
            raise ValueError("filter entries must be nonnegative reals")
        if self.side not in ("A", "B"):
            raise ValueError(f"side must be 'A' or 'B', got {self.side!r}")
        object.__setattr__(self, "w", w)

    @property
    def entries(self):
        return np.diag(self.w).real.copy()

    @property
    def norm(self):
        return float(np.max(self.entries))

    @property
    def is_identity(self):
        return bool(np.allclose(self.entries, 1.0, rtol=0, atol=0))

    def operator(self):
        """The 4x4 operator ``I (x) w`` (side B) or ``w (x) I`` (side A)."""
        return kron(I2, self.w) if self.side == "B" else kron(self.w, I2)

    def scaled(self, factor):
        return Filter(self.w * factor, self.side)

    def with_side(self, side):
        return Filter(self.w, side)


class FilterDerivation(NamedTuple):
    filter: Filter
    rotated: DensityMatrix
    schmidt: SchmidtForm


def ppt_test(rho):
    """Smallest eigenvalue of the partial transpose and its eigenvector."""
    w, v = herm_eig(partial_transpose(rho))
    return PptVerdict(
        min_eigenvalue=float(w[0]),
        witness=v[:, 0].copy(),
        inseparable=bool(w[0] < -INSEPARABLE_TOL),
    )


def schmidt_form(witness):
    """Product unitaries taking ``witness`` to ``a|00> + b|11>`` with ``a >= b >= 0``.

    With coefficient matrix ``M = u diag(a, b) v^+`` the choice ``u1 = u^+``,
    ``u2 = v^T`` gives ``(u1 x u2) witness = a|00> + b|11>`` exactly.
    """
    psi = np.asarray(witness, dtype=complex).reshape(2, 2)
    u, s, v = svd2c(psi)
    return SchmidtForm(a=float(s[0]), b=float(s[1]), u1=dagger(u), u2=v.T.copy())


def derive_filter(rho, side="B", normalize="spectral"):
    """Rotate ``rho`` so the PT witness is in Schmidt form and build ``W = diag(a, b)``.

    The state is rotated by ``u1 (x) conj(u2)`` because a product unitary on
    ``rho`` acts on ``rho^T2`` with its B factor conjugated. ``normalize`` is
    ``'spectral'`` (largest entry 1, best pass probability) or ``'schmidt'``
    (``a^2 + b^2 = 1``, the raw coefficients).
    """
    verdict = ppt_test(rho)
    if not verdict.inseparable:
        raise NotInseparable(
            f"state has positive partial transpose (min eigenvalue {verdict.min_eigenvalue:.3e})"
        )
    sf = schmidt_form(verdict.witness)
    op = kron(sf.u1, np.conj(sf.u2))
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    rotated = DensityMatrix._trusted(op @ m @ dagger(op))
    if sf.a - sf.b < BALANCED_TOL:
        entries = np.ones(2)
    elif normalize == "spectral":
        entries = np.array([1.0, sf.b / sf.a])
    elif normalize == "schmidt":
        entries = np.array([sf.a, sf.b])
    else:
        raise ValueError(f"unknown normalization {normalize!r}")
    return FilterDerivation(Filter(np.diag(entries).astype(complex), side), rotated, sf)


def family_filter(c, d):
    """Filter for the ``p|c00 + d11> + (1-p)|c01 + d10>`` mixtures.

    Party A applies ``diag(d, c)`` (scaled to norm 1), which makes both
    components maximally entangled at once; the filtered state is a mixture of
    two Bell states with weights ``p`` and ``1 - p``.
    """
    if c <= 0 or d <= 0:
        raise ValueError("c and d must be positive")
    if abs(c * c + d * d - 1.0) > 1e-12:
        raise ValueError(f"c^2 + d^2 must equal 1, got {c * c + d * d:.15g}")
    top = max(c, d)
    return Filter(np.diag([d / top, c / top]).astype(complex), side="A")
