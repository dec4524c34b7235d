"""Angular-momentum algebra for a single d electron coupled to a nuclear spin.

All operators are dense complex numpy arrays in the ``|m = -j, ..., +j>``
basis (m ascending, Condon-Shortley phases). Composite operators live on the
product space orbital (l=2) x electron spin (1/2) x nuclear spin (I), always in
that slot order; see :class:`Basis`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, isclose

import numpy as np

SLOTS = ("orbital", "spin", "nuclear")


def _twice(j: float) -> int:
    twoj = 2 * j
    if j < 0 or not isclose(twoj, round(twoj), abs_tol=1e-12):
        raise ValueError(f"angular momentum must be a non-negative multiple of 1/2, got {j!r}")
    return int(round(twoj))


@dataclass(frozen=True)
class Basis:
    """Product basis ``|m_l> x |m_s> x |m_I>`` with m_l=-2..2, m_s=-1/2..1/2.

    ``nuclear_spin=0`` gives a one-dimensional nuclear slot so that the
    electronic-only problem shares the same layout.
    """

    nuclear_spin: float = 0.0

    def __post_init__(self):
        _twice(self.nuclear_spin)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (5, 2, _twice(self.nuclear_spin) + 1)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def _grid(self):
        ml = np.arange(-2, 3, dtype=float)
        ms = np.array([-0.5, 0.5])
        mi = np.arange(self.dims[2]) - self.nuclear_spin
        return np.meshgrid(ml, ms, mi, indexing="ij")

    @property
    def m_l(self) -> np.ndarray:
        return self._grid()[0].ravel()

    @property
    def m_s(self) -> np.ndarray:
        return self._grid()[1].ravel()

    @property
    def m_i(self) -> np.ndarray:
        return self._grid()[2].ravel()

    def sectors(self, total: bool = True) -> np.ndarray:
        """Integer label of the C3 eigenvalue of each basis state.

        States share a label iff ``exp(-2 pi i jz / 3)`` agrees, with
        ``jz = m_l + m_s (+ m_I when total)``.
        """
        jz = self.m_l + self.m_s + (self.m_i if total else 0.0)
        return np.mod(np.rint(2 * jz).astype(int), 6)


@dataclass(frozen=True)
class EulerAngles:
    """Active z-y-z rotation ``R = Rz(alpha) Ry(beta) Rz(gamma)`` (radians)."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.alpha, self.beta, self.gamma])):
            raise ValueError("Euler angles must be finite")

    def matrix(self) -> np.ndarray:
        """3x3 Cartesian rotation matrix."""

        def rz(a):
            c, s = np.cos(a), np.sin(a)
            return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

        c, s = np.cos(self.beta), np.sin(self.beta)
        ry = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
        return rz(self.alpha) @ ry @ rz(self.gamma)


@lru_cache(maxsize=None)
def _jops(twoj: int):
    j = twoj / 2
    m = np.arange(twoj + 1) - j
    jp = np.zeros((twoj + 1, twoj + 1), dtype=complex)
    # <m+1|J+|m> = sqrt(j(j+1) - m(m+1))
    for a in range(twoj):
        jp[a + 1, a] = np.sqrt(j * (j + 1) - m[a] * (m[a] + 1))
    jm = jp.conj().T
    ops = ((jp + jm) / 2, (jp - jm) / 2j, np.diag(m).astype(complex))
    for op in ops:
        op.setflags(write=False)
    return ops


def spin_operators(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Sx, Sy, Sz) for spin ``s`` in units of hbar.

    Raises ValueError unless ``2s`` is a non-negative integer.
    """
    return tuple(op.copy() for op in _jops(_twice(s)))


def l2_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orbital angular momentum (Lx, Ly, Lz) within the l=2 manifold."""
    return spin_operators(2)


def ladder(ops):
    jx, jy, _ = ops
    return jx + 1j * jy, jx - 1j * jy


def wigner_small_d(j: float, beta: float) -> np.ndarray:
    """Reduced rotation matrix ``d^j_{m'm}(beta) = <j m'|exp(-i beta Jy)|j m>``.

    Evaluated from the explicit Wigner sum, indexed ``[m' + j, m + j]``.
    """
    twoj = _twice(j)
    n = twoj + 1
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    d = np.zeros((n, n))
    for a in range(n):
        mp = a - j
        for b in range(n):
            m = b - j
            jpm, jmm = int(round(j + m)), int(round(j - m))
            jpmp, jmmp = int(round(j + mp)), int(round(j - mp))
            dm = int(round(mp - m))
            pref = np.sqrt(float(factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)))
            total = 0.0
            for k in range(max(0, -dm), min(jpm, jmmp) + 1):
                den = factorial(jpm - k) * factorial(k) * factorial(dm + k) * factorial(jmmp - k)
                total += (-1) ** (dm + k) / den * c ** (twoj + m - mp - 2 * k) * s ** (dm + 2 * k)
            d[a, b] = pref * total
    return d


def wigner_d(j: float, angles: EulerAngles) -> np.ndarray:
    """``D^j(R) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)``."""
    m = np.arange(_twice(j) + 1) - j
    d = wigner_small_d(j, angles.beta)
    return np.exp(-1j * angles.alpha * m)[:, None] * d * np.exp(-1j * angles.gamma * m)[None, :]


def wigner_d_l2(angles: EulerAngles) -> np.ndarray:
    """5x5 unitary rotating l=2 states by the z-y-z Euler rotation ``angles``."""
    return wigner_d(2, angles)


def spherical_harmonics_l2(theta, phi) -> np.ndarray:
    """Y_2m(theta, phi) for m=-2..2 (Condon-Shortley), stacked on axis 0."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    y0 = np.sqrt(5 / (16 * np.pi)) * (3 * ct**2 - 1)
    y1 = -np.sqrt(15 / (8 * np.pi)) * st * ct * np.exp(1j * phi)
    y2 = np.sqrt(15 / (32 * np.pi)) * st**2 * np.exp(2j * phi)
    # Y_{l,-m} = (-1)^m conj(Y_{l,m})
    return np.stack([np.conj(y2), -np.conj(y1), y0 + 0j * phi, y1, y2])


def dipolar_tensor() -> np.ndarray:
    """Matrix elements of ``3 n_i n_j - delta_ij`` between l=2 states.

    Returns an array of shape (3, 3, 5, 5); ``T[i, j]`` is the 5x5 matrix for
    Cartesian components (i, j) in x, y, z order. Built from the operator
    equivalent ``-2/((2l-1)(2l+3)) [3/2 (L_i L_j + L_j L_i) - delta_ij l(l+1)]``.
    """
    L = l2_operators()
    l = 2
    pref = -2.0 / ((2 * l - 1) * (2 * l + 3))
    eye = np.eye(5)
    T = np.empty((3, 3, 5, 5), dtype=complex)
    for i in range(3):
        for j in range(3):
            T[i, j] = pref * (1.5 * (L[i] @ L[j] + L[j] @ L[i]) - (i == j) * l * (l + 1) * eye)
    return T


def kron_embed(op: np.ndarray, slot: str, dims) -> np.ndarray:
    """Embed a single-slot operator into the orbital x spin x nuclear space."""
    op = np.asarray(op)
    k = SLOTS.index(slot)
    if op.shape != (dims[k], dims[k]):
        raise ValueError(f"operator of shape {op.shape} does not fit {slot} slot of dimension {dims[k]}")
    factors = [np.eye(d) for d in dims]
    factors[k] = op
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def c3_rotation(dims, total: bool = False) -> np.ndarray:
    """Unitary ``exp(-2 pi i Jz / 3)`` for a rotation by 2 pi/3 about the C3 axis.

    ``Jz = Lz + Sz`` acts on the orbital and electron-spin slots; with
    ``total=True`` the nuclear spin is rotated as well.
    """
    basis = Basis((dims[2] - 1) / 2)
    jz = basis.m_l + basis.m_s + (basis.m_i if total else 0.0)
    return np.diag(np.exp(-2j * np.pi / 3 * jz))


def time_reversal_unitary(dims) -> np.ndarray:
    """Unitary part U of the time-reversal operator ``Theta = U K``.

    ``U = exp(-i pi Jy)`` slot by slot, K being complex conjugation in the
    product basis.
    """
    js = [(d - 1) / 2 for d in dims]
    out = np.ones((1, 1))
    for j in js:
        out = np.kron(out, wigner_small_d(j, np.pi))
    return out.astype(complex)
