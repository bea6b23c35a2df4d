"""Dense tensor algebra for the curvature linear system.

The central object is the n^3 system

    a_ijk + c_jk * sum_q a_qiq = b_ijk,    i, j, k = 1..n,

where c is a symmetric positive semidefinite "direction matrix" (a single
tangent projector, or any convex combination of projectors).  The system has
the closed-form solution

    a_ijk = b_ijk - c_jk * [(I + c)^{-1} h]_i,    h_i = sum_q b_qiq,

and the associated n^3 x n^3 matrix L satisfies det(L) = det(I + c), so the
system is always uniquely solvable.

Two rank-3 tensor layouts are used throughout:

* gradient form ``a[i, j, k]``: tangential derivative of the projector field
  in direction e_i; symmetric in (j, k);
* bilinear form ``B[i, j, k]`` (read B_ij^k): classical vector-valued second
  fundamental form; symmetric in (i, j).

``to_bilinear_form`` / ``to_gradient_form`` convert between the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    AsymmetricInputError,
    InvalidDirectionMatrixError,
    InvalidInputError,
    SizeLimitError,
)

# Absolute tolerances for validation; all data handled here is O(1)..O(1/eps)
# and produced in float64.
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-10


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} contains NaN or Inf")


@dataclass(frozen=True)
class Projector:
    """Orthogonal projection onto a d-plane, stored as an n x n matrix."""

    entries: np.ndarray
    dim_d: int

    @classmethod
    def from_matrix(cls, mat, dim_d: int, tol: float = 1e-10) -> "Projector":
        mat = np.asarray(mat, dtype=float)
        _require_finite(mat, "projector")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidInputError("projector must be a square matrix")
        if np.max(np.abs(mat - mat.T)) > 1e-12 * max(1.0, np.max(np.abs(mat))):
            raise InvalidInputError("projector is not symmetric")
        mat = 0.5 * (mat + mat.T)
        if np.max(np.abs(mat @ mat - mat)) > tol:
            raise InvalidInputError("projector is not idempotent")
        if abs(np.trace(mat) - dim_d) > tol:
            raise InvalidInputError(
                f"projector trace {np.trace(mat):.3g} != rank {dim_d}"
            )
        return cls(mat, dim_d)

    @classmethod
    def from_basis(cls, basis) -> "Projector":
        """Projector onto the span of the columns of ``basis`` (n x d)."""
        q, _ = np.linalg.qr(np.asarray(basis, dtype=float))
        return cls(q @ q.T, q.shape[1])

    @classmethod
    def from_normal(cls, normal) -> "Projector":
        """Codimension-1 projector with unit kernel vector ``normal``."""
        nu = np.asarray(normal, dtype=float)
        nu = nu / np.linalg.norm(nu)
        return cls(np.eye(nu.size) - np.outer(nu, nu), nu.size - 1)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def orthonormal_basis(self) -> np.ndarray:
        """n x d matrix whose columns span the projected plane."""
        w, v = np.linalg.eigh(self.entries)
        return v[:, np.argsort(w)[::-1][: self.dim_d]]

    def unit_normal(self) -> np.ndarray:
        """Unit kernel vector (codimension 1 only), lexicographically positive."""
        if self.dim_d != self.n - 1:
            from .errors import CodimensionError

            raise CodimensionError(
                f"unit normal needs d = n-1, got d={self.dim_d}, n={self.n}"
            )
        w, v = np.linalg.eigh(self.entries)
        nu = v[:, np.argmin(w)]
        return fix_sign(nu)


def fix_sign(vec: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Flip ``vec`` so its first component larger than ``tol`` is positive."""
    for x in vec:
        if abs(x) > tol:
            return vec if x > 0 else -vec
    return vec


@dataclass(frozen=True)
class DirectionMatrix:
    """Symmetric PSD matrix with entries in [-1, 1].

    Arises as an average of tangent projectors; hence PSD with trace d and
    det(I + c) >= 2^d when the projectors share rank d.
    """

    entries: np.ndarray

    @classmethod
    def from_matrix(cls, mat) -> "DirectionMatrix":
        mat = np.asarray(mat, dtype=float)
        _require_finite(mat, "direction matrix")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidDirectionMatrixError("direction matrix must be square")
        if np.max(np.abs(mat - mat.T)) > SYMMETRY_TOL:
            raise InvalidDirectionMatrixError("direction matrix is not symmetric")
        mat = 0.5 * (mat + mat.T)
        w, v = np.linalg.eigh(mat)
        if w.min() < -PSD_TOL:
            raise InvalidDirectionMatrixError(
                f"negative eigenvalue {w.min():.3g} below -{PSD_TOL:g}"
            )
        if w.min() < 0.0:
            # Rounding from averaged projectors; clamp tiny negatives to zero.
            mat = (v * np.clip(w, 0.0, None)) @ v.T
            mat = 0.5 * (mat + mat.T)
        if np.max(np.abs(mat)) > 1.0 + SYMMETRY_TOL:
            raise InvalidDirectionMatrixError("entries exceed 1 in absolute value")
        return cls(mat)

    @classmethod
    def from_projectors(cls, projectors, weights=None) -> "DirectionMatrix":
        mats = [p.entries if isinstance(p, Projector) else np.asarray(p, float)
                for p in projectors]
        if weights is None:
            weights = np.full(len(mats), 1.0 / len(mats))
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
        return cls.from_matrix(sum(w * m for w, m in zip(weights, mats)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def inverse_norm(self) -> float:
        """Computed operator norm of (I + c)^{-1} (no closed-form constant)."""
        return float(
            np.linalg.norm(np.linalg.inv(np.eye(self.n) + self.entries), ord=2)
        )


def comatrix_norm_bound(n: int, d: int) -> float:
    """Explicit bound on ||(I + c)^{-1}|| from the cofactor formula.

    Entries of I + c are at most 2 in absolute value, so each cofactor is at
    most (n-1)! * 2^(n-1), while det(I + c) >= 2^d.
    """
    return n * factorial(n - 1) * 2.0 ** (n - 1) / 2.0**d


def _as_tensor_entries(t) -> np.ndarray:
    entries = t.entries if hasattr(t, "entries") else np.asarray(t, dtype=float)
    entries = np.asarray(entries, dtype=float)
    if entries.ndim != 3 or len(set(entries.shape)) != 1:
        raise InvalidInputError("rank-3 tensor must have shape (n, n, n)")
    return entries


@dataclass(frozen=True)
class CurvTensor3:
    """Rank-3 tensor in gradient form, indexed [i, j, k] over {0..n-1}^3."""

    entries: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "CurvTensor3":
        return cls(np.zeros((n, n, n)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def jk_asymmetry(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.transpose(0, 2, 1))))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))


@dataclass(frozen=True)
class SffTensor:
    """Rank-3 tensor in bilinear form; entry [i, j, k] reads B_ij^k."""

    entries: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "SffTensor":
        return cls(np.zeros((n, n, n)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def ij_asymmetry(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.transpose(1, 0, 2))))


def solve_curvature_system(c, b) -> CurvTensor3:
    """Solve a_ijk + c_jk * sum_q a_qiq = b_ijk via the closed form.

    ``c`` may be a DirectionMatrix or any array accepted by
    ``DirectionMatrix.from_matrix``; ``b`` a CurvTensor3 or raw (n, n, n)
    array.  The (I + c) solve uses a direct dense factorization; systems are
    tiny (n <= ~10), so runtime is dominated by call count, not size.
    """
    if not isinstance(c, DirectionMatrix):
        c = DirectionMatrix.from_matrix(c)
    bt = _as_tensor_entries(b)
    _require_finite(bt, "right-hand side tensor")
    if bt.shape[0] != c.n:
        raise InvalidInputError("tensor and direction matrix sizes disagree")
    h = np.einsum("qiq->i", bt)
    g = np.linalg.solve(np.eye(c.n) + c.entries, h)
    a = bt - np.einsum("i,jk->ijk", g, c.entries)
    return CurvTensor3(a)


def build_full_system_matrix(c) -> np.ndarray:
    """Assemble the dense n^3 x n^3 system matrix L (test scale, n <= 4).

    Rows and columns are ordered lexicographically in (i, j, k); the row for
    (i, j, k) adds c_jk to every column of the form (q, i, q).
    """
    if not isinstance(c, DirectionMatrix):
        c = DirectionMatrix.from_matrix(c)
    n = c.n
    if n > 4:
        raise SizeLimitError(f"dense system assembly limited to n <= 4, got {n}")
    size = n**3
    L = np.eye(size)
    cm = c.entries

    def flat(i, j, k):
        return (i * n + j) * n + k

    for i in range(n):
        for j in range(n):
            for k in range(n):
                row = flat(i, j, k)
                for q in range(n):
                    L[row, flat(q, i, q)] += cm[j, k]
    return L


def to_bilinear_form(a, tol: float = SYMMETRY_TOL) -> SffTensor:
    """Convert gradient form to bilinear form: B_ij^k = (a_ijk + a_jik - a_kij)/2.

    Requires (j, k)-symmetry of ``a``; the input is symmetrized before use
    when within ``tol`` and rejected beyond it.
    """
    at = _as_tensor_entries(a)
    _require_finite(at, "gradient-form tensor")
    if np.max(np.abs(at - at.transpose(0, 2, 1))) > tol:
        raise AsymmetricInputError("gradient-form tensor is not (j,k)-symmetric")
    at = 0.5 * (at + at.transpose(0, 2, 1))
    # transpose(1, 0, 2) reads a[j, i, k]; transpose(1, 2, 0) reads a[k, i, j]
    out = 0.5 * (at + at.transpose(1, 0, 2) - at.transpose(1, 2, 0))
    return SffTensor(out)


def to_gradient_form(b, tol: float = SYMMETRY_TOL) -> CurvTensor3:
    """Convert bilinear form to gradient form: a_ijk = B_ij^k + B_ik^j.

    Requires (i, j)-symmetry of ``b``; inverse of :func:`to_bilinear_form` on
    the symmetric tensor classes.
    """
    bt = _as_tensor_entries(b)
    _require_finite(bt, "bilinear-form tensor")
    if np.max(np.abs(bt - bt.transpose(1, 0, 2))) > tol:
        raise AsymmetricInputError("bilinear-form tensor is not (i,j)-symmetric")
    bt = 0.5 * (bt + bt.transpose(1, 0, 2))
    return CurvTensor3(bt + bt.transpose(0, 2, 1))


def system_residual(c, a, b) -> float:
    """Max-abs residual of the curvature system at candidate solution ``a``."""
    cm = c.entries if isinstance(c, DirectionMatrix) else np.asarray(c, float)
    at = _as_tensor_entries(a)
    bt = _as_tensor_entries(b)
    s = np.einsum("qiq->i", at)
    lhs = at + np.einsum("jk,i->ijk", cm, s)
    return float(np.max(np.abs(lhs - bt)))
