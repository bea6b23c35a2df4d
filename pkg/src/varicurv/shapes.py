"""Analytic shapes with exact curvature fields and area-uniform samplers.

Each shape produces point clouds with exact tangent projectors attached and
knows its classical principal curvatures pointwise.  Principal curvatures are
reported with respect to the inward normal, so convex shapes get positive
values; the estimator side only recovers curvature signs up to a global flip
per point, which callers account for when comparing.

Sampling is area-uniform by low-discrepancy construction (golden-angle
spirals, inverse-CDF stratification), randomized per seed by global rotations
and sequence offsets.  Independent uniform draws would put an
O(1/sqrt(k_neighbors)) noise floor under every kernel-weighted estimate,
drowning the convergence rates this module exists to expose; quasi-uniform
clouds match the mesh-derived datasets the estimator targets.

Positions can be perturbed by isotropic Gaussian noise (planes stay exact);
a separate knob rotates the planes by small random rotations to emulate
estimated-tangent error independently of position noise.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .varifold import PointCloudVarifold, validate_cloud


@dataclass(frozen=True)
class ExactCurvature:
    """Ground-truth pointwise curvature data (inward-normal convention)."""

    kappas: np.ndarray
    normal: np.ndarray
    gauss: float
    mean_vector: np.ndarray
    singular: bool = False


@dataclass(frozen=True)
class ShapeSample:
    """A sampled cloud plus per-point ground truth at the pre-noise points."""

    cloud: PointCloudVarifold
    base_points: np.ndarray
    kappas: np.ndarray
    normals: np.ndarray
    gauss: np.ndarray
    mean_vectors: np.ndarray
    edge_distance: np.ndarray | None = None


_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
# Plastic-number reciprocals: the standard 2-d low-discrepancy lattice shifts.
_PLASTIC = 1.324717957244746
_R2_SHIFT = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC**2])


def _r2_sequence(m: int, offset: np.ndarray) -> np.ndarray:
    """m low-discrepancy points in [0,1)^2 (shifted plastic lattice)."""
    i = np.arange(1, m + 1)[:, None]
    return np.mod(offset[None, :] + i * _R2_SHIFT[None, :], 1.0)


def _random_rotation(n: int, rng) -> np.ndarray:
    """Haar-ish random rotation from the QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _rotate_planes(planes: np.ndarray, sigma: float, rng) -> np.ndarray:
    """Conjugate each plane by a small random rotation (angle ~ N(0, sigma))."""
    n = planes.shape[1]
    out = np.empty_like(planes)
    for i in range(planes.shape[0]):
        angle = rng.normal(0.0, sigma)
        if n == 2:
            c, s = np.cos(angle), np.sin(angle)
            rot = np.array([[c, -s], [s, c]])
        elif n == 3:
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            k = np.array(
                [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
            )
            rot = np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)
        else:
            raise InvalidInputError("plane perturbation implemented for n in {2, 3}")
        out[i] = rot @ planes[i] @ rot.T
    return out


class AnalyticShape(abc.ABC):
    """Base class: a sampler plus exact curvature evaluation."""

    name: str
    dim_d: int
    ambient_n: int

    @abc.abstractmethod
    def _draw(self, n_points: int, rng) -> tuple[np.ndarray, np.ndarray, dict]:
        """Return (points, planes, extras) at exact surface positions."""

    @abc.abstractmethod
    def exact_report(self, point) -> ExactCurvature:
        """Exact curvatures at a point on the shape (projected if within 1e-9)."""

    def sample(
        self,
        n_points: int,
        noise_sigma: float = 0.0,
        seed: int = 0,
        plane_sigma: float = 0.0,
    ) -> ShapeSample:
        if n_points < 10:
            raise InvalidInputError("need at least 10 sample points")
        rng = np.random.default_rng(seed)
        base, planes, extras = self._draw(n_points, rng)
        positions = base
        if noise_sigma > 0.0:
            positions = base + rng.normal(0.0, noise_sigma, size=base.shape)
        if plane_sigma > 0.0:
            planes = _rotate_planes(planes, plane_sigma, rng)
        masses = np.ones(n_points)
        cloud = validate_cloud(positions, planes, masses, dim_d=self.dim_d)
        reports = [self.exact_report(p) for p in base]
        return ShapeSample(
            cloud=cloud,
            base_points=base,
            kappas=np.array([r.kappas for r in reports]),
            normals=np.array([r.normal for r in reports]),
            gauss=np.array([r.gauss for r in reports]),
            mean_vectors=np.array([r.mean_vector for r in reports]),
            edge_distance=extras.get("edge_distance"),
        )


def _require_on_shape(dev: float, what: str) -> None:
    if dev > 1e-9:
        raise InvalidInputError(f"point is {dev:.3g} away from the {what}")


class Sphere(AnalyticShape):
    dim_d = 2
    ambient_n = 3

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise InvalidInputError("radius must be positive")
        self.radius = radius
        self.name = "sphere"

    def _draw(self, n_points, rng):
        # Golden-angle spiral: stratified heights (Archimedes projection) with
        # golden-ratio longitudes, randomized by a global rotation.
        i = np.arange(n_points)
        z = 1.0 - 2.0 * (i + 0.5) / n_points
        phi = _GOLDEN_ANGLE * i + rng.uniform(0.0, 2.0 * np.pi)
        s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        unit = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
        unit = unit @ _random_rotation(3, rng).T
        pts = self.radius * unit
        planes = np.eye(3)[None] - np.einsum("li,lj->lij", unit, unit)
        return pts, planes, {}

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        r = np.linalg.norm(p)
        _require_on_shape(abs(r - self.radius), "sphere")
        outward = p / r
        k = 1.0 / self.radius
        return ExactCurvature(
            kappas=np.array([k, k]),
            normal=-outward,
            gauss=k * k,
            mean_vector=2.0 * k * (-outward),
        )

    def gradient_tensor(self, point) -> np.ndarray:
        """Exact gradient-form curvature tensor: -(P_ij x_k + P_ik x_j)/R^2."""
        p = np.asarray(point, dtype=float)
        proj = np.eye(3) - np.outer(p, p) / (self.radius**2)
        t = np.einsum("ij,k->ijk", proj, p) + np.einsum("ik,j->ijk", proj, p)
        return -t / self.radius**2


class Circle(AnalyticShape):
    dim_d = 1
    ambient_n = 2

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise InvalidInputError("radius must be positive")
        self.radius = radius
        self.name = "circle"

    def _draw(self, n_points, rng):
        theta = 2.0 * np.pi * (np.arange(n_points) + 0.5) / n_points
        theta = theta + rng.uniform(0.0, 2.0 * np.pi)
        pts = self.radius * np.column_stack([np.cos(theta), np.sin(theta)])
        tang = np.column_stack([-np.sin(theta), np.cos(theta)])
        planes = np.einsum("li,lj->lij", tang, tang)
        return pts, planes, {}

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        r = np.linalg.norm(p)
        _require_on_shape(abs(r - self.radius), "circle")
        outward = p / r
        k = 1.0 / self.radius
        return ExactCurvature(
            kappas=np.array([k]),
            normal=-outward,
            gauss=k,
            mean_vector=k * (-outward),
        )

    def gradient_tensor(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        proj = np.eye(2) - np.outer(p, p) / (self.radius**2)
        t = np.einsum("ij,k->ijk", proj, p) + np.einsum("ik,j->ijk", proj, p)
        return -t / self.radius**2


class Torus(AnalyticShape):
    dim_d = 2
    ambient_n = 3

    def __init__(self, r_major: float = 2.0, r_minor: float = 0.5):
        if not 0 < r_minor < r_major:
            raise InvalidInputError("need 0 < r_minor < r_major")
        self.r_major = r_major
        self.r_minor = r_minor
        self.name = "torus"

    def _point(self, theta, phi):
        ring = self.r_major + self.r_minor * np.cos(theta)
        return np.column_stack(
            [ring * np.cos(phi), ring * np.sin(phi), self.r_minor * np.sin(theta)]
        )

    def _draw(self, n_points, rng):
        # Area element is proportional to R + r cos(theta); invert its CDF
        # F(theta) = (R theta + r sin(theta)) / (2 pi R) on stratified
        # quantiles by Newton (monotone since r < R), golden-angle azimuths.
        i = np.arange(n_points)
        v = np.mod((i + 0.5) / n_points + rng.uniform(), 1.0)
        target = 2.0 * np.pi * self.r_major * v
        thetas = 2.0 * np.pi * v
        for _ in range(30):
            g = self.r_major * thetas + self.r_minor * np.sin(thetas) - target
            thetas -= g / (self.r_major + self.r_minor * np.cos(thetas))
        phis = _GOLDEN_ANGLE * i + rng.uniform(0.0, 2.0 * np.pi)
        pts = self._point(thetas, phis)
        t_phi = np.column_stack([-np.sin(phis), np.cos(phis), np.zeros(n_points)])
        t_theta = np.column_stack(
            [
                -np.sin(thetas) * np.cos(phis),
                -np.sin(thetas) * np.sin(phis),
                np.cos(thetas),
            ]
        )
        planes = np.einsum("li,lj->lij", t_phi, t_phi) + np.einsum(
            "li,lj->lij", t_theta, t_theta
        )
        return pts, planes, {}

    def _angles(self, p):
        phi = np.arctan2(p[1], p[0])
        rho = np.hypot(p[0], p[1])
        theta = np.arctan2(p[2], rho - self.r_major)
        return theta, phi

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        theta, phi = self._angles(p)
        nearest = self._point(np.array([theta]), np.array([phi]))[0]
        _require_on_shape(float(np.linalg.norm(p - nearest)), "torus")
        outward = np.array(
            [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), np.sin(theta)]
        )
        k_tube = 1.0 / self.r_minor
        k_ring = np.cos(theta) / (self.r_major + self.r_minor * np.cos(theta))
        kappas = np.sort(np.array([k_tube, k_ring]))[::-1]
        return ExactCurvature(
            kappas=kappas,
            normal=-outward,
            gauss=k_tube * k_ring,
            mean_vector=(k_tube + k_ring) * (-outward),
        )


class Cylinder(AnalyticShape):
    dim_d = 2
    ambient_n = 3

    def __init__(self, radius: float = 1.0, height: float = 2.0):
        if radius <= 0 or height <= 0:
            raise InvalidInputError("radius and height must be positive")
        self.radius = radius
        self.height = height
        self.name = "cylinder"

    def _draw(self, n_points, rng):
        i = np.arange(n_points)
        phi = _GOLDEN_ANGLE * i + rng.uniform(0.0, 2.0 * np.pi)
        z = (np.mod((i + 0.5) / n_points + rng.uniform(), 1.0) - 0.5) * self.height
        pts = np.column_stack(
            [self.radius * np.cos(phi), self.radius * np.sin(phi), z]
        )
        t_phi = np.column_stack([-np.sin(phi), np.cos(phi), np.zeros(n_points)])
        planes = np.einsum("li,lj->lij", t_phi, t_phi)
        planes[:, 2, 2] += 1.0
        return pts, planes, {}

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        rho = np.hypot(p[0], p[1])
        _require_on_shape(abs(rho - self.radius), "cylinder")
        outward = np.array([p[0] / rho, p[1] / rho, 0.0])
        k = 1.0 / self.radius
        return ExactCurvature(
            kappas=np.array([k, 0.0]),
            normal=-outward,
            gauss=0.0,
            mean_vector=k * (-outward),
        )


class PlanePatch(AnalyticShape):
    dim_d = 2
    ambient_n = 3

    def __init__(self, side: float = 1.0):
        if side <= 0:
            raise InvalidInputError("side must be positive")
        self.side = side
        self.name = "plane"

    def _draw(self, n_points, rng):
        uv = _r2_sequence(n_points, rng.uniform(size=2))
        xy = (uv - 0.5) * self.side
        pts = np.column_stack([xy, np.zeros(n_points)])
        planes = np.broadcast_to(np.diag([1.0, 1.0, 0.0]), (n_points, 3, 3)).copy()
        return pts, planes, {}

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        _require_on_shape(abs(p[2]), "plane")
        return ExactCurvature(
            kappas=np.zeros(2),
            normal=np.array([0.0, 0.0, 1.0]),
            gauss=0.0,
            mean_vector=np.zeros(3),
        )


class Cube(AnalyticShape):
    """Surface of an axis-aligned cube; faces are flat, edges are singular."""

    dim_d = 2
    ambient_n = 3

    def __init__(self, side: float = 1.0):
        if side <= 0:
            raise InvalidInputError("side must be positive")
        self.side = side
        self.name = "cube"

    def _draw(self, n_points, rng):
        half = self.side / 2.0
        base, extra = divmod(n_points, 6)
        counts = [base + (1 if f < extra else 0) for f in range(6)]
        pts = np.empty((n_points, 3))
        planes = np.empty((n_points, 3, 3))
        edge_dist = np.empty(n_points)
        row = 0
        for face in range(6):
            axis, sign = divmod(face, 2)
            sign = 1.0 if sign == 0 else -1.0
            m = counts[face]
            uv = (_r2_sequence(m, rng.uniform(size=2)) - 0.5) * self.side
            block = np.empty((m, 3))
            others = [a for a in range(3) if a != axis]
            block[:, axis] = sign * half
            block[:, others[0]] = uv[:, 0]
            block[:, others[1]] = uv[:, 1]
            nu = np.zeros(3)
            nu[axis] = sign
            pts[row : row + m] = block
            planes[row : row + m] = np.eye(3) - np.outer(nu, nu)
            edge_dist[row : row + m] = half - np.max(np.abs(uv), axis=1)
            row += m
        return pts, planes, {"edge_distance": edge_dist}

    def exact_report(self, point) -> ExactCurvature:
        p = np.asarray(point, dtype=float)
        half = self.side / 2.0
        dev = np.max(np.abs(p)) - half
        _require_on_shape(abs(dev), "cube surface")
        on_face = np.abs(np.abs(p) - half) < 1e-12
        axis = int(np.argmax(np.abs(p)))
        nu = np.zeros(3)
        nu[axis] = np.sign(p[axis])
        if on_face.sum() > 1:
            # Edge or corner: no classical pointwise curvature.
            return ExactCurvature(
                kappas=np.full(2, np.nan),
                normal=nu,
                gauss=np.nan,
                mean_vector=np.full(3, np.nan),
                singular=True,
            )
        return ExactCurvature(
            kappas=np.zeros(2),
            normal=nu,
            gauss=0.0,
            mean_vector=np.zeros(3),
        )


def shape_by_name(name: str, **kwargs) -> AnalyticShape:
    """Construct a shape from its id; raises on unknown ids."""
    registry = {
        "sphere": Sphere,
        "circle": Circle,
        "torus": Torus,
        "cylinder": Cylinder,
        "plane": PlanePatch,
        "cube": Cube,
    }
    try:
        cls = registry[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown shape {name!r}; choose from {sorted(registry)}"
        ) from None
    return cls(**kwargs)
