"""
Matrix groups acting on the plane and on the conformal 3-sphere.

Planar groups use the 3x3 block form ``[[1, 0], [b, A]]`` acting on
``(1, x)``.  The Moebius group is realized as the unimodular 5x5 matrices
preserving ``<z, z> = z1^2 + z2^2 + z3^2 - 2 z0 z4``; points of S^3 are null
rays.  Two coordinate models of the null cone are used:

* z-model (``null_lift``): ``y in R^3 -> (1, y, |y|^2 / 2)``.
* x-model: ``p in S^3 -> (1, p1, p2, p3, p4)`` for the form
  ``-x0^2 + x1^2 + ... + x4^2``, converted to z-coordinates by
  :func:`x_to_z`.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateRay, PoleError, ShapeError, SingularMatrix, ValidationError

#: Gram matrix of the Minkowski form in z-coordinates.
GRAM = np.array(
    [
        [0.0, 0, 0, 0, -1],
        [0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, 1, 0],
        [-1, 0, 0, 0, 0],
    ]
)

VALIDATION_TOL = 1e-10
ALGEBRA_TOL = 1e-8

_SQRT2 = np.sqrt(2.0)


class Geometry(str, enum.Enum):
    EUCLIDEAN2 = "euclidean"
    EQUIAFFINE2 = "equiaffine"
    MOEBIUS3 = "conformal"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {
            "euclidean2": cls.EUCLIDEAN2,
            "equiaffine2": cls.EQUIAFFINE2,
            "affine": cls.EQUIAFFINE2,
            "moebius3": cls.MOEBIUS3,
            "mobius": cls.MOEBIUS3,
            "moebius": cls.MOEBIUS3,
        }
        key = str(value).lower()
        return aliases.get(key) or cls(key)

    @property
    def size(self):
        return 5 if self is Geometry.MOEBIUS3 else 3


def inner(z, w):
    """Minkowski inner product over the last axis (z-coordinates)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    return (z[..., 1] * w[..., 1] + z[..., 2] * w[..., 2] + z[..., 3] * w[..., 3]
            - z[..., 0] * w[..., 4] - z[..., 4] * w[..., 0])


@dataclass(frozen=True)
class Violation:
    constraint: str
    magnitude: float


@dataclass(frozen=True, eq=False)
class GroupElement:
    geometry: Geometry
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry.parse(self.geometry))
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if other.geometry is not self.geometry:
            raise ValueError("cannot compose elements of different groups")
        return GroupElement(self.geometry, self.matrix @ other.matrix)

    def inverse(self):
        return GroupElement(self.geometry, np.linalg.inv(self.matrix))

    @property
    def A(self):
        """Linear block of a planar element."""
        return self.matrix[1:, 1:]

    @property
    def b(self):
        """Translation of a planar element."""
        return self.matrix[1:, 0]

    @classmethod
    def identity(cls, geometry):
        geometry = Geometry.parse(geometry)
        return cls(geometry, np.eye(geometry.size))

    @classmethod
    def planar(cls, geometry, A, b=(0.0, 0.0)):
        m = np.eye(3)
        m[1:, 1:] = A
        m[1:, 0] = b
        return cls(geometry, m)

    @classmethod
    def rotation(cls, theta, b=(0.0, 0.0)):
        c, s = np.cos(theta), np.sin(theta)
        return cls.planar(Geometry.EUCLIDEAN2, [[c, -s], [s, c]], b)


def _check_shape(geometry, matrix):
    n = geometry.size
    if matrix.shape != (n, n):
        raise ShapeError(f"{geometry.value} elements are {n}x{n}, got {matrix.shape}")


def validate(g, tol=VALIDATION_TOL):
    """List the violated group constraints of ``g`` (empty when valid)."""
    m = g.matrix
    _check_shape(g.geometry, m)
    out = []

    def check(name, value):
        mag = float(np.max(np.abs(value)))
        if not mag <= tol:
            out.append(Violation(name, mag))

    if g.geometry is Geometry.MOEBIUS3:
        gram = m.T @ GRAM @ m
        for a, b in [(0, 0), (4, 4)]:
            check(f"<e{a},e{b}>=0", gram[a, b])
        check("<e0,e4>=-1", gram[0, 4] + 1.0)
        for i in (1, 2, 3):
            check(f"<e{i},e0>=0", gram[i, 0])
            check(f"<e{i},e4>=0", gram[i, 4])
            for j in (1, 2, 3):
                check(f"<e{i},e{j}>=delta", gram[i, j] - (i == j))
        check("det=1", np.linalg.det(m) - 1.0)
        return out
    check("top row (1,0,0)", m[0] - np.array([1.0, 0.0, 0.0]))
    A = m[1:, 1:]
    check("det A=1", np.linalg.det(A) - 1.0)
    if g.geometry is Geometry.EUCLIDEAN2:
        check("A orthogonal", A.T @ A - np.eye(2))
    return out


def is_valid(g, tol=VALIDATION_TOL):
    return not validate(g, tol)


def frame_violations(frame, tol=VALIDATION_TOL):
    """Validation report for a 5x5 matrix whose columns are e0..e4."""
    return validate(GroupElement(Geometry.MOEBIUS3, frame), tol)


def frame_residual(frames):
    """Largest deviation of a stack of 5x5 frames from the frame relations.

    Vectorized companion of :func:`validate`; frames have shape (..., 5, 5)
    with columns e0..e4.
    """
    frames = np.asarray(frames)
    gram = np.swapaxes(frames, -1, -2) @ GRAM @ frames
    res = np.max(np.abs(gram - GRAM), axis=(-1, -2))
    return np.maximum(res, np.abs(np.linalg.det(frames) - 1.0))


# -- actions ---------------------------------------------------------------------------


def null_lift(y):
    """Null vector ``(1, y, |y|^2 / 2)`` representing ``y in R^3``."""
    y = np.asarray(y, dtype=float)
    return np.concatenate([np.ones(y.shape[:-1] + (1,)), y,
                           0.5 * np.sum(y * y, axis=-1, keepdims=True)], axis=-1)


def project_null(z, tol=1e-14):
    """Inverse of :func:`null_lift`: the R^3 point of a null ray."""
    z = np.asarray(z, dtype=float)
    z0 = z[..., 0]
    scale = np.max(np.abs(z), axis=-1)
    if np.any(np.abs(z0) <= tol * scale):
        raise DegenerateRay("null ray has vanishing z0 component (point at infinity)")
    return z[..., 1:4] / z0[..., None]


def x_to_z(x):
    """x-coordinates (form ``-x0^2 + sum xi^2``) to z-coordinates."""
    x = np.asarray(x, dtype=float)
    z = x.copy()
    z[..., 0] = (x[..., 0] + x[..., 4]) / _SQRT2
    z[..., 4] = (x[..., 0] - x[..., 4]) / _SQRT2
    return z


def z_to_x(z):
    z = np.asarray(z, dtype=float)
    x = z.copy()
    x[..., 0] = (z[..., 0] + z[..., 4]) / _SQRT2
    x[..., 4] = (z[..., 0] - z[..., 4]) / _SQRT2
    return x


def sphere_lift(p):
    """Null vector (z-coordinates) of a unit 4-vector ``p in S^3``."""
    p = np.asarray(p, dtype=float)
    x = np.concatenate([np.ones(p.shape[:-1] + (1,)), p], axis=-1)
    return x_to_z(x)


def project_sphere(z):
    """S^3 point of a null ray given in z-coordinates."""
    x = z_to_x(z)
    return x[..., 1:] / x[..., :1]


def stereographic(p):
    """S^3 -> R^3 from the north pole ``(0, 0, 0, 1)``: ``y = p[:3] / (1 - p4)``."""
    p = np.asarray(p, dtype=float)
    denom = 1.0 - p[..., 3]
    if np.any(np.abs(denom) < 1e-14):
        raise PoleError("stereographic projection is undefined at the north pole")
    return p[..., :3] / denom[..., None]


def inverse_stereographic(y):
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1, keepdims=True)
    return np.concatenate([2.0 * y, r2 - 1.0], axis=-1) / (r2 + 1.0)


def act(g, p):
    """Action of ``g`` on a point.

    Planar geometries take points of R^2.  For the Moebius group the point
    may be an R^3 point (3 components), an S^3 point (4 components, unit
    norm) or a null vector in z-coordinates (5 components); the result has
    the same kind.
    """
    problems = validate(g)
    if problems:
        raise ValidationError(f"invalid group element: {problems}")
    p = np.asarray(p, dtype=float)
    m = g.matrix
    if g.geometry is not Geometry.MOEBIUS3:
        return p @ m[1:, 1:].T + m[1:, 0]
    n = p.shape[-1]
    if n == 3:
        return project_null(null_lift(p) @ m.T)
    if n == 4:
        return project_sphere(sphere_lift(p) @ m.T)
    if n == 5:
        z = p @ m.T
        z0 = z[..., :1]
        if np.any(np.abs(z0) < 1e-14 * np.max(np.abs(z), axis=-1, keepdims=True)):
            raise DegenerateRay("image ray lies at infinity")
        return z / z0
    raise ShapeError(f"cannot act on points with {n} components")


# -- Lie algebras ---------------------------------------------------------------------


def algebra_violations(geometry, X, tol=ALGEBRA_TOL):
    """Constraints of the Lie algebra of ``geometry`` violated by ``X``."""
    geometry = Geometry.parse(geometry)
    X = np.asarray(X, dtype=float)
    _check_shape(geometry, X)
    out = []

    def check(name, value):
        mag = float(np.max(np.abs(value)))
        if not mag <= tol:
            out.append(Violation(name, mag))

    if geometry is Geometry.MOEBIUS3:
        # w^a_b is entry [a, b]: d e_b = e_a w^a_b
        check("w^0_4=0", X[0, 4])
        check("w^4_0=0", X[4, 0])
        check("w^4_4=-w^0_0", X[4, 4] + X[0, 0])
        for i in (1, 2, 3):
            check(f"w^4_{i}=w^{i}_0", X[4, i] - X[i, 0])
            check(f"w^{i}_4=w^0_{i}", X[i, 4] - X[0, i])
            for j in (1, 2, 3):
                check(f"w^{j}_{i}=-w^{i}_{j}", X[j, i] + X[i, j])
        return out
    check("top row zero", X[0])
    B = X[1:, 1:]
    if geometry is Geometry.EUCLIDEAN2:
        check("rotation block antisymmetric", B + B.T)
    else:
        check("trace zero", np.trace(B))
    return out


def random_algebra_element(geometry, rng):
    """Lie-algebra element with free entries uniform in [-1, 1]."""
    geometry = Geometry.parse(geometry)
    u = lambda *shape: rng.uniform(-1.0, 1.0, size=shape)  # noqa: E731
    if geometry is Geometry.MOEBIUS3:
        a = np.triu(u(5, 5), 1)
        return GRAM @ (a - a.T)
    X = np.zeros((3, 3))
    X[1:, 0] = u(2)
    if geometry is Geometry.EUCLIDEAN2:
        w = u(1)[0]
        X[1:, 1:] = [[0.0, -w], [w, 0.0]]
    else:
        a, b, c = u(3)
        X[1:, 1:] = [[a, b], [c, -a]]
    return X


def random_group_element(geometry, seed=None):
    """``expm`` of a random Lie-algebra element; valid by construction."""
    geometry = Geometry.parse(geometry)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return GroupElement(geometry, expm(random_algebra_element(geometry, rng)))


def maurer_cartan(path, t, h=1e-5):
    """Left-invariant derivative ``g(t)^-1 g'(t)`` by central differences.

    Args:
        path: callable ``t -> GroupElement`` (or matrix).
        t: parameter value.
        h: difference step.
    """
    def mat(s):
        g = path(s)
        return g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=float)

    g0 = mat(t)
    if abs(np.linalg.det(g0)) < 1e-300:
        raise SingularMatrix("group element is not invertible")
    dg = (mat(t + h) - mat(t - h)) / (2.0 * h)
    return np.linalg.solve(g0, dg)
