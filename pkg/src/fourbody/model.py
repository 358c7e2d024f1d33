"""Equilateral four body model.

Three primaries with masses m1 >= m2 >= m3 > 0 (normalized to sum 1) sit at
the vertices of a unit equilateral triangle rotating uniformly about the
center of mass; a fourth massless particle moves in their field.  In the
co-rotating frame the primaries are fixed and the dynamics has a conserved
Jacobi integral.

This module supplies the geometry (closed-form primary positions), the
classical 6D vector field, a polynomial 9D embedding obtained by appending
the three reciprocal distances as new variables, the Jacobi integral in both
coordinate systems, and the coefficient-space versions of the embedded field
that act on Fourier and Fourier-Taylor data: the per-order field map, its
derivative at an order-zero sequence, the order-alpha remainder (everything
in the alpha layer not involving the alpha coefficient itself), the two
unfolding terms, and the scalar phase/initialization conditions.

Everything here is evaluated in interval arithmetic over immutable inputs,
so all operations are safe to run in parallel across Taylor orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .interval import (
    CZERO,
    ComplexInterval,
    Interval,
    IntervalDomainError,
    ZERO,
    _as_iv,
)
from .ivarray import down_sum, up_sum
from .seqspace import (
    FourierSeq,
    FourierTaylorSeq,
    WeightMismatch,
    conv,
    ft_conv,
)

__all__ = [
    "DegenerateMassCombination",
    "CollisionSingularity",
    "MissingLowerOrderData",
    "OrderTooLow",
    "MassTriple",
    "PrimaryConfig",
    "PhaseAnchor",
    "interval_from_rational",
    "mass_combination",
    "primaries",
    "field_f",
    "embed_R",
    "field_F",
    "jacobi",
    "jacobi_embedded",
    "field_F_grid",
    "field_F_seq",
    "DF0",
    "dF0",
    "dF0_apply",
    "remainder_Ralpha",
    "unfold_orbit_G",
    "unfold_dissipative_Gbeta",
    "eta_phase",
    "xi_phase",
]


class DegenerateMassCombination(ValueError):
    """The mass combination K cannot be bounded away from zero."""


class CollisionSingularity(ArithmeticError):
    """A distance to a primary cannot be bounded away from zero."""


class MissingLowerOrderData(ValueError):
    """A grid lacks Taylor layers required by the requested order."""


class OrderTooLow(ValueError):
    """The remainder is only defined for orders two and higher."""


# ---------------------------------------------------------------------------
# masses and primary geometry


def interval_from_rational(q) -> Interval:
    """Tight interval enclosure of a rational number."""
    q = Fraction(q)
    f = float(q)
    fq = Fraction(f)
    if fq == q:
        return Interval.point(f)
    if fq < q:
        return Interval(f, math.nextafter(f, math.inf))
    return Interval(math.nextafter(f, -math.inf), f)


def _mass_iv(v) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, float):
        # floats are read as their shortest decimal literal, so 0.33 means
        # 33/100; pass a string like "1/3" for non-decimal rationals
        return interval_from_rational(Fraction(repr(v)))
    return interval_from_rational(v)


@dataclass(frozen=True)
class MassTriple:
    """Ordered normalized masses, each stored as an interval enclosure."""

    m1: Interval
    m2: Interval
    m3: Interval

    def __post_init__(self):
        if not self.m3.lo > 0.0:
            raise ValueError("smallest mass must be positive")
        if self.m3.lo > self.m2.hi or self.m2.lo > self.m1.hi:
            raise ValueError("masses must satisfy m3 <= m2 <= m1")
        total = self.m1 + self.m2 + self.m3
        if not total.contains(1.0):
            raise ValueError("masses must sum to 1 within enclosure")

    @classmethod
    def of(cls, m1, m2, m3) -> "MassTriple":
        return cls(_mass_iv(m1), _mass_iv(m2), _mass_iv(m3))

    def __iter__(self):
        return iter((self.m1, self.m2, self.m3))

    def __getitem__(self, j: int) -> Interval:
        return (self.m1, self.m2, self.m3)[j]


@dataclass(frozen=True)
class PrimaryConfig:
    """Interval positions of the three primaries plus their masses.

    collision_tol widens the forbidden neighborhoods of the primaries: a
    distance enclosure whose square dips to collision_tol**2 or below is
    treated as a collision.
    """

    masses: MassTriple
    p1: tuple
    p2: tuple
    p3: tuple
    collision_tol: float = 0.0

    def __post_init__(self):
        for p in (self.p1, self.p2, self.p3):
            if len(p) != 3 or not p[2].contains(0.0):
                raise ValueError("primaries must lie in the z = 0 plane")
        for axis in range(3):
            com = (
                self.masses.m1 * self.p1[axis]
                + self.masses.m2 * self.p2[axis]
                + self.masses.m3 * self.p3[axis]
            )
            if not com.contains(0.0):
                raise ValueError("center of mass must enclose the origin")
        d12 = self._dist2(self.p1, self.p2)
        d13 = self._dist2(self.p1, self.p3)
        d23 = self._dist2(self.p2, self.p3)
        try:
            side = d12.intersect(d13).intersect(d23)
        except IntervalDomainError:
            raise ValueError("primaries are not equilateral within enclosure")
        object.__setattr__(self, "_side2", side)

    @staticmethod
    def _dist2(p, q) -> Interval:
        return sum(((p[i] - q[i]).pow_int(2) for i in range(3)), ZERO)

    def position(self, j: int):
        """Primary j in {0,1,2} as an (x, y, z) interval triple."""
        return (self.p1, self.p2, self.p3)[j]

    def side_squared(self) -> Interval:
        """Common enclosure of the three squared side lengths."""
        return self._side2

    def mid_positions(self):
        """Float midpoints, one row per primary."""
        return [[c.mid for c in self.position(j)] for j in range(3)]


_SQRT3 = Interval(3.0).sqrt()


def mass_combination(m: MassTriple) -> Interval:
    """The scalar K whose sign fixes the orientation of the triangle."""
    return m.m2 * (m.m3 - m.m2) + m.m1 * (m.m2 + m.m3 * 2.0)


def primaries(m: MassTriple, collision_tol: float = 0.0) -> PrimaryConfig:
    """Closed-form primary positions for ordered normalized masses."""
    K = mass_combination(m)
    if K.contains(0.0):
        raise DegenerateMassCombination("mass combination K encloses zero")
    sgn = 1.0 if K.lo > 0.0 else -1.0
    absK = K if sgn > 0.0 else -K
    s = m.m2.pow_int(2) + m.m2 * m.m3 + m.m3.pow_int(2)
    two_sq = s.sqrt() * 2.0
    x1 = s.sqrt() * (-sgn)
    x2 = ((m.m2 - m.m3) * m.m3 + m.m1 * (m.m2 * 2.0 + m.m3)) / two_sq * sgn
    y2 = -(_SQRT3 * m.m3) / two_sq
    x3 = absK / two_sq
    y3 = (_SQRT3 * m.m2) / two_sq
    return PrimaryConfig(
        masses=m,
        p1=(x1, ZERO, ZERO),
        p2=(x2, y2, ZERO),
        p3=(x3, y3, ZERO),
        collision_tol=collision_tol,
    )


# ---------------------------------------------------------------------------
# point fields


def _iv_vec(u, n: int):
    if len(u) != n:
        raise ValueError("expected a %d-vector" % n)
    out = []
    for t in u:
        v = _as_iv(t)
        if v is NotImplemented:
            raise TypeError("expected real scalars or intervals")
        out.append(v)
    return out


def _reciprocal_distances(x, y, z, cfg: PrimaryConfig):
    """Enclosures of 1/r_j; raises when some r_j may vanish."""
    tol2 = cfg.collision_tol * cfg.collision_tol
    out = []
    for j in range(3):
        px, py, pz = cfg.position(j)
        r2 = (x - px).pow_int(2) + (y - py).pow_int(2) + (z - pz).pow_int(2)
        if r2.lo <= tol2:
            raise CollisionSingularity("distance to primary %d may vanish" % (j + 1))
        out.append(Interval(1.0) / r2.sqrt())
    return out


def field_f(u, cfg: PrimaryConfig):
    """The classical first-order field on (x, x', y, y', z, z')."""
    x, vx, y, vy, z, vz = _iv_vec(u, 6)
    gx, gy, gz = x, y, ZERO
    for j in range(3):
        px, py, pz = cfg.position(j)
        dx, dy, dz = x - px, y - py, z - pz
        r2 = dx.pow_int(2) + dy.pow_int(2) + dz.pow_int(2)
        if r2.lo <= cfg.collision_tol * cfg.collision_tol:
            raise CollisionSingularity("distance to primary %d may vanish" % (j + 1))
        r3 = r2 * r2.sqrt()
        mj = cfg.masses[j]
        gx = gx - mj * dx / r3
        gy = gy - mj * dy / r3
        gz = gz - mj * dz / r3
    return (vx, vy * 2.0 + gx, vy, vx * (-2.0) + gy, vz, gz)


def embed_R(u, cfg: PrimaryConfig):
    """Append the three reciprocal distances as coordinates 7..9."""
    x, vx, y, vy, z, vz = _iv_vec(u, 6)
    w = _reciprocal_distances(x, y, z, cfg)
    return (x, vx, y, vy, z, vz, w[0], w[1], w[2])


def field_F(u, cfg: PrimaryConfig):
    """Degree-five polynomial field on the 9D embedded phase space."""
    u = _iv_vec(u, 9)
    s2 = s4 = s6 = ZERO
    tail = []
    for j in range(3):
        px, py, pz = cfg.position(j)
        dx, dy, dz = u[0] - px, u[2] - py, u[4] - pz
        w3 = u[6 + j].pow_int(3)
        mj = cfg.masses[j]
        s2 = s2 + mj * dx * w3
        s4 = s4 + mj * dy * w3
        s6 = s6 + mj * dz * w3
        tail.append(-(dx * u[1] + dy * u[3] + dz * u[5]) * w3)
    return (
        u[1],
        u[3] * 2.0 + u[0] - s2,
        u[3],
        u[1] * (-2.0) + u[2] - s4,
        u[5],
        -s6,
        tail[0],
        tail[1],
        tail[2],
    )


def jacobi(u, cfg: PrimaryConfig) -> Interval:
    """Jacobi integral in the original coordinates."""
    x, vx, y, vy, z, vz = _iv_vec(u, 6)
    w = _reciprocal_distances(x, y, z, cfg)
    pot = sum((cfg.masses[j] * w[j] for j in range(3)), ZERO)
    return (
        x.pow_int(2)
        + y.pow_int(2)
        + pot * 2.0
        - vx.pow_int(2)
        - vy.pow_int(2)
        - vz.pow_int(2)
    )


def jacobi_embedded(u, cfg: PrimaryConfig) -> Interval:
    """Jacobi integral as a polynomial in the embedded coordinates."""
    u = _iv_vec(u, 9)
    m = cfg.masses
    pot = m.m1 * u[6] + m.m2 * u[7] + m.m3 * u[8]
    return (
        u[0].pow_int(2)
        + u[2].pow_int(2)
        + pot * 2.0
        - u[1].pow_int(2)
        - u[3].pow_int(2)
        - u[5].pow_int(2)
    )


# ---------------------------------------------------------------------------
# coefficient-space field


def _grid9(a):
    if len(a) != 9:
        raise ValueError("expected 9 coefficient grids")
    nu = a[0].nu
    for f in a:
        if f.nu != nu:
            raise WeightMismatch("grid components disagree on nu")
    return tuple(a)


def _seq9(a):
    if len(a) != 9:
        raise ValueError("expected 9 coefficient sequences")
    nu = a[0].nu
    for f in a:
        if f.nu != nu:
            raise WeightMismatch("sequence components disagree on nu")
    return tuple(a)


def _const_seq(c: Interval, nu: float) -> FourierSeq:
    return FourierSeq.from_entries({0: ComplexInterval(c, ZERO)}, nu)


def _shift0(f: FourierTaylorSeq, c: Interval) -> FourierTaylorSeq:
    """Subtract the constant c from the mean mode of the order-zero layer."""
    base = f.layer(0, 0)
    return f.with_layer(0, 0, base.sub(_const_seq(c, f.nu)))


def field_F_grid(a, cfg: PrimaryConfig, cap: int):
    """All Taylor layers of the embedded field map through total order cap.

    The difference coordinates (position minus primary) are formed on the
    fly; no shifted copies of the input grids are retained.
    """
    a = _grid9(a)
    nu = a[0].nu
    s2 = FourierTaylorSeq.zeros(nu)
    s4 = FourierTaylorSeq.zeros(nu)
    s6 = FourierTaylorSeq.zeros(nu)
    tail = []
    for j in range(3):
        px, py, pz = cfg.position(j)
        w = a[6 + j]
        w3 = ft_conv(ft_conv(w, w, cap), w, cap)
        dx = _shift0(a[0], px)
        dy = _shift0(a[2], py)
        dz = _shift0(a[4], pz)
        qx = ft_conv(dx, w3, cap)
        qy = ft_conv(dy, w3, cap)
        qz = ft_conv(dz, w3, cap)
        mj = cfg.masses[j]
        s2 = s2.add(qx.scale(mj))
        s4 = s4.add(qy.scale(mj))
        s6 = s6.add(qz.scale(mj))
        tj = ft_conv(qx, a[1], cap)
        tj = tj.add(ft_conv(qy, a[3], cap))
        tj = tj.add(ft_conv(qz, a[5], cap))
        tail.append(tj.neg())
    lin = [f.truncate(cap) for f in a]
    return (
        lin[1],
        lin[3].scale(2.0).add(lin[0]).sub(s2),
        lin[3],
        lin[1].scale(-2.0).add(lin[2]).sub(s4),
        lin[5],
        s6.neg(),
        tail[0],
        tail[1],
        tail[2],
    )


def field_F_seq(a, alpha, cfg: PrimaryConfig):
    """Layer alpha of the embedded field map on a Fourier-Taylor grid."""
    a = _grid9(a)
    mo, no = int(alpha[0]), int(alpha[1])
    order = mo + no
    if max(f.order() for f in a) < order:
        raise MissingLowerOrderData(
            "grids carry orders below %d only" % order
        )
    grid = field_F_grid(a, cfg, cap=order)
    return tuple(g.layer(mo, no) for g in grid)


class DF0:
    """Derivative of the order-zero field map at a fixed 9-vector of sequences.

    Every entry is (constant multiple) + (convolution against a stored
    sequence); rows and columns are indexed 0..8.  The same table later
    feeds both the sequence-space application and finite matrix blocks.
    """

    __slots__ = ("const", "kernels", "nu")

    def __init__(self, const, kernels, nu: float):
        self.const = const
        self.kernels = kernels
        self.nu = nu

    def apply(self, h):
        h = _seq9(h)
        if h[0].nu != self.nu:
            raise WeightMismatch("argument nu differs from derivative nu")
        out = []
        for i in range(9):
            acc = FourierSeq.zeros(1, self.nu)
            for j in range(9):
                c = self.const[i][j]
                if c != 0.0:
                    acc = acc.add(h[j].scale(c))
                ker = self.kernels[i][j]
                if ker is not None:
                    acc = acc.add(conv(ker, h[j]))
            out.append(acc)
        return tuple(out)


def dF0(a0, cfg: PrimaryConfig) -> DF0:
    """Assemble the derivative table of the order-zero field map at a0."""
    a0 = _seq9(a0)
    nu = a0[0].nu
    const = [[0.0] * 9 for _ in range(9)]
    kernels = [[None] * 9 for _ in range(9)]
    const[0][1] = 1.0
    const[1][0] = 1.0
    const[1][3] = 2.0
    const[2][3] = 1.0
    const[3][1] = -2.0
    const[3][2] = 1.0
    const[4][5] = 1.0
    csum = FourierSeq.zeros(1, nu)
    for j in range(3):
        px, py, pz = cfg.position(j)
        mj = cfg.masses[j]
        w = a0[6 + j]
        sq = conv(w, w)
        cube = conv(sq, w)
        dx = a0[0].sub(_const_seq(px, nu))
        dy = a0[2].sub(_const_seq(py, nu))
        dz = a0[4].sub(_const_seq(pz, nu))
        csum = csum.add(cube.scale(mj))
        kernels[1][6 + j] = conv(dx, sq).scale(mj * (-3.0))
        kernels[3][6 + j] = conv(dy, sq).scale(mj * (-3.0))
        kernels[5][6 + j] = conv(dz, sq).scale(mj * (-3.0))
        kernels[6 + j][0] = conv(a0[1], cube).neg()
        kernels[6 + j][1] = conv(dx, cube).neg()
        kernels[6 + j][2] = conv(a0[3], cube).neg()
        kernels[6 + j][3] = conv(dy, cube).neg()
        kernels[6 + j][4] = conv(a0[5], cube).neg()
        kernels[6 + j][5] = conv(dz, cube).neg()
        wv = conv(dx, a0[1]).add(conv(dy, a0[3])).add(conv(dz, a0[5]))
        kernels[6 + j][6 + j] = conv(wv, sq).scale(-3.0)
    kernels[1][0] = csum.neg()
    kernels[3][2] = csum.neg()
    kernels[5][4] = csum.neg()
    return DF0(const, kernels, nu)


def dF0_apply(a0, h, cfg: PrimaryConfig):
    """Derivative of the order-zero field map at a0 applied to h."""
    return dF0(a0, cfg).apply(h)


def remainder_Ralpha(a, alpha, cfg: PrimaryConfig):
    """Layer-alpha terms of the field map not involving the alpha coefficient.

    Dropping every layer of total order |alpha| and reading layer alpha of
    the full product keeps exactly the splittings in which no factor sits at
    alpha, so the output solves

        (field layer alpha) = (derivative at order zero)(a_alpha) + R_alpha

    and is bitwise independent of whatever a_alpha the input carried.
    """
    a = _grid9(a)
    mo, no = int(alpha[0]), int(alpha[1])
    order = mo + no
    if order < 2:
        raise OrderTooLow("remainder defined for total order >= 2")
    low = tuple(f.truncate(order - 1) for f in a)
    grid = field_F_grid(low, cfg, cap=order)
    return tuple(g.layer(mo, no) for g in grid)


# ---------------------------------------------------------------------------
# unfolding terms


def unfold_orbit_G(y, a0):
    """Four-parameter unfolding appended to the periodic-orbit equations.

    Slot 2 carries y1 times the second component; slots 7..9 carry y2..y4
    times the cubes of the reciprocal-distance components.
    """
    a0 = _seq9(a0)
    if len(y) != 4:
        raise ValueError("expected 4 unfolding parameters")
    nu = a0[0].nu
    zero = FourierSeq.zeros(1, nu)
    out = [zero] * 9
    out[1] = a0[1].scale(y[0])
    for j in range(3):
        w = a0[6 + j]
        out[6 + j] = conv(conv(w, w), w).scale(y[1 + j])
    return tuple(out)


def _scaled(v, c):
    if hasattr(v, "scale"):
        return v.scale(c)
    return v * c


def _zero_like(v):
    if isinstance(v, FourierSeq):
        return FourierSeq.zeros(1, v.nu)
    if hasattr(v, "scale"):
        # one-sided sequence types share the zeros(n, nu) constructor
        return type(v).zeros(1, v.nu)
    return v * 0.0


def unfold_dissipative_Gbeta(beta, u):
    """Dissipative unfolding (0, b u2, 0, b u4, 0, b u6, 0, 0, 0).

    Works on any 9-vector whose entries are scalars, intervals, or
    coefficient sequences.
    """
    if len(u) != 9:
        raise ValueError("expected a 9-vector")
    out = []
    for i in range(9):
        out.append(_scaled(u[i], beta) if i in (1, 3, 5) else _zero_like(u[i]))
    return tuple(out)


# ---------------------------------------------------------------------------
# phase and initialization conditions


@dataclass(frozen=True)
class PhaseAnchor:
    """Reference point and transversal direction for the orbit phase.

    u0 is a point near the orbit at angle zero; u1 is the embedded field
    there, frozen to exact floats so reruns see identical constants.
    """

    u0: tuple
    u1: tuple

    def __post_init__(self):
        if len(self.u0) != 9 or len(self.u1) != 9:
            raise ValueError("anchor points must be 9-vectors")
        object.__setattr__(self, "u0", tuple(float(t) for t in self.u0))
        object.__setattr__(self, "u1", tuple(float(t) for t in self.u1))

    @classmethod
    def from_u0(cls, u0, cfg: PrimaryConfig) -> "PhaseAnchor":
        F = field_F(u0, cfg)
        return cls(tuple(float(t) for t in u0), tuple(v.mid for v in F))


def _mode_sum(s: FourierSeq) -> ComplexInterval:
    """Enclosure of the value at angle zero, the plain sum of all modes."""
    re = Interval(down_sum(s.c.rl), up_sum(s.c.rh))
    im = Interval(down_sum(s.c.il), up_sum(s.c.ih))
    return ComplexInterval(re, im)


def eta_phase(a0, anchor: PhaseAnchor, cfg: PrimaryConfig):
    """Phase and initialization conditions for the order-zero sequence.

    Entry 1 pins the angle-zero point to the hyperplane through u0 with
    normal u1; entries 2..4 require the reciprocal-distance components to
    actually invert the distances at angle zero.
    """
    a0 = _seq9(a0)
    g = [_mode_sum(s) for s in a0]
    e1 = CZERO
    for i in range(9):
        e1 = e1 + (ComplexInterval.point(complex(anchor.u0[i])) - g[i]) * anchor.u1[i]
    out = [e1]
    for j in range(3):
        px, py, pz = cfg.position(j)
        dx = g[0] - px
        dy = g[2] - py
        dz = g[4] - pz
        d2 = dx * dx + dy * dy + dz * dz
        out.append(d2 * (g[6 + j] * g[6 + j]) - 1.0)
    return tuple(out)


def xi_phase(a_alpha, k0: int, xi0: float) -> ComplexInterval:
    """Bundle-phase scalar fixing the scaling of a first-order layer."""
    if k0 < 1:
        raise ValueError("k0 must be at least 1")
    a_alpha = _seq9(a_alpha)
    tot = CZERO
    for s in a_alpha:
        part = CZERO
        for k in range(-(k0 - 1), k0):
            part = part + s.at(k)
        tot = tot + part * part
    return tot - float(xi0)
