"""Piecewise paths in the complex plane, parametrized by arclength."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath

from ..errors import ClearanceViolation


@dataclass(frozen=True)
class Line:
    za: complex
    zb: complex

    @property
    def length(self):
        return abs(self.zb - self.za)

    def mp_length(self):
        return abs(mpmath.mpc(self.zb) - mpmath.mpc(self.za))

    def _unit(self):
        return (self.zb - self.za) / self.length

    def point(self, s):
        return self.za + self._unit() * s

    def tangent(self, s):
        return self._unit()

    def taylor(self, s0, order, ctx=None):
        """Taylor coefficients of z(s0 + h) in h (mpmath numbers if ctx)."""
        za, zb = (mpmath.mpc(self.za), mpmath.mpc(self.zb)) if ctx else (self.za, self.zb)
        e = (zb - za) / abs(zb - za)
        out = [za + e * s0, e] + [0 * e] * max(0, order - 1)
        return out[: order + 1]

    def distance_to(self, p):
        """Euclidean distance from p to the segment and the foot parameter."""
        L = self.length
        e = self._unit()
        s = ((p - self.za) * e.conjugate()).real
        s = min(max(s, 0.0), L)
        return abs(p - self.point(s)), s


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float
    orientation: int = 1  # +1 counterclockwise, -1 clockwise
    turns: int = 0  # full circles: the sweep is exactly 2 pi turns

    @property
    def length(self):
        return self.radius * abs(self.angle_end - self.angle_start)

    def mp_length(self):
        if self.turns:
            return mpmath.mpf(self.radius) * 2 * mpmath.pi * self.turns
        return mpmath.mpf(self.radius) * abs(mpmath.mpf(self.angle_end) - mpmath.mpf(self.angle_start))

    def angle(self, s):
        return self.angle_start + self.orientation * s / self.radius

    def point(self, s):
        return self.center + self.radius * cmath.exp(1j * self.angle(s))

    def tangent(self, s):
        return 1j * self.orientation * cmath.exp(1j * self.angle(s))

    def taylor(self, s0, order, ctx=None):
        if ctx:
            c, r = mpmath.mpc(self.center), mpmath.mpf(self.radius)
            phi = mpmath.mpf(self.angle_start) + self.orientation * mpmath.mpf(s0) / r
            base = r * mpmath.expj(phi)
            k = mpmath.mpc(0, self.orientation) / r
        else:
            c, r = self.center, self.radius
            base = r * cmath.exp(1j * self.angle(s0))
            k = 1j * self.orientation / r
        out = [c + base]
        term = base
        for j in range(1, order + 1):
            term = term * k / j
            out.append(term)
        return out

    def distance_to(self, p):
        # sample-based bound is adequate for clearance checks
        n = max(16, int(abs(self.angle_end - self.angle_start) / 0.05))
        best = (math.inf, 0.0)
        for i in range(n + 1):
            s = self.length * i / n
            d = abs(p - self.point(s))
            if d < best[0]:
                best = (d, s)
        return best


def circle(center, radius, start_angle=0.0, loops=1, orientation=1):
    return Arc(complex(center), float(radius), float(start_angle),
               float(start_angle) + orientation * 2 * math.pi * loops, orientation, int(loops))


@dataclass
class PathSpec:
    segments: list = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.point(a.length) - b.point(0.0)) > 1e-9 * max(1.0, abs(b.point(0.0))):
                raise ValueError("path segments do not connect")

    @property
    def length(self):
        return sum(seg.length for seg in self.segments)

    @property
    def start(self):
        return self.segments[0].point(0.0)

    @property
    def end(self):
        last = self.segments[-1]
        return last.point(last.length)

    def locate(self, s):
        """(segment index, local arclength) of global arclength s."""
        acc = 0.0
        for idx, seg in enumerate(self.segments):
            if s <= acc + seg.length or idx == len(self.segments) - 1:
                return idx, s - acc
            acc += seg.length
        return len(self.segments) - 1, self.segments[-1].length

    def point(self, s):
        idx, loc = self.locate(s)
        return self.segments[idx].point(loc)

    def check_clearance(self, points, clearance):
        for p in points:
            for seg in self.segments:
                d, _ = seg.distance_to(p)
                if d < clearance:
                    raise ClearanceViolation(f"path passes within {d:.3g} of fixed singularity {p}")


def ray(z0, direction_angle, length):
    z0 = complex(z0)
    return PathSpec([Line(z0, z0 + length * cmath.exp(1j * direction_angle))])


def line_path(za, zb):
    return PathSpec([Line(complex(za), complex(zb))])


def detour_around(path: PathSpec, zero, eps):
    """Replace the part of a single-line path within eps of ``zero`` by an arc
    of radius eps centred at the zero, passing on the far side of it."""
    if len(path.segments) != 1 or not isinstance(path.segments[0], Line):
        raise ValueError("detours are built for single-segment line paths")
    seg = path.segments[0]
    d, s_foot = seg.distance_to(zero)
    if d >= eps:
        return path
    half = math.sqrt(eps * eps - d * d)
    s_in, s_out = s_foot - half, s_foot + half
    if s_in <= 0 or s_out >= seg.length:
        raise ValueError("zero too close to a path endpoint for a detour")
    p_in, p_out = seg.point(s_in), seg.point(s_out)
    a_in = cmath.phase(p_in - zero)
    a_out = cmath.phase(p_out - zero)
    # pass on the far side of the zero: a zero left of the direction of
    # travel is circled counterclockwise
    side = ((zero - seg.point(s_foot)) * seg.tangent(0).conjugate()).imag
    orientation = 1 if side >= 0 else -1
    sweep = (a_out - a_in) % (2 * math.pi) if orientation == 1 else -((a_in - a_out) % (2 * math.pi))
    arc = Arc(complex(zero), float(eps), a_in, a_in + sweep, orientation)
    return PathSpec([Line(seg.za, p_in), arc, Line(p_out, seg.zb)])
