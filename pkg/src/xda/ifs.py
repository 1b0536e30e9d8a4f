"""Self-similar systems: exact similarity maps, cylinder geometry, and
certified decision procedures on the attractor.

Everything here works over exact scalars (Fraction or a shared quadratic
field), so open-set verification, cylinder covers, membership verdicts,
porosity gaps, and segment scans are all decided by integer arithmetic.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, reduce
from itertools import product
from typing import Optional, Union

from .errors import ConfigError, DegenerateDiameter, OutOfRange
from .geometry import ConvexPolygon, dist2, line_range, polygon_point_dist2
from .scalars import QuadScalar, quad, quad_sign, scalar_key, scalar_le, scalar_lt
from .targets import format_scalar_spec, parse_scalar_spec

ExactScalar = Union[Fraction, QuadScalar]
Point = tuple


def _scal(v) -> ExactScalar:
    if isinstance(v, QuadScalar):
        return v
    if isinstance(v, float):
        raise ConfigError("exact scalar required, got float %r" % v)
    return Fraction(v)


def _smax(a: ExactScalar, b: ExactScalar) -> ExactScalar:
    return b if scalar_lt(a, b) else a


def _smin(a: ExactScalar, b: ExactScalar) -> ExactScalar:
    return b if scalar_lt(b, a) else a


# ---------------------------------------------------------------------------
# Shapes used for open sets, cylinder hulls, and cover regions.


@dataclass(frozen=True)
class Interval1D:
    """Closed interval [lo, hi] on the line (used as the closure of an
    open interval where an open set is meant)."""

    lo: ExactScalar
    hi: ExactScalar

    def __post_init__(self):
        object.__setattr__(self, "lo", _scal(self.lo))
        object.__setattr__(self, "hi", _scal(self.hi))
        if scalar_lt(self.hi, self.lo):
            raise ConfigError("interval endpoints out of order")

    @property
    def length(self) -> ExactScalar:
        return self.hi - self.lo

    def contains(self, x: ExactScalar, strict: bool = False) -> bool:
        if strict:
            return scalar_lt(self.lo, x) and scalar_lt(x, self.hi)
        return scalar_le(self.lo, x) and scalar_le(x, self.hi)


@dataclass(frozen=True)
class Ball2D:
    """Closed disk with exact center and rational radius."""

    center: Point
    radius: ExactScalar

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(_scal(c) for c in self.center))
        object.__setattr__(self, "radius", _scal(self.radius))
        if quad_sign(self.radius) < 0:
            raise ConfigError("ball radius must be nonnegative")


Shape = Union[Interval1D, Ball2D, ConvexPolygon]


def shape_dim(shape: Shape) -> int:
    return 1 if isinstance(shape, Interval1D) else 2


def shape_contains(shape: Shape, p: Point, strict: bool = False) -> bool:
    if isinstance(shape, Interval1D):
        return shape.contains(p[0], strict)
    if isinstance(shape, Ball2D):
        gap = shape.radius * shape.radius - dist2(p, shape.center)
        return quad_sign(gap) > 0 if strict else quad_sign(gap) >= 0
    return shape.contains(p, strict)


def shape_diameter_squared(shape: Shape) -> ExactScalar:
    if isinstance(shape, Interval1D):
        return shape.length * shape.length
    if isinstance(shape, Ball2D):
        return 4 * shape.radius * shape.radius
    return shape.diameter_squared()


def shapes_meet(a: Shape, b: Shape) -> bool:
    """Whether two closed shapes intersect (touching counts)."""
    if isinstance(a, Interval1D) and isinstance(b, Interval1D):
        return scalar_le(_smax(a.lo, b.lo), _smin(a.hi, b.hi))
    if isinstance(a, Ball2D) and isinstance(b, Ball2D):
        r = a.radius + b.radius
        return scalar_le(dist2(a.center, b.center), r * r)
    if isinstance(a, Ball2D) and isinstance(b, ConvexPolygon):
        return scalar_le(polygon_point_dist2(b, a.center), a.radius * a.radius)
    if isinstance(a, ConvexPolygon) and isinstance(b, Ball2D):
        return shapes_meet(b, a)
    if isinstance(a, ConvexPolygon) and isinstance(b, ConvexPolygon):
        return not _strictly_separated(a, b)
    raise ConfigError("cannot intersect %s with %s"
                      % (type(a).__name__, type(b).__name__))


def _strictly_separated(p: ConvexPolygon, q: ConvexPolygon) -> bool:
    for poly in (p, q):
        for a, b in poly.edges():
            axis = (b[1] - a[1], a[0] - b[0])
            pmin, pmax = _axis_range(p, axis)
            qmin, qmax = _axis_range(q, axis)
            if scalar_lt(pmax, qmin) or scalar_lt(qmax, pmin):
                return True
    return False


def _axis_range(poly: ConvexPolygon, axis: Point):
    vals = [axis[0] * v[0] + axis[1] * v[1] for v in poly.vertices]
    lo = hi = vals[0]
    for v in vals[1:]:
        lo = _smin(lo, v)
        hi = _smax(hi, v)
    return lo, hi


# ---------------------------------------------------------------------------
# Similarity maps.


class Similarity:
    """Affine map z -> M z + t whose linear part is a scalar multiple of
    an orthogonal matrix; the scalar (the ratio) must be rational.
    """

    __slots__ = ("ratio", "matrix", "shift")

    def __init__(self, ratio, matrix, shift):
        self.ratio = Fraction(ratio)
        if self.ratio <= 0:
            raise ConfigError("similarity ratio must be positive")
        self.shift = tuple(_scal(v) for v in shift)
        self.matrix = tuple(tuple(_scal(v) for v in row) for row in matrix)
        d = len(self.shift)
        if len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise ConfigError("matrix shape does not match translation")
        if d not in (1, 2):
            raise ConfigError("only dimensions 1 and 2 are supported")
        rho2 = self.ratio * self.ratio
        m = self.matrix
        if d == 1:
            ok = m[0][0] * m[0][0] == rho2
        else:
            ok = (m[0][0] * m[0][0] + m[0][1] * m[0][1] == rho2
                  and m[1][0] * m[1][0] + m[1][1] * m[1][1] == rho2
                  and quad_sign(m[0][0] * m[1][0] + m[0][1] * m[1][1]) == 0)
        if not ok:
            raise ConfigError("linear part is not ratio times an orthogonal matrix")

    @classmethod
    def scale_1d(cls, ratio, shift, reflect: bool = False) -> "Similarity":
        r = Fraction(ratio)
        return cls(r, ((-r if reflect else r,),), shift)

    @classmethod
    def direct(cls, ratio, cos_t, sin_t, shift, reflect: bool = False) -> "Similarity":
        """Plane similarity from an exact unit vector (cos_t, sin_t); with
        reflect the map conjugates across the x axis first."""
        r = Fraction(ratio)
        c, s = _scal(cos_t), _scal(sin_t)
        if c * c + s * s != 1:
            raise ConfigError("cos and sin must satisfy cos^2 + sin^2 = 1")
        if reflect:
            rows = ((r * c, r * s), (r * s, -(r * c)))
        else:
            rows = ((r * c, -(r * s)), (r * s, r * c))
        return cls(r, rows, shift)

    @property
    def dim(self) -> int:
        return len(self.shift)

    def apply(self, p: Point) -> Point:
        m = self.matrix
        return tuple(
            sum((m[i][j] * p[j] for j in range(len(p))), Fraction(0)) + self.shift[i]
            for i in range(len(self.shift)))

    def compose(self, other: "Similarity") -> "Similarity":
        if other.dim != self.dim:
            raise ConfigError("cannot compose maps of different dimensions")
        a, b = self.matrix, other.matrix
        d = self.dim
        rows = tuple(
            tuple(sum((a[i][k] * b[k][j] for k in range(d)), Fraction(0))
                  for j in range(d))
            for i in range(d))
        return Similarity(self.ratio * other.ratio, rows, self.apply(other.shift))

    def inverse(self) -> "Similarity":
        rho2 = self.ratio * self.ratio
        d = self.dim
        rows = tuple(tuple(self.matrix[j][i] / rho2 for j in range(d))
                     for i in range(d))
        inv = Similarity(1 / self.ratio, rows, (Fraction(0),) * d)
        shift = inv.apply(self.shift)
        return Similarity(1 / self.ratio, rows, tuple(-v for v in shift))

    def fixed_point(self) -> Point:
        m = self.matrix
        if self.dim == 1:
            return (self.shift[0] / (1 - m[0][0]),)
        a, b = 1 - m[0][0], -m[0][1]
        c, d = -m[1][0], 1 - m[1][1]
        det = a * d - b * c
        if quad_sign(det) == 0:
            raise OutOfRange("map has no unique fixed point")
        tx, ty = self.shift
        return ((d * tx - b * ty) / det, (a * ty - c * tx) / det)

    def orientation(self) -> int:
        m = self.matrix
        if self.dim == 1:
            return quad_sign(m[0][0])
        return quad_sign(m[0][0] * m[1][1] - m[0][1] * m[1][0])

    @classmethod
    def identity(cls, dim: int) -> "Similarity":
        rows = tuple(tuple(Fraction(1 if i == j else 0) for j in range(dim))
                     for i in range(dim))
        return cls(1, rows, (Fraction(0),) * dim)

    def _key(self):
        return (self.ratio,
                tuple(scalar_key(v) for row in self.matrix for v in row),
                tuple(scalar_key(v) for v in self.shift))

    def __eq__(self, other):
        if not isinstance(other, Similarity):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "Similarity(ratio=%s, matrix=%r, shift=%r)" % (
            self.ratio, self.matrix, self.shift)


def image_shape(shape: Shape, sim: Similarity) -> Shape:
    if isinstance(shape, Interval1D):
        a = sim.apply((shape.lo,))[0]
        b = sim.apply((shape.hi,))[0]
        return Interval1D(*((a, b) if scalar_le(a, b) else (b, a)))
    if isinstance(shape, Ball2D):
        return Ball2D(sim.apply(shape.center), sim.ratio * shape.radius)
    return ConvexPolygon(tuple(sim.apply(v) for v in shape.vertices))


# ---------------------------------------------------------------------------
# Systems and cylinders.


class IFSystem:
    """A finite system of contracting similarities with an open set."""

    __slots__ = ("name", "letters", "maps", "open_set", "dim")

    def __init__(self, name: str, letters, maps: dict, open_set: Shape):
        self.name = name
        self.letters = tuple(letters)
        if len(set(self.letters)) != len(self.letters) or not self.letters:
            raise ConfigError("alphabet must be nonempty with distinct letters")
        if set(maps) != set(self.letters):
            raise ConfigError("maps must cover exactly the alphabet")
        self.maps = dict(maps)
        self.open_set = open_set
        self.dim = shape_dim(open_set)
        for a in self.letters:
            u = self.maps[a]
            if u.dim != self.dim:
                raise ConfigError("map %r dimension differs from the open set" % a)
            if u.ratio >= 1:
                raise ConfigError("map %r is not a contraction" % a)

    @property
    def ratio_min(self) -> Fraction:
        return min(self.maps[a].ratio for a in self.letters)

    @property
    def ratio_max(self) -> Fraction:
        return max(self.maps[a].ratio for a in self.letters)

    def map_word(self, word) -> Similarity:
        sims = [self.maps[a] for a in word]
        return reduce(Similarity.compose, sims, Similarity.identity(self.dim))

    def hull(self, word=()) -> Shape:
        return image_shape(self.open_set, self.map_word(word))

    def cylinder(self, word) -> "Cylinder":
        word = tuple(word)
        for a in word:
            if a not in self.maps:
                raise ConfigError("unknown letter %r" % (a,))
        sim = self.map_word(word)
        return Cylinder(word, sim, image_shape(self.open_set, sim))

    def __repr__(self):
        return "IFSystem(%r, letters=%r, dim=%d)" % (self.name, self.letters, self.dim)


@dataclass(frozen=True)
class Cylinder:
    word: tuple
    map: Similarity
    hull: Shape

    @property
    def ratio(self) -> Fraction:
        return self.map.ratio

    @property
    def depth(self) -> int:
        return len(self.word)


# ---------------------------------------------------------------------------
# Built-in systems.


def cantor_system() -> IFSystem:
    third = Fraction(1, 3)
    return IFSystem(
        "cantor",
        ("1", "2"),
        {"1": Similarity.scale_1d(third, (Fraction(0),)),
         "2": Similarity.scale_1d(third, (Fraction(2, 3),))},
        Interval1D(Fraction(0), Fraction(1)))


def koch_system() -> IFSystem:
    """Quadric Koch curve over Q(sqrt 3): four ratio-1/3 maps whose images
    chain across the unit base, with open set the equilateral triangle on
    (0,0), (1,0), (1/2, sqrt(3)/2)."""
    r = Fraction(1, 3)
    half = Fraction(1, 2)
    s = quad(0, 1, 2, 3)        # sqrt(3)/2
    s6 = quad(0, 1, 6, 3)       # sqrt(3)/6
    zero = Fraction(0)
    maps = {
        "1": Similarity.direct(r, 1, 0, (zero, zero)),
        "2": Similarity.direct(r, half, s, (Fraction(1, 3), zero)),
        "3": Similarity.direct(r, half, -s, (half, s6)),
        "4": Similarity.direct(r, 1, 0, (Fraction(2, 3), zero)),
    }
    w = ConvexPolygon(((zero, zero), (Fraction(1), zero), (half, s)))
    return IFSystem("koch", ("1", "2", "3", "4"), maps, w)


def koch_apex() -> Point:
    """The unique attractor point of maximal height, (1/2, sqrt(3)/6)."""
    return (Fraction(1, 2), quad(0, 1, 6, 3))


def sierpinski_right_system() -> IFSystem:
    half = Fraction(1, 2)
    zero = Fraction(0)
    maps = {
        "1": Similarity.direct(half, 1, 0, (zero, zero)),
        "2": Similarity.direct(half, 1, 0, (half, zero)),
        "3": Similarity.direct(half, 1, 0, (zero, half)),
    }
    w = ConvexPolygon(((zero, zero), (Fraction(1), zero), (zero, Fraction(1))))
    return IFSystem("sierpinski-right", ("1", "2", "3"), maps, w)


def cantor_dust_system() -> IFSystem:
    r = Fraction(1, 3)
    t = Fraction(2, 3)
    zero = Fraction(0)
    maps = {
        "1": Similarity.direct(r, 1, 0, (zero, zero)),
        "2": Similarity.direct(r, 1, 0, (t, zero)),
        "3": Similarity.direct(r, 1, 0, (zero, t)),
        "4": Similarity.direct(r, 1, 0, (t, t)),
    }
    w = ConvexPolygon(((zero, zero), (Fraction(1), zero),
                       (Fraction(1), Fraction(1)), (zero, Fraction(1))))
    return IFSystem("cantor-dust-2d", ("1", "2", "3", "4"), maps, w)


_BUILTINS = {
    "cantor": cantor_system,
    "koch": koch_system,
    "sierpinski-right": sierpinski_right_system,
    "cantor-dust-2d": cantor_dust_system,
}


def builtin_system(name: str) -> IFSystem:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ConfigError("unknown builtin system %r (have %s)"
                          % (name, ", ".join(sorted(_BUILTINS)))) from None


def builtin_names() -> tuple:
    return tuple(sorted(_BUILTINS))


def cantor_level_endpoints(depth: int) -> list:
    """Sorted endpoints of the 2^depth level-`depth` construction
    intervals of the middle-thirds set; 2^(depth+1) points in all."""
    if depth < 0:
        raise OutOfRange("depth must be nonnegative")
    starts = [Fraction(0)]
    for k in range(1, depth + 1):
        step = Fraction(2, 3 ** k)
        starts = [s + off for s in starts for off in (Fraction(0), step)]
    unit = Fraction(1, 3 ** depth)
    return sorted(set(starts) | {s + unit for s in starts})


# ---------------------------------------------------------------------------
# JSON system definitions.


def _scalar_from_json(text) -> ExactScalar:
    if isinstance(text, str) and ":" in text:
        return parse_scalar_spec(text)
    return _scal(Fraction(text) if isinstance(text, str) else text)


def load_system(source) -> IFSystem:
    """Build a system from a JSON document (text or parsed dict)."""
    data = json.loads(source) if isinstance(source, str) else source
    try:
        letters = tuple(data["alphabet"])
        raw_maps = data["maps"]
        raw_open = data["open_set"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("system definition needs alphabet, maps, open_set") from exc
    name = data.get("name", "custom")

    if "interval" in raw_open:
        lo, hi = (_scalar_from_json(v) for v in raw_open["interval"])
        open_set: Shape = Interval1D(lo, hi)
    elif "polygon" in raw_open:
        verts = tuple(tuple(_scalar_from_json(c) for c in v)
                      for v in raw_open["polygon"])
        open_set = ConvexPolygon(verts)
    elif "ball" in raw_open:
        spec = raw_open["ball"]
        center = tuple(_scalar_from_json(c) for c in spec["center"])
        open_set = Ball2D(center, _scalar_from_json(spec["radius"]))
    else:
        raise ConfigError("open_set must give interval, polygon, or ball")
    dim = shape_dim(open_set)

    maps = {}
    for a in letters:
        if a not in raw_maps:
            raise ConfigError("missing map for letter %r" % a)
        m = raw_maps[a]
        ratio = Fraction(m["ratio"])
        shift = tuple(_scalar_from_json(c) for c in m["translation"])
        if len(shift) != dim:
            raise ConfigError("translation of %r has wrong dimension" % a)
        reflect = bool(m.get("reflect", False) or
                       m.get("rotation", {}).get("reflect", False))
        if dim == 1:
            maps[a] = Similarity.scale_1d(ratio, shift, reflect)
        else:
            rot = m.get("rotation", {"cos": "1", "sin": "0"})
            maps[a] = Similarity.direct(
                ratio, _scalar_from_json(rot.get("cos", "1")),
                _scalar_from_json(rot.get("sin", "0")), shift, reflect)
    return IFSystem(name, letters, maps, open_set)


def dump_system(ifs: IFSystem) -> dict:
    """Inverse of load_system, up to formatting."""
    maps = {}
    for a in ifs.letters:
        u = ifs.maps[a]
        entry = {"ratio": str(u.ratio),
                 "translation": [format_scalar_spec(v) for v in u.shift]}
        if ifs.dim == 1:
            entry["reflect"] = u.orientation() < 0
        else:
            reflect = u.orientation() < 0
            entry["rotation"] = {
                "cos": format_scalar_spec(u.matrix[0][0] / u.ratio),
                "sin": format_scalar_spec(u.matrix[1][0] / u.ratio),
                "reflect": reflect,
            }
        maps[a] = entry
    if isinstance(ifs.open_set, Interval1D):
        open_set = {"interval": [format_scalar_spec(ifs.open_set.lo),
                                 format_scalar_spec(ifs.open_set.hi)]}
    elif isinstance(ifs.open_set, Ball2D):
        open_set = {"ball": {
            "center": [format_scalar_spec(c) for c in ifs.open_set.center],
            "radius": format_scalar_spec(ifs.open_set.radius)}}
    else:
        open_set = {"polygon": [[format_scalar_spec(c) for c in v]
                                for v in ifs.open_set.vertices]}
    return {"name": ifs.name, "alphabet": list(ifs.letters),
            "maps": maps, "open_set": open_set}


# ---------------------------------------------------------------------------
# Open set condition.


@dataclass(frozen=True)
class OSCViolation:
    kind: str               # "containment" | "overlap"
    letters: tuple
    witness: Optional[Point]


@dataclass(frozen=True)
class OSCReport:
    verified: bool
    violations: tuple

    def __bool__(self):
        return self.verified


def check_osc(ifs: IFSystem) -> OSCReport:
    """Verify that map images sit inside the open set with pairwise
    disjoint interiors, or report witnesses."""
    w = ifs.open_set
    images = {a: image_shape(w, ifs.maps[a]) for a in ifs.letters}
    bad = []
    for a in ifs.letters:
        v = _containment_witness(w, images[a])
        if v is not None:
            bad.append(OSCViolation("containment", (a,), v))
    for i, a in enumerate(ifs.letters):
        for b in ifs.letters[i + 1:]:
            v = _overlap_witness(images[a], images[b])
            if v is not None:
                bad.append(OSCViolation("overlap", (a, b), v))
    return OSCReport(not bad, tuple(bad))


def _containment_witness(w: Shape, img: Shape) -> Optional[Point]:
    if isinstance(w, Interval1D):
        if scalar_lt(img.lo, w.lo):
            return (img.lo,)
        if scalar_lt(w.hi, img.hi):
            return (img.hi,)
        return None
    if isinstance(w, Ball2D):
        slack = w.radius - img.radius
        if quad_sign(slack) < 0 or scalar_lt(slack * slack,
                                             dist2(img.center, w.center)):
            return img.center
        return None
    for v in img.vertices:
        if not w.contains(v, strict=False):
            return v
    return None


def _overlap_witness(a: Shape, b: Shape) -> Optional[Point]:
    if isinstance(a, Interval1D):
        lo = _smax(a.lo, b.lo)
        hi = _smin(a.hi, b.hi)
        if scalar_lt(lo, hi):
            return ((lo + hi) / 2,)
        return None
    if isinstance(a, Ball2D):
        r = a.radius + b.radius
        if scalar_lt(dist2(a.center, b.center), r * r):
            return tuple((p + q) / 2 for p, q in zip(a.center, b.center))
        return None
    from .geometry import interiors_disjoint, overlap_witness
    if interiors_disjoint(a, b):
        return None
    return overlap_witness(a, b) or a.vertices[0]


# ---------------------------------------------------------------------------
# Covers by minimal cylinders.


@dataclass(frozen=True)
class CoverResult:
    words: tuple
    ratios: dict
    gamma: Fraction
    diameter_squared: ExactScalar

    def __len__(self):
        return len(self.words)

    @property
    def strings(self) -> tuple:
        return tuple("".join(w) for w in self.words)


def cover(ifs: IFSystem, region: Shape) -> CoverResult:
    """Minimal cylinder words whose ratio is at most diam(region) and
    whose hull meets the region.

    No output word is a prefix of another, and every attractor point of
    the region lies in one of the listed cylinders.
    """
    if shape_dim(region) != ifs.dim:
        raise ConfigError("region dimension does not match the system")
    d2 = shape_diameter_squared(region)
    if quad_sign(d2) == 0:
        raise DegenerateDiameter("region has zero diameter")
    gamma = ifs.ratio_min
    out = []
    ratios = {}
    queue = deque([((), Similarity.identity(ifs.dim))])
    while queue:
        word, sim = queue.popleft()
        hull = image_shape(ifs.open_set, sim)
        if not shapes_meet(hull, region):
            continue
        if scalar_le(sim.ratio * sim.ratio, d2):
            out.append(word)
            ratios[word] = sim.ratio
            continue
        for a in ifs.letters:
            queue.append((word + (a,), sim.compose(ifs.maps[a])))
    return CoverResult(tuple(out), ratios, gamma, d2)


# ---------------------------------------------------------------------------
# Membership.


@dataclass(frozen=True)
class MembershipVerdict:
    status: str                      # "in" | "out" | "unknown"
    depth: int
    prefix: Optional[tuple] = None   # letters before the cycle
    cycle: Optional[tuple] = None    # letters of the repeating block
    state: Optional[Point] = None    # exact fixed point of the cycle map

    @property
    def decided(self) -> bool:
        return self.status != "unknown"


def membership(ifs: IFSystem, point, depth_cap: int = 64) -> MembershipVerdict:
    """Decide attractor membership by exact preimage descent.

    A branch follows letters whose inverse map keeps the state inside the
    closed open set.  Revisiting a state on the same branch certifies a
    periodic coding (IN); if every branch dies by depth n the point is
    outside the depth-n hull union (OUT); otherwise UNKNOWN at the cap.
    """
    point = tuple(_scal(c) for c in point)
    if len(point) != ifs.dim:
        raise ConfigError("point dimension does not match the system")
    w = ifs.open_set
    if not shape_contains(w, point):
        return MembershipVerdict("out", 0)
    inverses = {a: ifs.maps[a].inverse() for a in ifs.letters}

    # Branch nodes are (letter, parent index) so ancestor letter chains
    # can be rebuilt without copying paths; each stack entry carries the
    # seen-state table for its own branch, shared along non-branching
    # runs and copied only at forks.
    nodes = [(None, -1)]
    root_key = tuple(scalar_key(c) for c in point)
    stack = [(point, 0, 0, {root_key: (0, point)})]
    deepest = 0
    hit_cap = False
    while stack:
        state, node_idx, depth, seen = stack.pop()
        if depth > deepest:
            deepest = depth
        if depth >= depth_cap:
            hit_cap = True
            continue
        children = []
        for a in ifs.letters:
            nxt = inverses[a].apply(state)
            if shape_contains(w, nxt):
                children.append((a, nxt))
        for i, (a, nxt) in enumerate(children):
            key = tuple(scalar_key(c) for c in nxt)
            if key in seen:
                at, cycle_state = seen[key]
                letters = _letters_to(nodes, node_idx) + (a,)
                return MembershipVerdict(
                    "in", depth + 1,
                    prefix=letters[:at], cycle=letters[at:], state=cycle_state)
            table = seen if i == len(children) - 1 else dict(seen)
            table[key] = (depth + 1, nxt)
            nodes.append((a, node_idx))
            stack.append((nxt, len(nodes) - 1, depth + 1, table))
    if hit_cap:
        return MembershipVerdict("unknown", depth_cap)
    return MembershipVerdict("out", deepest + 1)


def _letters_to(nodes, idx) -> tuple:
    path = []
    while idx > 0:
        letter, idx = nodes[idx]
        path.append(letter)
    return tuple(reversed(path))


def verify_membership(ifs: IFSystem, point, verdict: MembershipVerdict) -> bool:
    """Recheck a verdict from scratch: IN certificates by exact algebra,
    OUT by rerunning the bounded search."""
    point = tuple(_scal(c) for c in point)
    if verdict.status == "in":
        if not verdict.cycle or verdict.state is None:
            return False
        u_cyc = ifs.map_word(verdict.cycle)
        if u_cyc.apply(verdict.state) != verdict.state:
            return False
        u_pre = ifs.map_word(verdict.prefix or ())
        return u_pre.apply(verdict.state) == point
    if verdict.status == "out":
        again = membership(ifs, point, depth_cap=max(verdict.depth, 1))
        return again.status == "out" and again.depth <= verdict.depth
    return False


def cantor_membership(r, step_cap: Optional[int] = None) -> MembershipVerdict:
    """Always-terminating membership test for the middle-thirds set.

    Runs the base-3 orbit n -> 3n mod the two admissible branches; the
    orbit of p/q visits at most q + 1 states, so it must either escape
    into the middle gap (OUT) or revisit a state (IN).  With a step_cap
    the walk stops early and reports UNKNOWN, for pipelines that meet
    huge denominators and cannot afford a full cycle.
    """
    x = Fraction(r)
    if x < 0 or x > 1:
        raise OutOfRange("point %s is outside [0, 1]" % x)
    lo, hi = Fraction(1, 3), Fraction(2, 3)
    seen: dict = {}
    letters = []
    state = x
    while True:
        if step_cap is not None and len(letters) >= step_cap:
            return MembershipVerdict("unknown", len(letters))
        if state in seen:
            at = seen[state]
            return MembershipVerdict(
                "in", len(letters),
                prefix=tuple(letters[:at]), cycle=tuple(letters[at:]),
                state=(state,))
        seen[state] = len(letters)
        if state <= lo:
            letters.append("1")
            state = 3 * state
        elif state >= hi:
            letters.append("2")
            state = 3 * state - 2
        else:
            return MembershipVerdict("out", len(letters) + 1)


# ---------------------------------------------------------------------------
# Lines through the attractor: slices, porosity, segment scan.


def _line_slice(hull: Shape, anchor: Point, direction: Point):
    """Closed parameter interval of {t: anchor + t direction in hull},
    or None when the line misses the hull."""
    if isinstance(hull, Interval1D):
        d = direction[0]
        if quad_sign(d) == 0:
            raise OutOfRange("direction must be nonzero")
        a = (hull.lo - anchor[0]) / d
        b = (hull.hi - anchor[0]) / d
        return (a, b) if scalar_le(a, b) else (b, a)
    if isinstance(hull, ConvexPolygon):
        return line_range(hull, anchor, direction)
    raise ConfigError("line slicing needs an interval or polygon hull")


def _merge_spans(spans):
    """Union of closed intervals as a sorted list; touching spans merge."""
    if not spans:
        return []
    def cmp(u, v):
        if scalar_lt(u[0], v[0]):
            return -1
        if scalar_lt(v[0], u[0]):
            return 1
        if scalar_lt(u[1], v[1]):
            return -1
        if scalar_lt(v[1], u[1]):
            return 1
        return 0
    ordered = sorted(spans, key=cmp_to_key(cmp))
    merged = [list(ordered[0])]
    for lo, hi in ordered[1:]:
        if scalar_le(lo, merged[-1][1]):
            merged[-1][1] = _smax(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(m) for m in merged]


def _line_levels(ifs: IFSystem, anchor: Point, direction: Point,
                 depth: int, window=None):
    """Yield (level, spans) for cylinders meeting the line, level by
    level; descends only through cylinders that meet the line (and the
    window, when given)."""
    frontier = [Similarity.identity(ifs.dim)]
    for level in range(1, depth + 1):
        nxt = []
        spans = []
        for sim in frontier:
            for a in ifs.letters:
                child = sim.compose(ifs.maps[a])
                span = _line_slice(image_shape(ifs.open_set, child),
                                   anchor, direction)
                if span is None:
                    continue
                if window is not None and (scalar_lt(span[1], window[0])
                                           or scalar_lt(window[1], span[0])):
                    continue
                nxt.append(child)
                spans.append(span)
        frontier = nxt
        yield level, spans
        if not frontier:
            return


@dataclass(frozen=True)
class PorositySite:
    radius: Fraction
    center: ExactScalar          # line parameter of the ball center
    depth: int
    gap: Optional[tuple]         # free (lo, hi) in line parameters
    epsilon: ExactScalar         # largest certified hole ratio here


@dataclass(frozen=True)
class PorosityReport:
    epsilon: Fraction
    certified: bool
    sites: tuple
    failures: tuple
    largest_uniform: ExactScalar


def line_porosity(ifs: IFSystem, anchor, direction, epsilon, scales,
                  samples: int = 6, depth_cap: int = 14) -> PorosityReport:
    """Certify holes of relative size epsilon in balls along a line.

    For each scale r and sample center c the complement of the depth-n
    hull slices inside [c - r, c + r] is exactly free of attractor
    points; a free subinterval of length 2*epsilon*r certifies the site.
    """
    anchor = tuple(_scal(c) for c in anchor)
    direction = tuple(_scal(c) for c in direction)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ConfigError("epsilon must be strictly between 0 and 1")
    base = _line_slice(
        image_shape(ifs.open_set, Similarity.identity(ifs.dim)),
        anchor, direction)
    if base is None:
        raise OutOfRange("line misses the open set")
    t0, t1 = base
    sites = []
    for r in scales:
        r = Fraction(r)
        if r <= 0:
            raise ConfigError("scales must be positive")
        width = t1 - t0
        for j in range(samples):
            c = t0 + width * Fraction(2 * j + 1, 2 * samples)
            sites.append(_porosity_site(ifs, anchor, direction, c, r,
                                        epsilon, depth_cap))
    failures = tuple(s for s in sites if scalar_lt(s.epsilon, epsilon))
    largest = sites[0].epsilon if sites else Fraction(0)
    for s in sites[1:]:
        largest = _smin(largest, s.epsilon)
    return PorosityReport(epsilon, not failures, tuple(sites),
                          failures, largest)


def _porosity_site(ifs, anchor, direction, center, r, epsilon, depth_cap):
    lo, hi = center - r, center + r
    need = 2 * epsilon * r
    best = (Fraction(0), None)
    depth_used = 0
    for level, spans in _line_levels(ifs, anchor, direction, depth_cap,
                                     window=(lo, hi)):
        depth_used = level
        gap = _largest_gap(lo, hi, spans)
        if gap is not None and scalar_lt(best[0], gap[1] - gap[0]):
            best = (gap[1] - gap[0], gap)
        if scalar_le(need, best[0]):
            break
    eps_here = best[0] / (2 * r)
    return PorositySite(r, center, depth_used, best[1], eps_here)


def _largest_gap(lo, hi, spans):
    merged = _merge_spans([(
        _smax(s[0], lo), _smin(s[1], hi)) for s in spans
        if scalar_le(s[0], hi) and scalar_le(lo, s[1])])
    cursor = lo
    best = None
    for s_lo, s_hi in merged + [(hi, hi)]:
        edge = _smin(s_lo, hi)
        if scalar_lt(cursor, edge):
            if best is None or scalar_lt(best[1] - best[0], edge - cursor):
                best = (cursor, edge)
        cursor = _smax(cursor, s_hi)
        if scalar_le(hi, cursor):
            break
    return best


@dataclass(frozen=True)
class SegmentHit:
    anchor: Point
    direction: Point
    t_lo: ExactScalar
    t_hi: ExactScalar
    length_squared: ExactScalar

    @property
    def endpoints(self) -> tuple:
        a = tuple(p + self.t_lo * d for p, d in zip(self.anchor, self.direction))
        b = tuple(p + self.t_hi * d for p, d in zip(self.anchor, self.direction))
        return a, b


@dataclass(frozen=True)
class SegmentScanResult:
    found: Optional[SegmentHit]
    hits: tuple
    depth: int
    min_length: ExactScalar
    lines_examined: int


def segment_scan(ifs: IFSystem, depth: int, min_len) -> SegmentScanResult:
    """Look for line segments covered by depth-n cylinder hulls.

    Candidate lines pass through pairs of depth-2 cylinder vertices.  A
    line survives to the full depth only if its hull slices chain into a
    connected component of length at least min_len at every intermediate
    depth (components only shrink as depth grows, so early exits are
    sound).  A hit certifies that the depth-n hull union contains the
    segment; it says nothing about the attractor itself, while a miss
    rules out any such segment on the candidate lines.
    """
    if depth < 1:
        raise OutOfRange("depth must be at least 1")
    min_len = _scal(min_len)
    if quad_sign(min_len) <= 0:
        raise ConfigError("min_len must be positive")
    min2 = min_len * min_len
    lines = _candidate_lines(ifs, depth)
    hits = []
    for anchor, direction in lines:
        dir2 = sum((d * d for d in direction), Fraction(0))
        hit = _scan_line(ifs, anchor, direction, dir2, depth, min2)
        if hit is not None:
            hits.append(hit)
    def cmp(u, v):
        if scalar_lt(v.length_squared, u.length_squared):
            return -1
        if scalar_lt(u.length_squared, v.length_squared):
            return 1
        return 0
    hits.sort(key=cmp_to_key(cmp))
    return SegmentScanResult(hits[0] if hits else None, tuple(hits),
                             depth, min_len, len(lines))


def _scan_line(ifs, anchor, direction, dir2, depth, min2):
    best = None
    for level, spans in _line_levels(ifs, anchor, direction, depth):
        comps = _merge_spans(spans)
        best = None
        for lo, hi in comps:
            ln = hi - lo
            if best is None or scalar_lt(best[1] - best[0], ln):
                best = (lo, hi)
        if best is None:
            return None
        span2 = (best[1] - best[0]) * (best[1] - best[0]) * dir2
        if scalar_lt(span2, min2):
            return None
        if level == depth:
            return SegmentHit(anchor, direction, best[0], best[1], span2)
    return None


def _candidate_lines(ifs: IFSystem, depth: int):
    if ifs.dim == 1:
        return [((Fraction(0),), (Fraction(1),))]
    anchor_depth = min(2, depth)
    points = {}
    for word in product(ifs.letters, repeat=anchor_depth):
        hull = ifs.hull(word)
        if not isinstance(hull, ConvexPolygon):
            raise ConfigError("segment scan needs polygon hulls")
        for v in hull.vertices:
            points[tuple(scalar_key(c) for c in v)] = v
    verts = list(points.values())
    lines = {}
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            p, q = verts[i], verts[j]
            key = _line_key(p, q)
            if key not in lines:
                lines[key] = (p, (q[0] - p[0], q[1] - p[1]))
    return [lines[k] for k in sorted(lines)]


def _line_key(p: Point, q: Point):
    """Canonical key of the line through two distinct points: the lead-1
    normalized normal equation (n1, n2, c) with n1 x + n2 y = c."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    n1, n2 = -dy, dx
    c = n1 * p[0] + n2 * p[1]
    if quad_sign(n1) != 0:
        n2, c, n1 = n2 / n1, c / n1, Fraction(1)
    else:
        c, n2 = c / n2, Fraction(1)
    return (scalar_key(n1), scalar_key(n2), scalar_key(c))
