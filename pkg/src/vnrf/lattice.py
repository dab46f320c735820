"""Square-lattice geometry: windows, L1 neighborhoods, paths, dual contours.

Sites are integer pairs ``(i1, i2)``.  All finite-volume computation lives
on a rectangular ``Window``; everything outside the window is represented
by its boundary condition.  Dual-lattice points carry doubled coordinates,
so the dual point (1/2, 1/2) is stored as (1, 1) and equality tests stay
exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

Site = tuple[int, int]


class BoundaryCondition(Enum):
    PLUS = "plus"
    MINUS = "minus"
    FREE = "free"

    @property
    def exterior_spin(self) -> int | None:
        """Spin carried by every site outside the window, None for FREE."""
        if self is BoundaryCondition.PLUS:
            return 1
        if self is BoundaryCondition.MINUS:
            return -1
        return None


@dataclass(frozen=True)
class Window:
    """Rectangular sublattice [o1, o1+width) x [o2, o2+height)."""

    width: int
    height: int
    origin: Site = (0, 0)
    boundary: BoundaryCondition = BoundaryCondition.FREE

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("window dimensions must be positive")

    @classmethod
    def centered(cls, n: int, boundary: BoundaryCondition = BoundaryCondition.FREE) -> "Window":
        """The box [-n, n]^2."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        return cls(width=2 * n + 1, height=2 * n + 1, origin=(-n, -n), boundary=boundary)

    @property
    def site_count(self) -> int:
        return self.width * self.height

    def contains(self, site: Site) -> bool:
        o1, o2 = self.origin
        return o1 <= site[0] < o1 + self.width and o2 <= site[1] < o2 + self.height

    def is_edge_site(self, site: Site) -> bool:
        o1, o2 = self.origin
        i1, i2 = site
        return (
            i1 == o1 or i1 == o1 + self.width - 1 or i2 == o2 or i2 == o2 + self.height - 1
        )

    def sites(self) -> list[Site]:
        """All window sites in row-major order."""
        o1, o2 = self.origin
        return [(o1 + a, o2 + b) for a in range(self.width) for b in range(self.height)]

    def index(self, site: Site) -> int:
        """Row-major flat index of a window site."""
        if not self.contains(site):
            raise ValueError(f"site {site} outside window")
        o1, o2 = self.origin
        return (site[0] - o1) * self.height + (site[1] - o2)

    def site_at(self, flat: int) -> Site:
        o1, o2 = self.origin
        a, b = divmod(flat, self.height)
        return (o1 + a, o2 + b)

    def center(self) -> Site:
        o1, o2 = self.origin
        return (o1 + (self.width - 1) // 2, o2 + (self.height - 1) // 2)


@dataclass
class Configuration:
    """Spin assignment in {-1, +1} over the sites of a window.

    ``spins[a, b]`` is the spin at site ``(origin[0] + a, origin[1] + b)``.
    """

    window: Window
    spins: np.ndarray

    def __post_init__(self):
        self.spins = np.asarray(self.spins, dtype=np.int8)
        if self.spins.shape != (self.window.width, self.window.height):
            raise ValueError("spin array shape does not match window")
        if not np.all(np.abs(self.spins) == 1):
            raise ValueError("spins must be -1 or +1")

    @classmethod
    def filled(cls, window: Window, value: int) -> "Configuration":
        return cls(window, np.full((window.width, window.height), value, dtype=np.int8))

    @classmethod
    def from_sites(cls, window: Window, values: dict[Site, int]) -> "Configuration":
        arr = np.empty((window.width, window.height), dtype=np.int8)
        o1, o2 = window.origin
        for site in window.sites():
            arr[site[0] - o1, site[1] - o2] = values[site]
        return cls(window, arr)

    def spin(self, site: Site) -> int:
        o1, o2 = self.window.origin
        if not self.window.contains(site):
            raise ValueError(f"site {site} outside window")
        return int(self.spins[site[0] - o1, site[1] - o2])

    def spin_or_exterior(self, site: Site) -> int:
        """Spin at a site, falling back to the boundary condition outside."""
        if self.window.contains(site):
            return self.spin(site)
        ext = self.window.boundary.exterior_spin
        if ext is None:
            raise ValueError("free boundary supplies no exterior spin")
        return ext

    def copy(self) -> "Configuration":
        return Configuration(self.window, self.spins.copy())

    def minus_sites(self) -> set[Site]:
        o1, o2 = self.window.origin
        idx = np.argwhere(self.spins == -1)
        return {(o1 + int(a), o2 + int(b)) for a, b in idx}


def neighbors(site: Site) -> list[Site]:
    """The four sites at L1-distance 1, in row-major order, unclipped."""
    i1, i2 = site
    return [(i1 - 1, i2), (i1, i2 - 1), (i1, i2 + 1), (i1 + 1, i2)]


def sort_sites(sites) -> list[Site]:
    return sorted(sites)


def boundary_sites(sites) -> set[Site]:
    """Boundary of a finite site set: members with a neighbor outside the set."""
    fset = set(sites)
    return {j for j in fset if any(k not in fset for k in neighbors(j))}


def interior(sites) -> set[Site]:
    fset = set(sites)
    return fset - boundary_sites(fset)


def connected_components(sites) -> list[set[Site]]:
    """Maximal L1-connected pieces, ordered by their minimal row-major site."""
    remaining = set(sites)
    components = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        stack = [seed]
        while stack:
            cur = stack.pop()
            for nb in neighbors(cur):
                if nb in remaining and nb not in comp:
                    comp.add(nb)
                    stack.append(nb)
        remaining -= comp
        components.append(comp)
    components.sort(key=min)
    return components


def is_self_avoiding_path(path) -> bool:
    """Consecutive sites adjacent; non-consecutive sites distinct and non-adjacent."""
    n = len(path)
    if len(set(path)) != n:
        return False
    for j in range(n):
        for k in range(j + 1, n):
            adjacent = abs(path[j][0] - path[k][0]) + abs(path[j][1] - path[k][1]) == 1
            if adjacent != (k - j == 1):
                return False
    return True


def enumerate_self_avoiding_paths(
    start_sites,
    length: int,
    window: Window,
    exclude=(),
) -> list[tuple[Site, ...]]:
    """All self-avoiding paths of exactly ``length`` sites starting in ``start_sites``.

    Paths stay inside the window and avoid the sites in ``exclude``.  Passing
    the origin in ``exclude`` while starting from its four neighbors
    reproduces the non-backtracking count 4 * 3^(n-1) from the origin.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    excluded = set(exclude)

    def extend(path, occupied, out):
        if len(path) == length:
            out.append(tuple(path))
            return
        last = path[-1]
        for cand in neighbors(last):
            if not window.contains(cand) or cand in excluded or cand in occupied:
                continue
            # strict self-avoidance: cand may touch the path only at `last`
            if any(s in occupied and s != last for s in neighbors(cand)):
                continue
            path.append(cand)
            occupied.add(cand)
            extend(path, occupied, out)
            occupied.discard(cand)
            path.pop()

    paths: list[tuple[Site, ...]] = []
    for start in sort_sites(set(start_sites)):
        if not window.contains(start) or start in excluded:
            continue
        extend([start], {start}, paths)

    if not paths:
        # distinguish "window too small" from "starts all excluded/outside"
        probe: list[tuple[Site, ...]] = []
        for start in window.sites():
            extend([start], {start}, probe)
            if probe:
                break
        if not probe:
            raise ValueError(f"window too small to contain any path of {length} sites")
    return paths


@dataclass(frozen=True)
class Contour:
    """Closed dual-lattice cycle, vertices in doubled (odd, odd) coordinates."""

    vertices: tuple[Site, ...]

    def __post_init__(self):
        n = len(self.vertices)
        if n < 4 or n % 2 != 0:
            raise ValueError("contour length must be even and >= 4")
        for j in range(n):
            u = self.vertices[j]
            v = self.vertices[(j + 1) % n]
            if abs(u[0] - v[0]) + abs(u[1] - v[1]) != 2:
                raise ValueError("consecutive dual sites must be L1-neighbors")

    @property
    def length(self) -> int:
        return len(self.vertices)


def _rot_ccw(d: Site) -> Site:
    return (-d[1], d[0])


def _rot_cw(d: Site) -> Site:
    return (d[1], -d[0])


def disagreement_bond_count(x: Configuration) -> int:
    """Number of L1-neighbor pairs with differing spins, exterior included."""
    if x.window.boundary.exterior_spin is None:
        raise ValueError("free boundary carries no exterior spins")
    count = 0
    for site in x.window.sites():
        s = x.spin(site)
        for nb in ((site[0] + 1, site[1]), (site[0], site[1] + 1)):
            if x.window.contains(nb):
                if x.spin(nb) != s:
                    count += 1
        for nb in neighbors(site):
            if not x.window.contains(nb):
                if x.spin_or_exterior(nb) != s:
                    count += 1
    return count


def _dual_edges(x: Configuration) -> dict[tuple[Site, Site], Site]:
    """Directed dual edges over disagreement bonds, oriented with -1 on the left.

    Returns {(u, v): left_minus_site_doubled}; each undirected disagreement
    edge appears once, in its unique minus-on-left orientation.
    """

    def value(doubled: Site) -> int:
        site = (doubled[0] // 2, doubled[1] // 2)
        return x.spin_or_exterior(site)

    edges: dict[tuple[Site, Site], Site] = {}

    def add_bond(a: Site, b: Site):
        # bond between primal a, b (L1-neighbors); dual edge crosses it
        da = (2 * a[0], 2 * a[1])
        db = (2 * b[0], 2 * b[1])
        m = ((da[0] + db[0]) // 2, (da[1] + db[1]) // 2)
        if a[0] != b[0]:  # horizontal bond -> vertical dual edge
            u, v = (m[0], m[1] - 1), (m[0], m[1] + 1)
        else:
            u, v = (m[0] - 1, m[1]), (m[0] + 1, m[1])
        # orient so that the -1 site sits on the left of travel
        for p, q in ((u, v), (v, u)):
            d = ((q[0] - p[0]) // 2, (q[1] - p[1]) // 2)
            lu = _rot_ccw(d)
            left = (m[0] + lu[0], m[1] + lu[1])
            if value(left) == -1:
                edges[(p, q)] = left
                return
        raise AssertionError("disagreement bond with no minus side")

    seen = set()
    for site in x.window.sites():
        s = x.spin(site)
        for nb in neighbors(site):
            key = (min(site, nb), max(site, nb))
            if key in seen:
                continue
            seen.add(key)
            other = x.spin(nb) if x.window.contains(nb) else x.spin_or_exterior(nb)
            if other != s:
                add_bond(site, nb)
    return edges


def extract_contours(x: Configuration) -> list[Contour]:
    """Closed dual curves separating +1 from -1 regions, plus boundary only.

    Where four disagreement edges meet at a dual site the walk turns left,
    so diagonally touching same-sign regions stay in separate contours that
    meet only at the dual point.  The sum of contour lengths always equals
    the disagreement-bond count.
    """
    if x.window.boundary is not BoundaryCondition.PLUS:
        raise ValueError("contour correspondence requires an all-plus boundary")

    edges = _dual_edges(x)
    edge_set = set(edges)
    used: set[tuple[Site, Site]] = set()

    def successor(u: Site, v: Site) -> tuple[Site, Site]:
        d = ((v[0] - u[0]) // 2, (v[1] - u[1]) // 2)
        for nd in (_rot_ccw(d), d, _rot_cw(d)):
            w = (v[0] + 2 * nd[0], v[1] + 2 * nd[1])
            if (v, w) in edge_set:
                return (v, w)
        raise AssertionError("open dual curve: no successor edge")

    contours = []
    for start in sorted(edge_set):
        if start in used:
            continue
        cycle = [start[0]]
        cur = start
        while True:
            used.add(cur)
            nxt = successor(*cur)
            if nxt == start:
                break
            if nxt in used:
                raise AssertionError("dual walk revisited a directed edge")
            cycle.append(cur[1])
            cur = nxt
        contours.append(Contour(tuple(cycle)))
    contours.sort(key=lambda c: min(c.vertices))
    return contours


def origin_in_interior(cycle: tuple[Site, ...]) -> bool:
    """Whether the primal origin lies inside a dual cycle (doubled coords)."""
    crossings = 0
    n = len(cycle)
    for j in range(n):
        (x1, y1), (x2, y2) = cycle[j], cycle[(j + 1) % n]
        if x1 == x2 and x1 > 0 and min(y1, y2) < 0 < max(y1, y2):
            crossings += 1
    return crossings % 2 == 1


def count_contours_through_origin(length: int) -> int:
    """Exact number of closed dual cycles of given length enclosing the origin.

    Cycles are self-avoiding closed walks on the dual lattice; each
    undirected cycle is counted once.  Feasible for length <= 12.
    """
    if length < 4 or length % 2 != 0:
        raise ValueError("contour length must be even and >= 4")
    bound = length - 1
    candidates = [
        (a, b)
        for a in range(-bound, bound + 1, 2)
        for b in range(-bound, bound + 1, 2)
        if a % 2 != 0
    ]
    count = 0

    def dfs(v0, path, occupied):
        nonlocal count
        last = path[-1]
        remaining = length - len(path)
        if remaining == 0:
            if (
                abs(last[0] - v0[0]) + abs(last[1] - v0[1]) == 2
                and path[1] < path[-1]
                and origin_in_interior(tuple(path))
            ):
                count += 1
            return
        for d in ((0, 2), (2, 0), (0, -2), (-2, 0)):
            w = (last[0] + d[0], last[1] + d[1])
            if w <= v0 or w in occupied:
                continue
            if abs(w[0]) > bound or abs(w[1]) > bound:
                continue
            # must still be able to return to v0
            if abs(w[0] - v0[0]) + abs(w[1] - v0[1]) > 2 * (remaining):
                continue
            path.append(w)
            occupied.add(w)
            dfs(v0, path, occupied)
            occupied.discard(w)
            path.pop()

    for v0 in sorted(candidates):
        dfs(v0, [v0], {v0})
    return count
