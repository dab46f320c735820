"""Context support functions of the observed field.

The context of a site is the intersection of all L1-connected sets that
contain the site in their interior and carry +1 on their boundary, minus
the site itself.  ``compute_context`` realizes it by cluster growth;
``brute_force_context`` is the literal intersection over all qualifying
subsets and serves as the oracle for the growth algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .lattice import Configuration, Site, Window, interior, neighbors

_L1_STRUCTURE = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class ContextStatus(Enum):
    RESOLVED = "resolved_within_window"
    TRUNCATED = "truncated_by_window"


@dataclass(frozen=True)
class Context:
    """Context members at a center site, with window-finiteness status.

    ``members`` excludes the center.  When truncated, no finite qualifying
    set fits the window and ``members`` is empty by convention: the natural
    fallback is the whole lattice minus the center, which a finite window
    cannot represent.
    """

    center: Site
    members: frozenset[Site]
    status: ContextStatus

    @property
    def size(self) -> int:
        return len(self.members)


def compute_context(x: Configuration, i: Site) -> Context:
    """Grow the minimal qualifying set: the -1 clusters attached to the
    center's neighborhood plus their all-plus exterior ring."""
    window = x.window
    if not window.contains(i):
        raise ValueError(f"site {i} outside window")

    truncated = False
    cluster: set[Site] = set()
    stack = []
    for nb in neighbors(i):
        if not window.contains(nb):
            truncated = True
        elif x.spin(nb) == -1:
            cluster.add(nb)
            stack.append(nb)
    while stack:
        cur = stack.pop()
        for nb in neighbors(cur):
            if not window.contains(nb):
                truncated = True
            elif x.spin(nb) == -1 and nb not in cluster:
                cluster.add(nb)
                stack.append(nb)

    if truncated:
        return Context(center=i, members=frozenset(), status=ContextStatus.TRUNCATED)

    core = cluster | {i}
    ring = set()
    for site in core:
        for nb in neighbors(site):
            if nb not in core:
                ring.add(nb)  # inside the window and +1 by construction
    members = frozenset((cluster | ring) - {i})
    return Context(center=i, members=members, status=ContextStatus.RESOLVED)


_BRUTE_FORCE_CAP = 18


@lru_cache(maxsize=32)
def _subset_geometry(width: int, height: int):
    """Per-subset connectivity and boundary bitmasks for a small window.

    Site j is bit j in row-major order.  ``boundary_bits[m]`` are the sites
    of subset m that have a neighbor (in the full lattice) outside m; sites
    on the window edge always qualify.
    """
    n = width * height
    nb_in = [0] * n
    edge = [False] * n
    for a in range(width):
        for b in range(height):
            j = a * height + b
            for da, db in ((-1, 0), (0, -1), (0, 1), (1, 0)):
                na, nbb = a + da, b + db
                if 0 <= na < width and 0 <= nbb < height:
                    nb_in[j] |= 1 << (na * height + nbb)
                else:
                    edge[j] = True

    masks = np.arange(2**n, dtype=np.int64)
    boundary = np.zeros(2**n, dtype=np.int64)
    for j in range(n):
        member = (masks >> j) & 1 == 1
        exposed = (masks & nb_in[j]) != nb_in[j]
        if edge[j]:
            exposed = np.ones_like(exposed)
        boundary |= np.where(member & exposed, 1 << j, 0)

    connected = np.zeros(2**n, dtype=bool)
    connected[0] = False
    for m in range(1, 2**n):
        comp = m & (-m)
        while True:
            grown = comp
            probe = comp
            while probe:
                j = (probe & -probe).bit_length() - 1
                probe &= probe - 1
                grown |= nb_in[j] & m
            if grown == comp:
                break
            comp = grown
        connected[m] = comp == m
    return boundary, connected


def brute_force_context(x: Configuration, i: Site) -> Context:
    """Literal intersection over every qualifying subset of the window.

    Exponential in the window size; also asserts that the intersection
    itself qualifies (the context cannot be shortened).
    """
    window = x.window
    if window.site_count > _BRUTE_FORCE_CAP:
        raise ValueError(
            f"brute force limited to {_BRUTE_FORCE_CAP} sites, window has {window.site_count}"
        )
    if not window.contains(i):
        raise ValueError(f"site {i} outside window")

    boundary_bits, connected = _subset_geometry(window.width, window.height)
    center_idx = window.index(i)
    need = 1 << center_idx
    for nb in neighbors(i):
        if not window.contains(nb):
            return Context(center=i, members=frozenset(), status=ContextStatus.TRUNCATED)
        need |= 1 << window.index(nb)

    flat = x.spins.reshape(-1)
    minus_mask = 0
    for j in range(window.site_count):
        if flat[j] == -1:
            minus_mask |= 1 << j

    masks = np.arange(2**window.site_count, dtype=np.int64)
    qualifies = (
        connected
        & ((masks & need) == need)
        & ((boundary_bits & minus_mask) == 0)
    )
    valid = masks[qualifies]
    if valid.size == 0:
        return Context(center=i, members=frozenset(), status=ContextStatus.TRUNCATED)

    inter = int(np.bitwise_and.reduce(valid))
    # minimality: the intersection is itself a qualifying set
    if not qualifies[inter]:
        raise AssertionError("intersection of qualifying sets does not qualify")
    members = frozenset(
        window.site_at(j)
        for j in range(window.site_count)
        if (inter >> j) & 1 and j != center_idx
    )
    return Context(center=i, members=members, status=ContextStatus.RESOLVED)


@dataclass
class ContextCensus:
    """Window-wide context summary over interior sites (row-major order)."""

    window: Window
    interior_sites: list[Site]
    sizes: np.ndarray  # |C_i| for resolved sites, -1 where truncated
    truncated: np.ndarray  # bool per interior site
    max_minus_cluster: int
    spanning: bool

    @property
    def truncated_fraction(self) -> float:
        if len(self.interior_sites) == 0:
            return float("nan")
        return float(self.truncated.mean())

    def resolved_sizes(self) -> np.ndarray:
        return self.sizes[~self.truncated]


def context_census(x: Configuration) -> ContextCensus:
    """Per-site context sizes from one shared -1 cluster labeling pass."""
    window = x.window
    minus = x.spins == -1
    labels, nlab = ndimage.label(minus, structure=_L1_STRUCTURE)

    cluster_size = np.zeros(nlab + 1, dtype=np.int64)
    for lab, cnt in zip(*np.unique(labels[labels > 0], return_counts=True)):
        cluster_size[lab] = cnt

    touches_edge = np.zeros(nlab + 1, dtype=bool)
    if nlab:
        for edge in (labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]):
            touches_edge[np.unique(edge[edge > 0])] = True

    spanning = False
    if nlab:
        lr = set(np.unique(labels[0, :])) & set(np.unique(labels[-1, :]))
        tb = set(np.unique(labels[:, 0])) & set(np.unique(labels[:, -1]))
        spanning = bool((lr | tb) - {0})

    # +1 sites adjacent to each cluster
    boundary_of: list[set[tuple[int, int]]] = [set() for _ in range(nlab + 1)]
    W, H = window.width, window.height
    for a in range(W):
        for b in range(H):
            lab = labels[a, b]
            if lab == 0:
                continue
            for da, db in ((-1, 0), (0, -1), (0, 1), (1, 0)):
                na, nbb = a + da, b + db
                if 0 <= na < W and 0 <= nbb < H and labels[na, nbb] == 0:
                    boundary_of[lab].add((na, nbb))

    o1, o2 = window.origin
    interior_sites = [
        (o1 + a, o2 + b) for a in range(1, W - 1) for b in range(1, H - 1)
    ]
    sizes = np.full(len(interior_sites), -1, dtype=np.int64)
    truncated = np.zeros(len(interior_sites), dtype=bool)

    for idx, (a, b) in enumerate(
        (a, b) for a in range(1, W - 1) for b in range(1, H - 1)
    ):
        attached = set()
        plus_nbrs = set()
        for da, db in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            na, nbb = a + da, b + db
            lab = labels[na, nbb]
            if lab:
                attached.add(lab)
            else:
                plus_nbrs.add((na, nbb))
        if any(touches_edge[lab] for lab in attached):
            truncated[idx] = True
            continue
        n_cluster = sum(int(cluster_size[lab]) for lab in attached)
        if labels[a, b] in attached:
            n_cluster -= 1  # the center belongs to an attached cluster
        ring = set()
        for lab in attached:
            ring |= boundary_of[lab]
        ring |= plus_nbrs
        ring.discard((a, b))
        sizes[idx] = n_cluster + len(ring)

    return ContextCensus(
        window=window,
        interior_sites=interior_sites,
        sizes=sizes,
        truncated=truncated,
        max_minus_cluster=int(cluster_size.max()) if nlab else 0,
        spanning=spanning,
    )


def spanning_minus_cluster(x: Configuration) -> bool:
    """Whether some -1 cluster touches two opposite window edges."""
    minus = x.spins == -1
    labels, nlab = ndimage.label(minus, structure=_L1_STRUCTURE)
    if not nlab:
        return False
    lr = set(np.unique(labels[0, :])) & set(np.unique(labels[-1, :]))
    tb = set(np.unique(labels[:, 0])) & set(np.unique(labels[:, -1]))
    return bool((lr | tb) - {0})
