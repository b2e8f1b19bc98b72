"""Cayley digraphs on the additive tensor space, and automorphism witnesses.

Arc rule: (x, y) is an arc of Cay(T, S) iff x - y lies in S (componentwise
mod p through the vertex codec).  Every connection set used here is closed
under negation, so arcs come in opposite pairs; directed semantics are kept
anyway.  Adjacency is answered from a membership bitmap over the p^(2m)
vertices rather than materialized arc lists.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    BadDecomposition,
    CertificationFailed,
    EmptyUnion,
    ParameterTooLarge,
)
from .fields import INFINITY
from .matrices import (
    Matrix,
    all_coords,
    encode_array,
    linear_vertex_map,
    mat_inv,
    num_vertices,
)
from .groups import LinPart, nontrivial_labels, suborbit_indices

BFS_MAX_VERTICES = 10**6


def direction_vector(d, p: int) -> tuple[int, int]:
    """Representative vector of a projective direction: slope mu or INFINITY."""
    if d is INFINITY:
        return (0, 1)
    return (1, int(d) % p)


class ConnectionSet:
    """A negation-closed set of nonzero vertices defining a Cayley digraph."""

    __slots__ = ("m", "p", "members", "mask", "labels")

    def __init__(self, indices, m: int, p: int, labels=None):
        n = num_vertices(m, p)
        members = np.unique(np.asarray(indices, dtype=np.int64))
        if members.size == 0:
            raise EmptyUnion("connection set is empty")
        if members[0] < 0 or members[-1] >= n:
            raise ValueError("vertex index out of range")
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        if mask[0]:
            raise ValueError("connection set must not contain 0")
        neg = negation_map(m, p)
        if not mask[neg[members]].all():
            raise ValueError("connection set must be negation-closed")
        mask.flags.writeable = False
        members.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "labels", frozenset(labels) if labels else None)

    def __setattr__(self, *a):
        raise AttributeError("ConnectionSet is immutable")

    def __len__(self):
        return int(self.members.size)

    def __contains__(self, idx):
        return bool(self.mask[int(idx)])

    def __repr__(self):
        lab = sorted(self.labels) if self.labels else "custom"
        return f"ConnectionSet(m={self.m}, p={self.p}, |S|={len(self)}, labels={lab})"


def negation_map(m: int, p: int) -> np.ndarray:
    """Vertex permutation x |-> -x."""
    return encode_array((-all_coords(m, p)) % p, p)


def addition_map(s_index: int, m: int, p: int) -> np.ndarray:
    """Vertex permutation x |-> x + s."""
    coords = all_coords(m, p)
    s = coords[int(s_index)]
    return encode_array((coords + s) % p, p)


def difference_index(x: int, y: int, m: int, p: int) -> int:
    coords = all_coords(m, p)
    return int(encode_array((coords[int(x)] - coords[int(y)]) % p, p))


def orbital_union_set(labels, m: int, p: int) -> ConnectionSet:
    """Union of the named nontrivial suborbits as a connection set."""
    tokens = frozenset(
        lab.token if hasattr(lab, "token") else str(lab) for lab in labels
    )
    if not tokens:
        raise EmptyUnion("no suborbit labels given")
    if "zero" in tokens:
        raise ValueError("the trivial suborbit does not define arcs")
    known = set(nontrivial_labels(p))
    bad = tokens - known
    if bad:
        raise ValueError(f"unknown suborbits for p={p}: {sorted(bad)}")
    parts = [suborbit_indices(t, m, p) for t in sorted(tokens)]
    return ConnectionSet(np.concatenate(parts), m, p, labels=tokens)


def complement_labels(labels, p: int) -> frozenset[str]:
    tokens = frozenset(
        lab.token if hasattr(lab, "token") else str(lab) for lab in labels
    )
    return frozenset(nontrivial_labels(p)) - tokens


def is_arc(x: int, y: int, s: ConnectionSet) -> bool:
    """Arc test: x - y in S."""
    return difference_index(x, y, s.m, s.p) in s


def is_connected(s: ConnectionSet) -> bool:
    """Breadth-first reachability of every vertex from 0 along S-steps.

    Frontier expansion is chunked and stops as soon as every vertex has
    been reached (for the orbital sets here that is almost always after
    a fragment of the second round).
    """
    n = num_vertices(s.m, s.p)
    if n > BFS_MAX_VERTICES:
        raise ParameterTooLarge(f"BFS over {n} vertices refused")
    coords = all_coords(s.m, s.p)
    s_coords = coords[s.members]
    reached = np.zeros(n, dtype=bool)
    reached[0] = True
    frontier = np.array([0], dtype=np.int64)
    chunk = max(1, 2_000_000 // max(1, len(s)))
    while frontier.size:
        nxt_parts = []
        for lo in range(0, frontier.size, chunk):
            block = coords[frontier[lo : lo + chunk]]
            nbrs = encode_array(
                (block[:, None, :, :] + s_coords[None, :, :, :]) % s.p, s.p
            ).ravel()
            new = nbrs[~reached[nbrs]]
            if new.size:
                new = np.unique(new)
                reached[new] = True
                nxt_parts.append(new)
            if reached.all():
                return True
        frontier = (
            np.concatenate(nxt_parts) if nxt_parts else np.empty(0, dtype=np.int64)
        )
    return bool(reached.all())


def preserves_set(lin, s: ConnectionSet) -> bool:
    """True iff the linear map sends S onto S (hence is an automorphism)."""
    a, b = (lin.a, lin.b) if isinstance(lin, LinPart) else lin
    coords = all_coords(s.m, s.p)[s.members]
    imgs = np.einsum("ik,nij->nkj", a.array, coords)
    imgs = np.einsum("nkj,jl->nkl", imgs, b.array) % s.p
    return bool(s.mask[encode_array(imgs, s.p)].all())


class VertexPermutation:
    """A permutation of the p^(2m) vertices, stored as an index array."""

    __slots__ = ("m", "p", "mapping")

    def __init__(self, mapping, m: int, p: int):
        arr = np.asarray(mapping, dtype=np.int64)
        n = num_vertices(m, p)
        if arr.shape != (n,):
            raise ValueError("mapping has wrong length")
        if not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValueError("mapping is not a permutation")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "mapping", arr)

    def __setattr__(self, *a):
        raise AttributeError("VertexPermutation is immutable")

    @classmethod
    def from_linear(cls, lin, m: int, p: int) -> "VertexPermutation":
        a, b = (lin.a, lin.b) if isinstance(lin, LinPart) else lin
        return cls(linear_vertex_map(a, b, m, p), m, p)

    def __call__(self, idx: int) -> int:
        return int(self.mapping[int(idx)])

    def compose(self, then: "VertexPermutation") -> "VertexPermutation":
        """Apply self first, then ``then``."""
        return VertexPermutation(then.mapping[self.mapping], self.m, self.p)

    def inverse(self) -> "VertexPermutation":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.mapping.size)
        return VertexPermutation(inv, self.m, self.p)

    def fixes_zero(self) -> bool:
        return self.mapping[0] == 0

    def is_automorphism(self, s: ConnectionSet) -> bool:
        """Exhaustive arc check.

        Verifies that every arc maps to an arc; a bijection that injects
        the finite arc set into itself is onto it, so this settles both
        directions.
        """
        if (s.m, s.p) != (self.m, self.p):
            raise ValueError("permutation and connection set live on different spaces")
        coords = all_coords(s.m, s.p)
        pcoords = coords[self.mapping]
        for si in s.members:
            add = encode_array((coords + coords[int(si)]) % s.p, s.p)
            diff = (pcoords[add] - pcoords) % s.p
            if not s.mask[encode_array(diff, s.p)].all():
                return False
        return True

    def nonadditive_witness(self):
        """A pair (u, v) with phi(u+v) != phi(u) + phi(v) - phi(0), or None.

        The translated map psi(x) = phi(x) - phi(0) is additive iff it is
        additive against every radix basis vector, so scanning pairs
        (x, basis) is a complete affinity test.
        """
        coords = all_coords(self.m, self.p)
        perm = self.mapping
        psi = (coords[perm] - coords[perm[0]]) % self.p
        for k in range(2 * self.m):
            basis = self.p**k
            shifted = encode_array((coords + coords[basis]) % self.p, self.p)
            bad = np.nonzero(
                (psi[shifted] != (psi + psi[basis]) % self.p).any(axis=(1, 2))
            )[0]
            if bad.size:
                return int(bad[0]), int(basis)
        return None


# ---------------------------------------------------------------------------
# the two-block decomposition isomorphic to a Hamming graph


def hamming_coordinates(d1, d2, m: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates (a, b) of every vertex in the splitting along d1, d2.

    Writing x = v1 (x) a + v2 (x) b for the direction vectors v1, v2, the
    map x -> (code(a), code(b)) is the vertex bijection onto the Hamming
    square of side p^m.
    """
    if d1 == d2 or (d1 is INFINITY and d2 is INFINITY):
        raise BadDecomposition("directions must be distinct")
    v1 = direction_vector(d1, p)
    v2 = direction_vector(d2, p)
    mat = Matrix(((v1[0], v2[0]), (v1[1], v2[1])), p)
    if not mat.is_invertible():
        raise BadDecomposition("directions do not span the 2-dimensional factor")
    inv = mat_inv(mat).array
    coords = all_coords(m, p)
    r = coords  # (n, 2, m); rows r1, r2
    a = (inv[0, 0] * r[:, 0, :] + inv[0, 1] * r[:, 1, :]) % p
    b = (inv[1, 0] * r[:, 0, :] + inv[1, 1] * r[:, 1, :]) % p
    radix = p ** np.arange(m, dtype=np.int64)
    return a @ radix, b @ radix


def hamming_check(s: ConnectionSet, d1, d2) -> bool:
    """Certify Cay(T, S) isomorphic to the Hamming graph H(2, p^m).

    Requires S to be exactly the union of the two direction blocks minus 0;
    then verifies the coordinate map is a bijection carrying arcs to
    Hamming adjacency and back, exhaustively.
    """
    m, p = s.m, s.p
    acode, bcode = hamming_coordinates(d1, d2, m, p)
    block = ((acode != 0) & (bcode == 0)) | ((acode == 0) & (bcode != 0))
    if not np.array_equal(np.nonzero(block)[0], s.members):
        raise BadDecomposition("S is not the union of the two direction blocks")
    q = p**m
    pair = acode * q + bcode
    if np.unique(pair).size != pair.size:
        raise BadDecomposition("coordinate map is not a bijection")
    # arcs -> Hamming adjacency
    coords = all_coords(m, p)
    for si in s.members:
        add = encode_array((coords + coords[int(si)]) % p, p)
        da = acode[add] != acode
        db = bcode[add] != bcode
        if not np.logical_xor(da, db).all():
            return False
    # Hamming adjacency -> arcs: same-b pairs and same-a pairs
    lookup = np.empty(q * q, dtype=np.int64)
    lookup[pair] = np.arange(pair.size)
    n = pair.size
    for delta in range(1, q):
        # change the a-coordinate to any other value with b fixed, and dually
        other_a = lookup[((acode + delta) % q) * q + bcode]
        diff = encode_array((coords[other_a] - coords) % p, p)
        if not s.mask[diff].all():
            return False
        other_b = lookup[acode * q + (bcode + delta) % q]
        diff = encode_array((coords[other_b] - coords) % p, p)
        if not s.mask[diff].all():
            return False
    return True


def hamming_witness(d1, d2, m: int, p: int) -> VertexPermutation:
    """A certified non-affine automorphism of the two-block Cayley graph.

    Acts in Hamming coordinates by transposing the W-codes 1 and 2 (the
    encodings of f_1 and 2 f_1) on the first coordinate only; any
    non-linear permutation of one side works, this one is the canonical
    choice.  Raises CertificationFailed unless both certificates pass:
    exhaustive arc preservation, and an explicit non-additivity pair.
    """
    if num_vertices(m, p) > BFS_MAX_VERTICES:
        raise ParameterTooLarge("witness certification gated to p^(2m) <= 10^6")
    acode, bcode = hamming_coordinates(d1, d2, m, p)
    q = p**m
    pair = acode * q + bcode
    lookup = np.empty(q * q, dtype=np.int64)
    lookup[pair] = np.arange(pair.size)
    sigma = np.arange(q, dtype=np.int64)
    sigma[1], sigma[2] = 2, 1
    perm = VertexPermutation(lookup[sigma[acode] * q + bcode], m, p)

    block = np.nonzero(((acode != 0) & (bcode == 0)) | ((acode == 0) & (bcode != 0)))[0]
    s = ConnectionSet(block, m, p)
    if not perm.is_automorphism(s):
        raise CertificationFailed("hamming witness", "arc preservation")
    if not perm.fixes_zero():
        raise CertificationFailed("hamming witness", "zero not fixed")
    if perm.nonadditive_witness() is None:
        raise CertificationFailed("hamming witness", "witness turned out affine")
    return perm
