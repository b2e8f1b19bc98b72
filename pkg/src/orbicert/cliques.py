"""Projection coordinates, parallel cliques, and the clique census.

For distinct slopes mu_1 .. mu_z (z in {4, 6}, consumed in odd/even pairs)
each odd pair splits the tensor space as a direct sum of two direction
blocks, and every vertex x has unique W-parts pi_i(x) with

    x = (e1 + mu_i e2) (x) pi_i(x) + (e1 + mu_{i+1} e2) (x) pi_{i+1}(x).

The level sets ell_i(x) = {y : pi_i(y) = pi_i(x)} are the maximum cliques
of the Cayley graph on the union of the z direction blocks; everything
here is either an exhaustive desk-scale check of that geometry or a
seeded sampled check at the two larger primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .digraphs import ConnectionSet
from .errors import (
    DegenerateConfig,
    IndexOutOfRange,
    LemmaViolation,
    ParameterTooLarge,
)
from .fields import fp_inv
from .matrices import Tensor, all_coords, encode_array, num_vertices

DEFAULT_SEED = 1729
FULL_CENSUS_MAX = 10**4
SAMPLED_INSTANCES = 100_000
SAMPLED_VERTICES = 10**4


@dataclass(frozen=True)
class MuConfig:
    """z distinct slopes over GF(p), consumed in pairs (1,2), (3,4), (5,6)."""

    z: int
    mus: tuple[int, ...]
    m: int
    p: int

    def __post_init__(self):
        if self.z not in (4, 6):
            raise DegenerateConfig(f"z must be 4 or 6, got {self.z}")
        if len(self.mus) != self.z:
            raise DegenerateConfig("need exactly z slopes")
        mus = tuple(v % self.p for v in self.mus)
        if len(set(mus)) != self.z:
            raise DegenerateConfig(f"slopes must be distinct mod {self.p}: {mus}")
        object.__setattr__(self, "mus", mus)

    @property
    def index_set(self) -> range:
        return range(1, self.z + 1)

    def partner(self, i: int) -> int:
        """Pair partner: 1<->2, 3<->4, 5<->6."""
        self._check_index(i)
        return i + 1 if i % 2 == 1 else i - 1

    def mu(self, i: int) -> int:
        self._check_index(i)
        return self.mus[i - 1]

    def _check_index(self, i: int):
        if i not in self.index_set:
            raise IndexOutOfRange(f"index {i} outside 1..{self.z}")


@dataclass(frozen=True)
class CliqueId:
    """Parallel class index i plus any member vertex of the clique."""

    i: int
    rep: int


def pi_functional(cfg: MuConfig, i: int) -> tuple[int, int]:
    """Row coefficients (alpha, beta) with pi_i(x) = alpha*r1 + beta*r2.

    Solving a + b = r1, mu_i a + mu_i' b = r2 inside the pair (i, i')
    gives pi_i = (mu_i' r1 - r2) / (mu_i' - mu_i).
    """
    j = cfg.partner(i)
    mi, mj = cfg.mu(i), cfg.mu(j)
    dinv = fp_inv((mj - mi) % cfg.p, cfg.p)
    return mj * dinv % cfg.p, (-dinv) % cfg.p


def pi_projection(x: Tensor, i: int, cfg: MuConfig) -> tuple[int, ...]:
    """The W-part of x attached to direction mu_i."""
    if (x.m, x.p) != (cfg.m, cfg.p):
        raise DegenerateConfig("tensor and configuration disagree")
    alpha, beta = pi_functional(cfg, i)
    p = cfg.p
    return tuple((alpha * a + beta * b) % p for a, b in zip(x.row1, x.row2))


def projection_coeffs(i: int, j: int, k: int, cfg: MuConfig) -> tuple[int, int]:
    """Coefficients with pi_k = k1 pi_i + k2 pi_j identically.

    The functionals of distinct indices are independent, so the 2x2 solve
    is always possible; when i, j, k are pairwise distinct both
    coefficients are nonzero.
    """
    if i == j:
        raise DegenerateConfig("need two distinct source indices")
    if k == i:
        return 1, 0
    if k == j:
        return 0, 1
    ai, bi = pi_functional(cfg, i)
    aj, bj = pi_functional(cfg, j)
    ak, bk = pi_functional(cfg, k)
    p = cfg.p
    det = (ai * bj - aj * bi) % p
    dinv = fp_inv(det, p)
    k1 = (ak * bj - aj * bk) * dinv % p
    k2 = (ai * bk - ak * bi) * dinv % p
    return k1, k2


def tensor_from_projections(
    i: int, j: int, w, wq, cfg: MuConfig
) -> Tensor:
    """The unique x with pi_i(x) = w and pi_j(x) = wq.

    Built through the coefficient relations back to the first pair, as in
    the uniqueness argument.
    """
    k1, k1q = projection_coeffs(i, j, 1, cfg)
    k2, k2q = projection_coeffs(i, j, 2, cfg)
    p = cfg.p
    pi1 = tuple((k1 * a + k1q * b) % p for a, b in zip(w, wq))
    pi2 = tuple((k2 * a + k2q * b) % p for a, b in zip(w, wq))
    mu1, mu2 = cfg.mu(1), cfg.mu(2)
    r1 = tuple((a + b) % p for a, b in zip(pi1, pi2))
    r2 = tuple((mu1 * a + mu2 * b) % p for a, b in zip(pi1, pi2))
    return Tensor.from_rows(r1, r2, p)


@lru_cache(maxsize=16)
def _pi_tables(cfg: MuConfig) -> tuple[np.ndarray, np.ndarray]:
    """(vectors, codes): pi values of every vertex for every index.

    vectors has shape (n, z, m); codes has shape (n, z) with the W-part
    encoded in radix p.
    """
    coords = all_coords(cfg.m, cfg.p)
    r1, r2 = coords[:, 0, :], coords[:, 1, :]
    radix = cfg.p ** np.arange(cfg.m, dtype=np.int64)
    vecs = np.empty((coords.shape[0], cfg.z, cfg.m), dtype=np.int64)
    for i in cfg.index_set:
        alpha, beta = pi_functional(cfg, i)
        vecs[:, i - 1, :] = (alpha * r1 + beta * r2) % cfg.p
    codes = vecs @ radix
    vecs.flags.writeable = False
    codes.flags.writeable = False
    return vecs, codes


def delta_indices(cfg: MuConfig) -> np.ndarray:
    """Vertices of the union of the z direction blocks, minus 0.

    These are exactly the nonzero vertices with some vanishing projection:
    x = (e1 + mu_i e2) (x) w iff the partner projection is 0.
    """
    _, codes = _pi_tables(cfg)
    members = np.nonzero((codes == 0).any(axis=1))[0]
    return members[members != 0]


def delta_connection_set(cfg: MuConfig) -> ConnectionSet:
    return ConnectionSet(delta_indices(cfg), cfg.m, cfg.p)


def ell_clique(clique: CliqueId, cfg: MuConfig) -> frozenset[int]:
    """All vertices sharing the i-th projection with the representative."""
    return frozenset(int(v) for v in _ell_indices(cfg, clique.i, clique.rep))


def _ell_indices(cfg: MuConfig, i: int, rep: int) -> np.ndarray:
    """Coset rep + <e1 + mu_i' e2> (x) W, as vertex indices."""
    j = cfg.partner(i)
    p, m = cfg.p, cfg.m
    qm = p**m
    idx = np.arange(qm, dtype=np.int64)
    digits = np.empty((qm, m), dtype=np.int64)
    t = idx.copy()
    for k in range(m):
        digits[:, k] = t % p
        t //= p
    muj = cfg.mu(j)
    rep_coords = all_coords(m, p)[int(rep)]
    r1 = (rep_coords[0] + digits) % p
    r2 = (rep_coords[1] + muj * digits) % p
    return encode_array(np.stack([r1, r2], axis=1), p)


def enumerate_size_cliques(s: ConnectionSet, target: int) -> list[frozenset[int]]:
    """All maximal cliques of size >= target, by branch-and-bound pivoting.

    Full-enumeration mode only; gated to p^(2m) <= 10^4 vertices.  The
    recursion is the pivoting scheme over big-int adjacency bitsets with
    branches abandoned once |R| + |P| drops below the target.
    """
    n = num_vertices(s.m, s.p)
    if n > FULL_CENSUS_MAX:
        raise ParameterTooLarge(f"full clique census gated to {FULL_CENSUS_MAX} vertices")
    coords = all_coords(s.m, s.p)
    adj = []
    for v in range(n):
        nbrs = encode_array((coords[v] + coords[s.members]) % s.p, s.p)
        bits = 0
        for u in nbrs:
            bits |= 1 << int(u)
        adj.append(bits)

    found: list[frozenset[int]] = []
    all_bits = (1 << n) - 1

    def expand(r: list[int], p_bits: int, x_bits: int):
        if len(r) + p_bits.bit_count() < target:
            return
        if p_bits == 0 and x_bits == 0:
            if len(r) >= target:
                found.append(frozenset(r))
            return
        # pivot on the candidate covering most of P
        pool = p_bits | x_bits
        best, best_cover = -1, -1
        probe = pool
        while probe:
            u = (probe & -probe).bit_length() - 1
            cover = (p_bits & adj[u]).bit_count()
            if cover > best_cover:
                best, best_cover = u, cover
            probe &= probe - 1
        branch = p_bits & ~adj[best]
        while branch:
            v = (branch & -branch).bit_length() - 1
            vbit = 1 << v
            r.append(v)
            expand(r, p_bits & adj[v], x_bits & adj[v])
            r.pop()
            p_bits &= ~vbit
            x_bits |= vbit
            branch &= branch - 1
            if len(r) + p_bits.bit_count() < target:
                return

    expand([], all_bits, 0)
    return found


def _sample_indices(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    return rng.integers(0, n, size=count, dtype=np.int64)


def verify_clique_axioms(
    cfg: MuConfig,
    seed: int = DEFAULT_SEED,
    samples: int = SAMPLED_INSTANCES,
    census: bool | None = None,
) -> dict:
    """Check the projection/clique geometry; exhaustive at desk scale.

    Exhaustive mode runs when p^(2m) <= 10^4 (and then includes the full
    clique census unless ``census=False``); otherwise each lemma is checked
    on >= ``samples`` seeded random instances, the pair-map injectivity is
    still checked exactly, and the census is replaced by per-vertex local
    neighborhood decompositions on 10^4 sampled vertices.

    Returns a certificate payload; raises LemmaViolation on any failure.
    """
    if cfg.p <= cfg.z:
        raise DegenerateConfig(f"rigidity geometry needs p > z, got p={cfg.p}, z={cfg.z}")
    n = num_vertices(cfg.m, cfg.p)
    exhaustive = n <= FULL_CENSUS_MAX
    if census is None:
        census = exhaustive
    vecs, codes = _pi_tables(cfg)
    coords = all_coords(cfg.m, cfg.p)
    members = delta_indices(cfg)
    mask = np.zeros(n, dtype=bool)
    mask[members] = True
    p, m, z = cfg.p, cfg.m, cfg.z
    qm = p**m
    checks: dict[str, dict] = {}
    mode = "exhaustive" if exhaustive else "sampled"

    def record(name: str, instances: int):
        checks[name] = {"mode": mode, "instances_checked": int(instances), "status": "pass"}

    # --- reconstruction identity, every vertex, every pair (always exact)
    for i in range(1, z + 1, 2):
        j = i + 1
        mi, mj = cfg.mu(i), cfg.mu(j)
        a, b = vecs[:, i - 1, :], vecs[:, j - 1, :]
        r1 = (a + b) % p
        r2 = (mi * a + mj * b) % p
        if not (
            np.array_equal(r1, coords[:, 0, :]) and np.array_equal(r2, coords[:, 1, :])
        ):
            bad = int(np.nonzero((r1 != coords[:, 0, :]).any(axis=1))[0][0])
            raise LemmaViolation("reconstruction", {"pair": (i, j), "vertex": bad})
    record("reconstruction", n * (z // 2))

    # --- pair-map injectivity: (pi_i, pi_j) determines the vertex (exact)
    for i in range(1, z + 1):
        for j in range(i + 1, z + 1):
            pair_code = codes[:, i - 1] * qm + codes[:, j - 1]
            if np.unique(pair_code).size != n:
                raise LemmaViolation("two-projections-determine", {"pair": (i, j)})
    record("two_projections_determine", n * z * (z - 1) // 2)

    # --- coefficient relations pi_k in terms of pi_i, pi_j (exact)
    for i in range(1, z + 1):
        for j in range(1, z + 1):
            if i == j:
                continue
            for k in range(1, z + 1):
                k1, k2 = projection_coeffs(i, j, k, cfg)
                if k not in (i, j) and (k1 == 0 or k2 == 0):
                    raise LemmaViolation(
                        "projection-relations-nonzero", {"triple": (i, j, k)}
                    )
                lhs = vecs[:, k - 1, :]
                rhs = (k1 * vecs[:, i - 1, :] + k2 * vecs[:, j - 1, :]) % p
                if not np.array_equal(lhs, rhs):
                    raise LemmaViolation("projection-relations", {"triple": (i, j, k)})
    record("projection_relations", n * z * (z - 1) * z)

    rng = np.random.default_rng(seed)

    # --- linearity of the projections, and direct pairwise adjacency checks
    pairwise_adjacency_checked = 0
    if exhaustive:
        block = max(1, 500_000 // n)
        for lo in range(0, n, block):
            xs_b = np.arange(lo, min(lo + block, n), dtype=np.int64)
            sums = encode_array((coords[xs_b][:, None] + coords[None, :]) % p, p)
            want = (vecs[xs_b][:, None] + vecs[None, :]) % p
            if not np.array_equal(vecs[sums], want):
                where = np.nonzero((vecs[sums] != want).any(axis=(2, 3)))
                raise LemmaViolation(
                    "projection-additive",
                    {"x": int(xs_b[where[0][0]]), "y": int(where[1][0])},
                )
            diffs = encode_array((coords[xs_b][:, None] - coords[None, :]) % p, p)
            shared = (codes[xs_b][:, None] == codes[None, :]).any(axis=2)
            arcs = mask[diffs] | (diffs == 0)
            if not np.array_equal(arcs, shared):
                where = np.nonzero(arcs != shared)
                raise LemmaViolation(
                    "adjacency-shared-projection",
                    {"x": int(xs_b[where[0][0]]), "y": int(where[1][0])},
                )
            pairwise_adjacency_checked += xs_b.size * n
        add_count = n * n
    else:
        xs = _sample_indices(rng, n, samples)
        ys = _sample_indices(rng, n, samples)
        idx = encode_array((coords[xs] + coords[ys]) % p, p)
        if not np.array_equal(vecs[idx], (vecs[xs] + vecs[ys]) % p):
            bad = int(np.nonzero((vecs[idx] != (vecs[xs] + vecs[ys]) % p).any(axis=(1, 2)))[0][0])
            raise LemmaViolation(
                "projection-additive", {"x": int(xs[bad]), "y": int(ys[bad])}
            )
        add_count = samples
    for kappa in range(p):
        idx = encode_array((kappa * coords) % p, p)
        if not np.array_equal(vecs[idx], (kappa * vecs) % p):
            raise LemmaViolation("projection-scalar", {"kappa": kappa})
    checks["projection_linearity"] = {
        "mode": mode,
        "instances_checked": int(add_count + p * n),
        "status": "pass",
    }

    # --- adjacency iff shared projection
    zero_proj = (codes == 0).any(axis=1)
    diff_ok = np.nonzero(zero_proj)[0]
    expected = np.concatenate(([0], members))
    if not np.array_equal(diff_ok, np.sort(expected)):
        raise LemmaViolation("adjacency-shared-projection", "difference sets disagree")
    if exhaustive:
        pair_count = pairwise_adjacency_checked  # done in the blocked loop above
    else:
        xs = _sample_indices(rng, n, samples)
        ys = _sample_indices(rng, n, samples)
        d = encode_array((coords[xs] - coords[ys]) % p, p)
        shared = (codes[xs] == codes[ys]).any(axis=1)
        arcs = mask[d] | (d == 0)
        bad = np.nonzero(arcs != shared)[0]
        if bad.size:
            raise LemmaViolation(
                "adjacency-shared-projection",
                {"x": int(xs[bad[0]]), "y": int(ys[bad[0]])},
            )
        pair_count = samples
    checks["adjacency_iff_shared_projection"] = {
        "mode": mode,
        "instances_checked": int(pair_count),
        "status": "pass",
    }

    # --- clique geometry
    if exhaustive:
        clique_count = 0
        all_cliques: dict[int, list[np.ndarray]] = {}
        for i in cfg.index_set:
            # distinct cosets = distinct pi_i codes
            order = np.argsort(codes[:, i - 1], kind="stable")
            sorted_codes = codes[order, i - 1]
            starts = np.nonzero(np.r_[True, sorted_codes[1:] != sorted_codes[:-1]])[0]
            groups = np.split(order, starts[1:])
            if len(groups) != qm:
                raise LemmaViolation("clique-count", {"i": i, "got": len(groups)})
            for g in groups:
                if g.size != qm:
                    raise LemmaViolation("clique-size", {"i": i, "size": int(g.size)})
                d = encode_array((coords[g][:, None] - coords[g][None, :]) % p, p)
                off = ~np.eye(g.size, dtype=bool)
                if not mask[d[off]].all():
                    raise LemmaViolation("clique-internal-arcs", {"i": i})
            all_cliques[i] = groups
            clique_count += len(groups)
        record("cliques_are_cliques", clique_count)

        # pairwise intersections across classes are single vertices
        inter_checked = 0
        for i in cfg.index_set:
            for j in cfg.index_set:
                if j <= i:
                    continue
                pair_code = codes[:, i - 1] * qm + codes[:, j - 1]
                counts = np.bincount(pair_code, minlength=qm * qm)
                if not (counts == 1).all():
                    raise LemmaViolation("clique-intersection", {"pair": (i, j)})
                inter_checked += qm * qm
        record("clique_intersection", inter_checked)

        # parallel cliques partition the space
        for i in cfg.index_set:
            sizes = np.bincount(codes[:, i - 1], minlength=qm)
            if not (sizes == qm).all():
                raise LemmaViolation("parallel-partition", {"i": i})
        record("parallel_partition", z * n)

        if census:
            target = qm
            s = delta_connection_set(cfg)
            cliques = enumerate_size_cliques(s, target)
            expected_cliques = {
                frozenset(int(v) for v in g) for groups in all_cliques.values() for g in groups
            }
            if {frozenset(c) for c in cliques} != expected_cliques:
                raise LemmaViolation(
                    "clique-census",
                    {"found": len(cliques), "expected": len(expected_cliques)},
                )
            checks["clique_census"] = {
                "mode": "exhaustive",
                "instances_checked": len(cliques),
                "status": "pass",
                "maximum_cliques": len(cliques),
                "clique_size": target,
            }
    else:
        # sampled: local neighborhood decomposition at 10^4 seeded vertices
        sample_v = rng.choice(n, size=min(SAMPLED_VERTICES, n), replace=False)
        deg = members.size
        for x in sample_v:
            nbrs = encode_array((coords[int(x)] + coords[members]) % p, p)
            shared = (codes[nbrs] == codes[int(x)]).any(axis=1)
            if not shared.all():
                raise LemmaViolation("local-neighborhood", {"x": int(x)})
        checks["local_neighborhood"] = {
            "mode": "sampled",
            "instances_checked": int(sample_v.size * deg),
            "status": "pass",
        }
        # sampled internal arcs of ell cliques
        xs = _sample_indices(rng, n, samples)
        iss = rng.integers(1, z + 1, size=samples)
        partners = np.where(iss % 2 == 1, iss + 1, iss - 1)
        mus = np.array([0] + list(cfg.mus), dtype=np.int64)
        w = rng.integers(0, qm, size=samples, dtype=np.int64)
        w_digits = np.empty((samples, m), dtype=np.int64)
        t = w.copy()
        for k in range(m):
            w_digits[:, k] = t % p
            t //= p
        r1 = (coords[xs][:, 0, :] + w_digits) % p
        r2 = (coords[xs][:, 1, :] + mus[partners][:, None] * w_digits) % p
        other = encode_array(np.stack([r1, r2], axis=1), p)
        same = (codes[other][np.arange(samples), iss - 1] == codes[xs][np.arange(samples), iss - 1])
        if not same.all():
            bad = int(np.nonzero(~same)[0][0])
            raise LemmaViolation("ell-membership", {"x": int(xs[bad]), "i": int(iss[bad])})
        nonzero_w = w != 0
        d = encode_array((coords[other] - coords[xs]) % p, p)
        if not mask[d[nonzero_w]].all():
            raise LemmaViolation("ell-internal-arcs", None)
        checks["ell_cliques_sampled"] = {
            "mode": "sampled",
            "instances_checked": int(samples),
            "status": "pass",
        }

    return {
        "config": {"z": z, "mus": list(cfg.mus), "m": m, "p": p},
        "mode": mode,
        "seed": int(seed),
        "vertices": int(n),
        "connection_set_size": int(members.size),
        "checks": checks,
    }
