"""Shared test utilities and independent oracles.

Oracles here deliberately avoid the library's vectorized paths: they use
plain loops over atoms and the scalar definitions, so agreement with the
library is a two-route check.
"""

from fractions import Fraction
from itertools import product

from simauction.distribution import BidDistribution
from simauction.model import BidGrid, BidPair, TypePoint, UtilitySpec


def bp(a, b) -> BidPair:
    return BidPair(Fraction(a), Fraction(b))


def tp(a, b) -> TypePoint:
    return TypePoint(float(a), float(b))


def mu_from_atoms(grid: BidGrid, atoms) -> BidDistribution:
    return BidDistribution(grid, tuple((b, float(w)) for b, w in atoms))


def oracle_win_probs(mu: BidDistribution, b: BidPair) -> dict:
    """Brute-force region sums over the support, straight from the
    definition of per-object strict wins and fair-coin ties."""
    p3 = p1 = p2 = q1 = q2 = 0.0
    for (o, w) in mu.atoms:
        win1 = 1.0 if b.b1 > o.b1 else 0.5 if b.b1 == o.b1 else 0.0
        win2 = 1.0 if b.b2 > o.b2 else 0.5 if b.b2 == o.b2 else 0.0
        q1 += w * win1
        q2 += w * win2
        p3 += w * win1 * win2
        p1 += w * win1 * (1.0 - win2)
        p2 += w * (1.0 - win1) * win2
    return {"q1": q1, "q2": q2, "p1": p1, "p2": p2, "p3": p3}


def oracle_interim_utility(b: BidPair, x: TypePoint, mu: BidDistribution, spec: UtilitySpec) -> float:
    """Expected ex-post utility by enumerating support atoms and the four
    coin outcomes (each pair of coins has probability 1/4)."""
    from simauction.model import allocate, ex_post_utility

    total = 0.0
    for (o, w) in mu.atoms:
        for tie1, tie2 in product((False, True), repeat=2):
            a = allocate(b, o, tie1, tie2)
            total += w * 0.25 * ex_post_utility(a, b, x, spec)
    return total


def brute_force_argmax(mu, x, spec, bids) -> tuple[list[BidPair], float]:
    """Exhaustive argmax of the scalar interim utility over the lattice."""
    from simauction.interim import interim_utility

    best = None
    arg: list[BidPair] = []
    for b in bids.pairs():
        v = interim_utility(b, x, mu, spec)
        if best is None or v > best:
            best, arg = v, [b]
        elif v == best:
            arg.append(b)
    return arg, best


def exact_brute_force_argmax(mu, x, spec, bids) -> list[BidPair]:
    """Exhaustive exact-rational argmax via coin enumeration: for each bid,
    the expected ex-post utility is summed atom by atom over the four coin
    outcomes with Fraction arithmetic over the float-valued primitives."""
    from simauction.model import q_both

    solo1 = Fraction(spec.solo1(x.x1))
    solo2 = Fraction(spec.solo2(x.x2))
    synergy = Fraction(spec.synergy(x.x1, x.x2))
    best = None
    arg: list[BidPair] = []
    for b in bids.pairs():
        v = Fraction(0)
        for (o, w) in mu.atoms:
            win1 = Fraction(1) if b.b1 > o.b1 else Fraction(1, 2) if b.b1 == o.b1 else Fraction(0)
            win2 = Fraction(1) if b.b2 > o.b2 else Fraction(1, 2) if b.b2 == o.b2 else Fraction(0)
            v += Fraction(float(w)) * (
                win1 * (solo1 - b.b1) + win2 * (solo2 - b.b2) + q_both(b, o) * synergy
            )
        if best is None or v > best:
            best, arg = v, [b]
        elif v == best:
            arg.append(b)
    return arg


def random_mu(bids: BidGrid, rng) -> BidDistribution:
    """Random distribution over a random subset of the bid lattice."""
    import math

    pairs = list(bids.pairs())
    k = int(rng.integers(1, len(pairs) + 1))
    chosen = rng.choice(len(pairs), size=k, replace=False)
    raw = rng.random(k) + 1e-3
    total = math.fsum(raw)
    return BidDistribution(bids, tuple((pairs[int(c)], float(w / total)) for c, w in zip(chosen, raw)))


def all_pairs_monotone(strategy, grid) -> bool:
    """Quadratic all-pairs monotonicity check (oracle for the neighbor scan)."""
    pts = grid.points
    for a in range(len(pts)):
        for b in range(len(pts)):
            if pts[b].dominates(pts[a]) and not strategy[b].dominates(strategy[a]):
                return False
    return True


def solve_one_object(levels, values, max_iter=100):
    """Independent solver for the symmetric two-bidder ONE-object
    first-price grid auction: alternating greatest-argmax best replies in
    exact rational arithmetic, with cycle detection and best-regret
    tracking. Returns (bid level indices per bidder, max regret).

    This is the benchmark for the decoupled two-object game: with zero
    synergy, each object's bidding problem is exactly this game.
    """
    m, size = len(values), len(levels)
    vals = [Fraction(v) for v in values]

    def q_table(opp):
        cnt = [0] * size
        for level in opp:
            cnt[level] += 1
        q, below = [], 0
        for level in range(size):
            q.append(Fraction(below, m) + Fraction(cnt[level], 2 * m))
            below += cnt[level]
        return q

    def best_reply(opp):
        q = q_table(opp)
        reply = []
        for v in vals:
            best, arg = None, 0
            for level in range(size):
                u = q[level] * (v - levels[level])
                if best is None or u > best:
                    best, arg = u, level
                elif u == best:
                    arg = level  # greatest element of the 1-d argmax
            reply.append(arg)
        return reply

    def max_regret(s1, s2):
        worst = Fraction(0)
        for own, opp in ((s1, s2), (s2, s1)):
            q = q_table(opp)
            for t, v in enumerate(vals):
                best = max(q[level] * (v - levels[level]) for level in range(size))
                worst = max(worst, best - q[own[t]] * (v - levels[own[t]]))
        return worst

    def nearest_to_half(v):
        half, best_level, best_dist = v / 2, 0, None
        for level, value in enumerate(levels):
            dist = abs(float(value) - half)
            if best_dist is None or dist < best_dist - 1e-15:
                best_level, best_dist = level, dist
        return best_level

    s1 = s2 = [nearest_to_half(v) for v in values]
    best_profile, best_r = (s1, s2), max_regret(s1, s2)
    seen = {(tuple(s1), tuple(s2)): 0}
    for it in range(1, max_iter + 1):
        n1 = best_reply(s2)
        n2 = best_reply(n1)
        if (n1, n2) == (s1, s2):
            return s1, s2, Fraction(0)
        s1, s2 = n1, n2
        r = max_regret(s1, s2)
        if r < best_r:
            best_profile, best_r = (s1, s2), r
        key = (tuple(s1), tuple(s2))
        if key in seen:
            break
        seen[key] = it
    return best_profile[0], best_profile[1], best_r
