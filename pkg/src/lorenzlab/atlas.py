"""Parameter-space atlas and certificate-producing analyses.

Classifies a model into the bifurcation strata cut out by the homoclinic loci
(a cusp on one of the discontinuities) and the heteroclinic loci (a cusp on a
branch fixed point), assigns the dynamical verdict of the corresponding
theorem, and produces machine-checkable evidence: coverage certificates from
the segment-iteration engine, forward-invariant trapping intervals, Markov
crossing certificates for the orientation-preserving (fake) horseshoe, and
attractor leaf spans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import Arc, ArcUnion, arc_contains, circle_dist, dist_ccw, norm1
from .errors import (
    ArcBudgetExceeded,
    LambdaBelowPhi,
    NoFixedPoints,
    NotMarkov,
    NoTrappingInterval,
    PreconditionError,
)
from .maps import PHI, SNAP, MapModel, fixed_points

# stratum labels
O_MM = "O--"
O_PM = "O+-"
O_MP = "O-+"
O_PP_LPLUS = "O++_Lplus"
O_PP_LMINUS = "O++_Lminus"
O_PP_TILDE = "O++_tilde"
H1P, H1M, H2P, H2M = "H1+", "H1-", "H2+", "H2-"
H12P, H12M = "H12+", "H12-"
HE1, HE2, HE1_AND_HE2 = "HE1", "HE2", "HE1andHE2"
DEGENERATE = "Degenerate"

STRATA = (O_MM, O_PM, O_MP, O_PP_LPLUS, O_PP_LMINUS, O_PP_TILDE,
          H1P, H1M, H2P, H2M, H12P, H12M, HE1, HE2, HE1_AND_HE2, DEGENERATE)

# dynamics labels
TWO_SIDED = "TwoSided"
UP_LORENZ = "UpLorenzPlusFakeHorseshoe"
DOWN_LORENZ = "DownLorenzPlusFakeHorseshoe"
FAT_LORENZ = "FatLorenz"
COLLISION = "CollisionBoundary"
DOUBLE_FULL = "DoubleFullLorenz"

STRATUM_DYNAMICS = {
    O_MM: TWO_SIDED, O_PM: TWO_SIDED, O_MP: TWO_SIDED, O_PP_TILDE: TWO_SIDED,
    O_PP_LPLUS: UP_LORENZ, O_PP_LMINUS: DOWN_LORENZ,
    H1P: TWO_SIDED, H1M: TWO_SIDED, H2P: TWO_SIDED, H2M: TWO_SIDED,
    H12P: FAT_LORENZ, H12M: FAT_LORENZ,
    HE1: COLLISION, HE2: COLLISION, HE1_AND_HE2: DOUBLE_FULL,
    DEGENERATE: DOUBLE_FULL,
}


@dataclass
class RegionVerdict:
    stratum: str
    margin: float
    dynamics: str
    p1: float | None = None
    p2: float | None = None
    sigma_plus: Arc | None = None
    sigma_minus: Arc | None = None


def classify(model: MapModel, tol: float = SNAP) -> RegionVerdict:
    """Stratum label, dynamical verdict, and margin to the nearest stratum.

    Homoclinic strata are detected first (cusp within tol of a discontinuity),
    then the fixed points decide the quadrant; in the doubly-fixed quadrant
    the heteroclinic loci are checked and the cusps are located relative to
    the two components cut out by the fixed points.
    """
    c = model.c_minus
    d1p, d1m = circle_dist(model.q1, 0.0), circle_dist(model.q1, c)
    d2p, d2m = circle_dist(model.q2, 0.0), circle_dist(model.q2, c)
    h_dists = [d1p, d1m, d2p, d2m]
    on1 = min(d1p, d1m) <= tol
    on2 = min(d2p, d2m) <= tol

    if on1 or on2:
        margin = min(h_dists)
        if on1 and on2:
            if d1p <= tol and d2p <= tol:
                stratum = H12P
            elif d1m <= tol and d2m <= tol:
                stratum = H12M
            else:
                # mixed double loop: inside H1 off the same-side codim-2 loci,
                # so the single-loop two-sided verdict applies
                stratum = H1P if d1p <= tol else H1M
        elif on1:
            stratum = H1P if d1p <= tol else H1M
        else:
            stratum = H2P if d2p <= tol else H2M
        return RegionVerdict(stratum, margin, STRATUM_DYNAMICS[stratum])

    fp = fixed_points(model)
    omega1 = "+" if model.q1 > c else "-"
    omega2 = "+" if model.q2 < c else "-"

    if omega1 == "-" or omega2 == "-":
        stratum = {"--": O_MM, "+-": O_PM, "-+": O_MP}[omega1 + omega2]
        return RegionVerdict(stratum, min(h_dists), STRATUM_DYNAMICS[stratum],
                             p1=fp.p1, p2=fp.p2)

    he1_d = circle_dist(model.q1, fp.p2)
    he2_d = circle_dist(model.q2, fp.p1)
    margin = min(h_dists + [he1_d, he2_d])
    sp, sm = Arc(fp.p2, fp.p1), Arc(fp.p1, fp.p2)

    if he1_d <= tol and he2_d <= tol:
        symmetric = (model.params.theta1 == model.params.theta2
                     and abs(model.c_minus - 0.5) <= tol)
        stratum = DEGENERATE if symmetric else HE1_AND_HE2
    elif he1_d <= tol:
        stratum = HE1
    elif he2_d <= tol:
        stratum = HE2
    else:
        q1_plus = arc_contains(sp, model.q1)
        q2_plus = arc_contains(sp, model.q2)
        if q1_plus and q2_plus:
            stratum = O_PP_LPLUS
        elif not q1_plus and not q2_plus:
            stratum = O_PP_LMINUS
        else:
            stratum = O_PP_TILDE
    return RegionVerdict(stratum, margin, STRATUM_DYNAMICS[stratum],
                         p1=fp.p1, p2=fp.p2, sigma_plus=sp, sigma_minus=sm)


@dataclass
class SigmaComponents:
    sigma_plus: Arc
    sigma_minus: Arc


def sigma_components(model: MapModel) -> SigmaComponents:
    """The two components cut out of the circle by the fixed points; the plus
    component is the one through c+ = 0."""
    fp = fixed_points(model)
    if fp.p1 is None or fp.p2 is None:
        raise NoFixedPoints("both branch fixed points are required")
    return SigmaComponents(sigma_plus=Arc(fp.p2, fp.p1),
                           sigma_minus=Arc(fp.p1, fp.p2))


@dataclass(frozen=True)
class GoldenBound:
    lhs: float
    rhs: float
    holds: bool


def golden_bound(l_ab: float, l_bc: float, lam: float) -> GoldenBound:
    """max(lam*|ab|, lam^2*|bc|) >= (lam/phi)(|ab|+|bc|) whenever lam >= phi."""
    if lam < PHI - 1e-12:
        raise LambdaBelowPhi(f"lambda={lam} below the golden ratio")
    lhs = max(lam * l_ab, lam * lam * l_bc)
    rhs = (lam / PHI) * (l_ab + l_bc)
    return GoldenBound(lhs=lhs, rhs=rhs, holds=lhs >= rhs - 1e-12)


# --- segment-iteration engine ---------------------------------------------

ARC_BUDGET = 1_000_000


@dataclass
class CoverageCertificate:
    seed: Arc
    iterations_used: int
    covered_fraction: float
    missed_points: list[float]
    terminal_arcs: list[Arc]
    gap_arcs: list[Arc] = field(default_factory=list)
    history: list[float] = field(default_factory=list)


def _map_interval(model: MapModel, lo: float, hi: float) -> list[tuple[float, float]]:
    """Image of a linear sub-interval of one branch, as linear pieces.

    Endpoints are evaluated through the branch lift, so endpoints that sit on
    a discontinuity produce the correct one-sided cusp limits automatically.
    """
    branch = 1 if hi <= model.c_minus + 1e-15 else 2
    a = model.lift(branch, lo)
    b = model.lift(branch, hi)
    a_m, length = a % 1.0, b - a
    end = a_m + length
    if end <= 1.0:
        return [(a_m, end)]
    return [(a_m, 1.0), (0.0, end - 1.0)]


def _clip(pieces, confine) -> list[tuple[float, float]]:
    if confine is None:
        return pieces
    out = []
    for lo, hi in pieces:
        for clo, chi in confine:
            nlo, nhi = max(lo, clo), min(hi, chi)
            if nhi > nlo:
                out.append((nlo, nhi))
    return out


def iterate_segments(model: MapModel, seed: Arc, maxN: int, eps: float,
                     confine: Arc | None = None) -> CoverageCertificate:
    """Iterate a family of arcs branchwise and accumulate the covered union.

    Each step splits every arc at the two discontinuities, maps the pieces
    through the branch lifts, and merges the images into both the running
    family and the accumulated union.  Stops when the complement of the union
    has total length below eps, or after maxN steps.  Complement components
    shorter than eps are reported as isolated missed points.
    """
    union = ArcUnion()
    family = ArcUnion()
    union.add(seed)
    family.add(seed)
    confine_iv = None
    if confine is not None:
        cu = ArcUnion()
        cu.add(confine)
        confine_iv = cu.intervals()

    history = [union.total_length]
    iterations = 0
    c = model.c_minus
    for step in range(1, maxN + 1):
        pieces = []
        for lo, hi in family.intervals():
            splits = [lo] + [p for p in (c,) if lo < p < hi] + [hi]
            for a, b in zip(splits, splits[1:]):
                pieces.extend(_map_interval(model, a, b))
        pieces = _clip(pieces, confine_iv)
        if len(pieces) > ARC_BUDGET:
            raise ArcBudgetExceeded(f"{len(pieces)} arcs at step {step}")
        family = ArcUnion()
        family.add_many([Arc(lo, hi if hi < 1.0 else 0.0) for lo, hi in pieces])
        union.add_many([Arc(lo, hi if hi < 1.0 else 0.0) for lo, hi in pieces])
        history.append(union.total_length)
        iterations = step
        if 1.0 - union.total_length < eps:
            break

    gaps = union.gaps()
    missed = [g.midpoint() for g in gaps if g.length < eps]
    # a discontinuity is a permanent puncture iff both cusps sit on it: it
    # then has no interior preimage and no image arc ever crosses it
    for d in (0.0, c):
        if (circle_dist(model.q1, d) <= SNAP and circle_dist(model.q2, d) <= SNAP
                and all(circle_dist(m, d) > SNAP for m in missed)):
            missed.append(d)
    terminal = [Arc(lo, hi if hi < 1.0 else 0.0) for lo, hi in family.intervals()]
    return CoverageCertificate(
        seed=seed, iterations_used=iterations,
        covered_fraction=union.total_length,
        missed_points=missed, terminal_arcs=terminal,
        gap_arcs=gaps, history=history)


# --- trapping and horseshoe certificates ----------------------------------

@dataclass
class TrappingCertificate:
    l1: float
    l2: float
    R_L: Arc
    invariance_margin: float


def _clearance(model: MapModel, region: Arc, samples: int = 10_000) -> float:
    """Sampled clearance of f(region minus the contained discontinuity) inside
    region: min over samples of the distance from the image to both ends."""
    xs = region.start + np.linspace(0.0, region.length, samples)
    xs = np.mod(xs, 1.0)
    keep = (np.minimum(np.abs(xs), np.abs(xs - 1.0)) > 1e-12)
    keep &= np.abs(xs - model.c_minus) > 1e-12
    fx = model.f_np(xs[keep])
    da = np.mod(fx - region.start, 1.0)
    clear = np.minimum(da, region.length - da)
    inside = (da > 0) & (da < region.length)
    if not inside.all():
        return -1.0
    return float(clear.min())


def _ternary_max(fn, lo: float, hi: float, iters: int = 200) -> tuple[float, float]:
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) < fn(m2):
            lo = m1
        else:
            hi = m2
    mid = 0.5 * (lo + hi)
    return mid, fn(mid)


def trapping_interval(model: MapModel, verdict: RegionVerdict | None = None,
                      samples: int = 10_000) -> TrappingCertificate:
    """Forward-invariant leaf interval isolating the up/down Lorenz attractor.

    Two separating leaves are chosen, one between each cusp and the fixed
    point on its side; each leaf is placed by a ternary search maximizing its
    own clearance (the two clearances are independent), and the certificate is
    re-verified by sampling the map on the trapped region.
    """
    v = verdict if verdict is not None else classify(model)
    if v.stratum in (HE1_AND_HE2, DEGENERATE):
        sc = sigma_components(model)
        return TrappingCertificate(l1=v.p1, l2=v.p2, R_L=sc.sigma_plus,
                                   invariance_margin=0.0)
    if v.dynamics not in (UP_LORENZ, DOWN_LORENZ):
        raise NoTrappingInterval(f"classification {v.stratum} is not L+/L-")
    p1, p2, q1, q2 = v.p1, v.p2, model.q1, model.q2

    if v.dynamics == UP_LORENZ:
        # R_L runs ccw from l2 (between p2 and q1) through 0 to l1 (between q2, p1)
        def m_l2(l2):
            return min(model.f(l2) - l2, q1 - l2)

        def m_l1(l1):
            return min(l1 - q2, l1 - model.f(l1))

        l2, _ = _ternary_max(m_l2, p2 + 1e-12, q1 - 1e-12)
        l1, _ = _ternary_max(m_l1, q2 + 1e-12, p1 - 1e-12)
        region = Arc(l2, l1)
    else:
        # R_L = (l1, l2) around c-, with l1 in (p1, q2) and l2 in (q1, p2)
        def m_l1(l1):
            return min(model.f(l1) - l1, q2 - l1)

        def m_l2(l2):
            return min(l2 - q1, l2 - model.f(l2))

        l1, _ = _ternary_max(m_l1, p1 + 1e-12, q2 - 1e-12)
        l2, _ = _ternary_max(m_l2, q1 + 1e-12, p2 - 1e-12)
        region = Arc(l1, l2)

    margin = _clearance(model, region, samples)
    if margin <= 0.0:
        raise NoTrappingInterval("no positively invariant interval found")
    return TrappingCertificate(l1=l1, l2=l2, R_L=region, invariance_margin=margin)


@dataclass
class HorseshoeCertificate:
    R_H: Arc
    I_A: Arc
    I_B: Arc
    crossing_margins: tuple[float, float]
    orientations: tuple[int, int]


def _arc_covers(outer: Arc, inner: Arc) -> float:
    """Smallest one-sided margin by which outer contains closure(inner), or a
    negative number when it fails."""
    left = dist_ccw(outer.start, inner.start)
    right = dist_ccw(inner.end, outer.end)
    if left + inner.length + right > outer.length + 1e-9:
        return -1.0
    return min(left, right)


def horseshoe_certificate(model: MapModel, R_H: Arc) -> HorseshoeCertificate:
    """Markov crossing certificate for the complementary strip.

    R_H must contain exactly one discontinuity; the two halves on either side
    of it must each map across the closed strip with positive margin, both
    preserving orientation (the fake-horseshoe signature), and the one-sided
    images of the contained discontinuity must escape the strip.
    """
    c = model.c_minus
    has_minus = arc_contains(R_H, c)
    has_plus = arc_contains(R_H, 0.0)
    if has_minus == has_plus:
        raise PreconditionError(
            "horseshoe strip must contain exactly one discontinuity")
    pivot = c if has_minus else 0.0

    # halves of R_H; the one inside branch 1 is I_A
    first = Arc(R_H.start, pivot)
    second = Arc(pivot, R_H.end)
    if has_minus:
        I_A, I_B = first, second
    else:
        I_B, I_A = first, second

    def image(piece: Arc, branch: int) -> Arc:
        # endpoints through the lift give the correct one-sided cusp limits
        s = piece.start
        e = piece.end if piece.end > s else 1.0
        return Arc(norm1(model.lift(branch, s)), norm1(model.lift(branch, e)))

    img_A = image(I_A, 1)
    img_B = image(I_B, 2)
    m_A = _arc_covers(img_A, R_H)
    m_B = _arc_covers(img_B, R_H)
    if m_A <= 0.0 or m_B <= 0.0:
        raise NotMarkov(f"crossing margins ({m_A:.3g}, {m_B:.3g}) not positive")

    # the pivot's one-sided images are the cusps; both must leave the strip
    closed = Arc(R_H.start, R_H.end)
    for q in (model.q1, model.q2):
        d = dist_ccw(closed.start, q)
        if -1e-12 <= d <= closed.length + 1e-12:
            raise NotMarkov("discontinuity image does not escape the strip")

    return HorseshoeCertificate(R_H=R_H, I_A=I_A, I_B=I_B,
                                crossing_margins=(m_A, m_B),
                                orientations=(1, 1))


# --- attractor span --------------------------------------------------------

@dataclass
class SpanResult:
    span: Arc
    full: bool
    length: float
    missed_points: list[float]
    certificate: CoverageCertificate
    verdict: RegionVerdict


def attractor_span(model: MapModel, side_hint: str | None = None,
                   maxN: int = 60, eps: float = 1e-3) -> SpanResult:
    """Smallest arc of stable leaves met by the attractor.

    Seeds a short arc at a cusp and runs the segment engine, confined to the
    trapping interval when the classification provides one; the span is the
    complement of the largest gap left in the accumulated union, and ``full``
    means every gap has shrunk below the engine resolution.
    """
    v = classify(model)
    confine = None
    if v.dynamics in (UP_LORENZ, DOWN_LORENZ):
        confine = trapping_interval(model, v).R_L
    elif v.dynamics == DOUBLE_FULL:
        confine = None  # both components invariant; seed side picks the piece

    seed_at = model.q2 if side_hint == "minus" else model.q1
    delta = 1e-3
    if confine is not None:
        # keep the seed inside the trapped region
        room = dist_ccw(seed_at, confine.end)
        delta = min(delta, room / 2) if room > 0 else delta
    seed = Arc(seed_at, norm1(seed_at + delta))

    cert = iterate_segments(model, seed, maxN=maxN, eps=eps, confine=confine)
    gap = max(cert.gap_arcs, key=lambda g: g.length, default=None)
    if gap is None or gap.length < eps:
        return SpanResult(span=Arc.full_circle(), full=True, length=1.0,
                          missed_points=cert.missed_points, certificate=cert,
                          verdict=v)
    span = Arc(gap.end, gap.start)
    return SpanResult(span=span, full=False, length=span.length,
                      missed_points=cert.missed_points, certificate=cert,
                      verdict=v)
