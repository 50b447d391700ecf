"""The two-branch, degree-2, uniformly expanding circle map family.

The circle carries two marked points: c+ = 0 (image of the upper stable leaf)
and c- in (0, 1).  Branch 1 lives on the arc (0, c-), branch 2 on (c-, 1);
each branch wraps once around the circle, with one-sided limits pinching to a
single cusp value per branch: q1 = alpha for branch 1, q2 = beta for branch 2.
Branch profiles are a sinusoidal blend

    g_i(t) = t / L_i + (theta_i / 2 pi) sin(2 pi t / L_i),     t in [0, L_i],

so the slope is (1/L_i)(1 + theta_i cos(2 pi t / L_i)) >= (1 - theta_i)/L_i.
The default asymmetric choice theta1 = 0.15, theta2 = 0 keeps branch 2 affine
(closed-form fixed point p2 = 1 - beta when c- = 1/2) while preventing the
degenerate coincidence of the two heteroclinic loci that an all-affine family
exhibits.

Uniform expansion must exceed the golden ratio PHI; that bound powers every
segment-growth argument downstream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circle import circle_dist, dist_ccw, norm1
from .errors import (
    AtDiscontinuity,
    DegenerateArc,
    ExpansionTooWeak,
    OnStratum,
)

PHI = (1.0 + math.sqrt(5.0)) / 2.0

# Points within SNAP of a codimension-one locus are treated as sitting on it;
# keeps the classification and the signed-point automaton deterministic.
SNAP = 1e-9

ROOT_TOL = 1e-12
TWO_PI = 2.0 * math.pi

PLUS = 1
MINUS = -1


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    beta: float
    c_minus: float = 0.5
    theta1: float = 0.15
    theta2: float = 0.0
    lambda_min_required: float = PHI


@dataclass(frozen=True)
class SignedPoint:
    """A circle point with a one-sided marker (+1 right limit, -1 left)."""

    x: float
    side: int = PLUS


@dataclass(frozen=True)
class BranchProfile:
    """Monotone wrap profile g: [0, L] -> [0, 1] of one branch."""

    length: float
    theta: float

    def g(self, t: float) -> float:
        return t / self.length + (self.theta / TWO_PI) * math.sin(TWO_PI * t / self.length)

    def dg(self, t: float) -> float:
        return (1.0 + self.theta * math.cos(TWO_PI * t / self.length)) / self.length

    def g_np(self, t):
        return t / self.length + (self.theta / TWO_PI) * np.sin(TWO_PI * t / self.length)

    def dg_np(self, t):
        return (1.0 + self.theta * np.cos(TWO_PI * t / self.length)) / self.length

    @property
    def min_slope(self) -> float:
        return (1.0 - self.theta) / self.length

    @property
    def max_slope(self) -> float:
        return (1.0 + self.theta) / self.length


@dataclass(frozen=True)
class MapModel:
    """Built model with cached cusps, zero-preimages and slope bounds.

    a_star / b_star are the unique interior solutions of f = 0 on each branch
    (None when the cusp sits on c+, in which case the corresponding itinerary
    region degenerates).  Immutable; safe to share across sweep workers.
    """

    params: ModelParams
    c_minus: float
    q1: float
    q2: float
    profile1: BranchProfile
    profile2: BranchProfile
    a_star: float | None
    b_star: float | None
    lambda_min: float
    lambda_max: float

    # -- branch geometry ---------------------------------------------------

    def branch_of(self, x: float) -> int:
        return 1 if 0.0 <= x < self.c_minus else 2

    def lift(self, branch: int, x: float) -> float:
        """Lifted branch value: branch i maps onto [q_i, q_i + 1]."""
        if branch == 1:
            return self.q1 + self.profile1.g(x)
        return self.q2 + self.profile2.g(x - self.c_minus)

    def f(self, x: float) -> float:
        return norm1(self.lift(self.branch_of(x), x))

    def f_np(self, x):
        """Vectorized map; callers keep samples off the two discontinuities."""
        x = np.asarray(x, dtype=float)
        in1 = x < self.c_minus
        y1 = self.q1 + self.profile1.g_np(np.where(in1, x, 0.0))
        y2 = self.q2 + self.profile2.g_np(np.where(in1, 0.0, x - self.c_minus))
        return np.where(in1, y1, y2) % 1.0

    def deriv_np(self, x):
        x = np.asarray(x, dtype=float)
        in1 = x < self.c_minus
        d1 = self.profile1.dg_np(np.where(in1, x, 0.0))
        d2 = self.profile2.dg_np(np.where(in1, 0.0, x - self.c_minus))
        return np.where(in1, d1, d2)

    def on_discontinuity(self, x: float, tol: float = SNAP) -> float | None:
        """Return the discontinuity (0 or c-) that x sits on, if any."""
        if circle_dist(x, 0.0) <= tol:
            return 0.0
        if circle_dist(x, self.c_minus) <= tol:
            return self.c_minus
        return None


def _bisect_lift(model: MapModel, branch: int, target: float,
                 lo: float, hi: float) -> float:
    """Solve lift(branch, x) = target on [lo, hi]; the lift is increasing."""
    if target <= model.lift(branch, lo):
        return lo
    if target >= model.lift(branch, hi):
        return hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if hi - lo <= ROOT_TOL:
            break
        if model.lift(branch, mid) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def build_model(params: ModelParams) -> MapModel:
    """Validate parameters, cache cusp data, and bound the expansion rate."""
    c = params.c_minus
    if not (0.0 < c < 1.0):
        raise DegenerateArc(f"c_minus={c} must lie strictly inside (0, 1)")
    L1, L2 = c, 1.0 - c
    prof1 = BranchProfile(L1, params.theta1)
    prof2 = BranchProfile(L2, params.theta2)
    lambda_min = min(prof1.min_slope, prof2.min_slope)
    if lambda_min <= params.lambda_min_required:
        raise ExpansionTooWeak(
            f"minimal slope {lambda_min:.6f} <= required {params.lambda_min_required:.6f}")
    q1, q2 = norm1(params.alpha), norm1(params.beta)
    model = MapModel(
        params=params, c_minus=c, q1=q1, q2=q2,
        profile1=prof1, profile2=prof2,
        a_star=None, b_star=None,
        lambda_min=lambda_min,
        lambda_max=max(prof1.max_slope, prof2.max_slope),
    )
    # interior preimages of c+ = 0; absent exactly when the cusp sits on c+
    a_star = None
    if circle_dist(q1, 0.0) > SNAP:
        a_star = _bisect_lift(model, 1, 1.0, 0.0, L1)
    b_star = None
    if circle_dist(q2, 0.0) > SNAP:
        b_star = _bisect_lift(model, 2, 1.0, c, 1.0)
    object.__setattr__(model, "a_star", a_star)
    object.__setattr__(model, "b_star", b_star)
    return model


def eval_signed(model: MapModel, sp: SignedPoint) -> SignedPoint:
    """One step of the map on signed points.

    Interior points map to (f(x), side).  On the discontinuities the one-sided
    limits follow the automaton

        (c+, +) -> (q1, +)   (c+, -) -> (q2, -)
        (c-, +) -> (q2, +)   (c-, -) -> (q1, -),

    and sides are preserved everywhere (both branches preserve orientation).
    """
    x = norm1(sp.x)
    disc = model.on_discontinuity(x)
    if disc is None:
        return SignedPoint(model.f(x), sp.side)
    if disc == 0.0:
        return SignedPoint(model.q1 if sp.side == PLUS else model.q2, sp.side)
    return SignedPoint(model.q2 if sp.side == PLUS else model.q1, sp.side)


def derivative(model: MapModel, p: float) -> float:
    x = norm1(p)
    if circle_dist(x, 0.0) <= 1e-12 or circle_dist(x, model.c_minus) <= 1e-12:
        raise AtDiscontinuity(f"derivative undefined at x={x}")
    if x < model.c_minus:
        return model.profile1.dg(x)
    return model.profile2.dg(x - model.c_minus)


def inverse_branch(model: MapModel, branch: int, y: float) -> float | None:
    """Unique preimage of y in the open branch arc; None at the cusp value.

    The cusp value q_i is the shared limit of both branch endpoints, so it has
    no interior preimage.
    """
    y = norm1(y)
    q = model.q1 if branch == 1 else model.q2
    if circle_dist(y, q) <= ROOT_TOL:
        return None
    target = q + dist_ccw(q, y)
    if branch == 1:
        return _bisect_lift(model, 1, target, 0.0, model.c_minus)
    return _bisect_lift(model, 2, target, model.c_minus, 1.0)


@dataclass(frozen=True)
class FixedPoints:
    p1: float | None
    p2: float | None


def fixed_points(model: MapModel) -> FixedPoints:
    """Branch fixed points; p_i exists iff the cusp q_i lies in the other arc.

    Equivalent formulation on the lifted branches: the equation
    lift_1(x) = x + 1 brackets a root on [0, c-] iff alpha > c-, and
    lift_2(x) = x brackets one on [c-, 1] iff beta < c-.
    """
    c = model.c_minus
    for name, q in (("q1", model.q1), ("q2", model.q2)):
        if circle_dist(q, 0.0) <= SNAP or circle_dist(q, c) <= SNAP:
            raise OnStratum(f"{name}={q} sits on a homoclinic stratum")
    p1 = None
    if model.q1 > c:
        lo, hi = 0.0, c
        for _ in range(100):
            if hi - lo <= ROOT_TOL:
                break
            mid = 0.5 * (lo + hi)
            if model.lift(1, mid) - mid - 1.0 < 0.0:
                lo = mid
            else:
                hi = mid
        p1 = 0.5 * (lo + hi)
    p2 = None
    if model.q2 < c:
        lo, hi = c, 1.0
        for _ in range(100):
            if hi - lo <= ROOT_TOL:
                break
            mid = 0.5 * (lo + hi)
            if model.lift(2, mid) - mid < 0.0:
                lo = mid
            else:
                hi = mid
        p2 = 0.5 * (lo + hi)
    return FixedPoints(p1, p2)


@dataclass
class HypothesesReport:
    wrap_ok: bool
    monotone_ok: bool
    expansion_ok: bool
    pinch_ok: bool
    lambda_min: float
    lambda_required: float
    failures: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.wrap_ok and self.monotone_ok and self.expansion_ok and self.pinch_ok


def verify_hypotheses(model: MapModel, grid: int = 10_000) -> HypothesesReport:
    """Check the return-map hypotheses: single wrap per branch, strict
    monotonicity, expansion above the required rate, and the pinch identities
    at the two discontinuities."""
    failures = []

    wrap_ok = True
    for name, prof in (("branch1", model.profile1), ("branch2", model.profile2)):
        if abs(prof.g(0.0)) > 1e-10 or abs(prof.g(prof.length) - 1.0) > 1e-10:
            wrap_ok = False
            failures.append(f"{name} does not wrap exactly once")

    ts1 = np.linspace(0.0, model.profile1.length, grid)
    ts2 = np.linspace(0.0, model.profile2.length, grid)
    sampled_min = min(model.profile1.dg_np(ts1).min(), model.profile2.dg_np(ts2).min())
    analytic_min = min(model.profile1.min_slope, model.profile2.min_slope)
    monotone_ok = sampled_min > 0.0 and analytic_min > 0.0
    if not monotone_ok:
        failures.append("branch slope is not strictly positive")

    expansion_ok = model.lambda_min > model.params.lambda_min_required
    if not expansion_ok:
        failures.append(
            f"lambda_min={model.lambda_min:.6f} <= {model.params.lambda_min_required:.6f}")

    # one-sided limits at the endpoints of each branch arc pinch to the cusps
    pinch_pairs = [
        (model.lift(1, 0.0) % 1.0, model.q1),
        (model.lift(1, model.c_minus) % 1.0, model.q1),
        (model.lift(2, model.c_minus) % 1.0, model.q2),
        (model.lift(2, 1.0) % 1.0, model.q2),
    ]
    pinch_ok = all(circle_dist(a, b) <= 1e-10 for a, b in pinch_pairs)
    if not pinch_ok:
        failures.append("branch endpoint limits do not pinch to the cusp values")

    return HypothesesReport(
        wrap_ok=wrap_ok, monotone_ok=monotone_ok, expansion_ok=expansion_ok,
        pinch_ok=pinch_ok, lambda_min=model.lambda_min,
        lambda_required=model.params.lambda_min_required, failures=failures)


# --- singularity eigenvalue checks ---------------------------------------

@dataclass(frozen=True)
class EigenvalueTriple:
    lambda_ss: float
    lambda_s: float
    lambda_u: float


@dataclass
class SingularityReport:
    lorenz_like: bool
    inequality_chain: list
    resonances: list

    @property
    def non_resonant(self) -> bool:
        return not self.resonances


def check_singularity_conditions(eigs: EigenvalueTriple, N: int,
                                 tol: float = 1e-9) -> SingularityReport:
    """Lorenz-like ordering and non-resonance of a singularity spectrum.

    Lorenz-like: lambda_ss < lambda_s < 0 < -lambda_s < lambda_u < -lambda_ss.
    Non-resonance: no nonnegative integers (m1, m2, m3) with 2 <= sum(m) < N
    satisfy |sum_j m_j lambda_j - lambda_i| <= tol for any i.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    ls, lm, lu = eigs.lambda_ss, eigs.lambda_s, eigs.lambda_u
    chain = [
        ("lambda_ss < lambda_s", ls < lm),
        ("lambda_s < 0", lm < 0.0),
        ("0 < -lambda_s", 0.0 < -lm),
        ("-lambda_s < lambda_u", -lm < lu),
        ("lambda_u < -lambda_ss", lu < -ls),
    ]
    lorenz_like = all(ok for _, ok in chain)

    lam = (ls, lm, lu)
    resonances = []
    for m in itertools.product(range(N), repeat=3):
        s = sum(m)
        if not 2 <= s < N:
            continue
        value = m[0] * ls + m[1] * lm + m[2] * lu
        for i, li in enumerate(lam):
            if abs(value - li) <= tol:
                resonances.append((m, i, value))
    return SingularityReport(lorenz_like=lorenz_like,
                             inequality_chain=chain,
                             resonances=resonances)
