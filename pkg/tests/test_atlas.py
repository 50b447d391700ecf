import numpy as np
import pytest

from lorenzlab import atlas
from lorenzlab.atlas import (
    STRATUM_DYNAMICS,
    attractor_span,
    classify,
    golden_bound,
    horseshoe_certificate,
    iterate_segments,
    sigma_components,
    trapping_interval,
)
from lorenzlab.circle import Arc, arc_contains, circle_dist
from lorenzlab.errors import LambdaBelowPhi, NoFixedPoints, NoTrappingInterval, PreconditionError
from lorenzlab.maps import PHI, ModelParams, build_model


def M(alpha, beta, **kw):
    return build_model(ModelParams(alpha=alpha, beta=beta, **kw))


M0 = M(0.6, 0.3)


# --- classification --------------------------------------------------------

CLASSIFY_CASES = [
    ((0.25, 0.75), atlas.O_MM, atlas.TWO_SIDED),
    ((0.25, 0.25), atlas.O_MP, atlas.TWO_SIDED),
    ((0.75, 0.75), atlas.O_PM, atlas.TWO_SIDED),
    ((0.6, 0.3), atlas.O_PP_TILDE, atlas.TWO_SIDED),
    ((0.707, 0.30), atlas.O_PP_LPLUS, atlas.UP_LORENZ),
    ((0.79, 0.20), atlas.O_PP_LMINUS, atlas.DOWN_LORENZ),
    ((0.75, 0.25), atlas.HE1_AND_HE2, atlas.DOUBLE_FULL),
    ((0.5, 0.5), atlas.H12M, atlas.FAT_LORENZ),
    ((0.0, 0.0), atlas.H12P, atlas.FAT_LORENZ),
    ((0.5, 0.3), atlas.H1M, atlas.TWO_SIDED),
    ((0.3, 0.5), atlas.H2M, atlas.TWO_SIDED),
    ((0.0, 0.3), atlas.H1P, atlas.TWO_SIDED),
]


@pytest.mark.parametrize("ab,stratum,dynamics", CLASSIFY_CASES)
def test_classify_cases(ab, stratum, dynamics):
    v = classify(M(*ab))
    assert v.stratum == stratum
    assert v.dynamics == dynamics


def test_classify_he1():
    # HE1 only: q1 = p2 with q2 off p1
    v = classify(M(0.78, 0.22))
    assert v.stratum == atlas.HE1
    assert v.dynamics == atlas.COLLISION


def test_classify_degenerate_symmetric():
    v = classify(M(0.6, 0.4, theta1=0.0, theta2=0.0))
    assert v.stratum == atlas.DEGENERATE


def test_verdict_table_consistency():
    # every cell's dynamics agrees with the stratum table; off-strata cells
    # with visible margin land in one of the three open-region verdicts
    n = 200
    open_dyn = {atlas.TWO_SIDED, atlas.UP_LORENZ, atlas.DOWN_LORENZ}
    for i in range(n):
        for j in range(n):
            a = (i + 0.5) / n
            b = (j + 0.5) / n
            v = classify(M(a, b))
            assert v.dynamics == STRATUM_DYNAMICS[v.stratum]
            if v.margin > 1e-6:
                assert v.dynamics in open_dyn


def test_sigma_components():
    sc = sigma_components(M0)
    assert sc.sigma_plus.start == pytest.approx(0.7, abs=1e-9)
    assert sc.sigma_plus.end == pytest.approx(0.42013510, abs=1e-6)
    assert arc_contains(sc.sigma_plus, 0.0) or sc.sigma_plus.start == 0.0
    assert arc_contains(sc.sigma_minus, 0.5)
    with pytest.raises(NoFixedPoints):
        sigma_components(M(0.3, 0.7))


def test_theorem_f_quadrants():
    # probes surrounding the double heteroclinic point (0.75, 0.25)
    assert classify(M(0.707, 0.30)).stratum == atlas.O_PP_LPLUS
    assert classify(M(0.79, 0.20)).stratum == atlas.O_PP_LMINUS
    assert classify(M(0.78, 0.24)).stratum == atlas.O_PP_TILDE
    assert classify(M(0.72, 0.26)).stratum == atlas.O_PP_TILDE


def test_double_loop_ray():
    # the paper's unfolding ray of the double loop at (0, 0): q1 enters the
    # second branch arc (alpha = -mu), q2 the first (beta = 0.9 mu); down
    # Lorenz for all small mu, and no up-Lorenz wedge near the origin
    for mu in (1e-2, 1e-3, 1e-4):
        v = classify(M((-mu) % 1.0, 0.9 * mu))
        assert v.stratum == atlas.O_PP_LMINUS
    for d1 in np.linspace(-1e-2, 1e-2, 21):
        for d2 in np.linspace(-1e-2, 1e-2, 21):
            v = classify(M(d1 % 1.0, d2 % 1.0))
            assert v.stratum != atlas.O_PP_LPLUS


# --- golden bound -----------------------------------------------------------

def test_golden_equality_case():
    g = golden_bound(1 / PHI, 1 / PHI ** 2, PHI)
    assert g.lhs == pytest.approx(1.0, abs=1e-9)
    assert g.rhs == pytest.approx(1.0, abs=1e-9)
    assert g.holds


def test_golden_examples():
    g = golden_bound(0.5, 0.5, 1.8)
    assert g.lhs == pytest.approx(1.62)
    assert g.rhs == pytest.approx(1.8 / PHI)
    assert g.holds
    g = golden_bound(1.0, 0.0, PHI)
    assert g.lhs == pytest.approx(PHI) and g.rhs == pytest.approx(1.0)
    with pytest.raises(LambdaBelowPhi):
        golden_bound(0.5, 0.5, 1.5)


def test_golden_random():
    rng = np.random.default_rng(12)
    l1 = rng.uniform(0, 1, 100_000)
    l2 = rng.uniform(0, 1, 100_000)
    lam = rng.uniform(PHI, 2.0, 100_000)
    lhs = np.maximum(lam * l1, lam ** 2 * l2)
    rhs = (lam / PHI) * (l1 + l2)
    assert np.all(lhs >= rhs - 1e-12)


# --- segment engine ----------------------------------------------------------

def test_engine_full_circle_seed():
    cert = iterate_segments(M0, Arc.full_circle(), maxN=5, eps=1e-9)
    assert cert.covered_fraction == pytest.approx(1.0, abs=1e-12)


def test_engine_straddle_split():
    cert = iterate_segments(M0, Arc(0.49, 0.51), maxN=1, eps=1e-12)
    arcs = sorted((a.start, a.end if a.end else 1.0) for a in cert.terminal_arcs)
    assert len(arcs) == 2
    # anchored at the two cusps q2 = 0.3 and q1 = 0.6
    assert arcs[0][0] == pytest.approx(0.3, abs=1e-12)
    assert arcs[1][1] == pytest.approx(0.6, abs=1e-12)


def test_engine_coverage_example():
    cert = iterate_segments(M(0.25, 0.75), Arc(0.2, 0.201), maxN=60, eps=1e-3)
    assert cert.covered_fraction >= 1 - 1e-3
    assert cert.iterations_used <= 60


def test_engine_monotone_history():
    cert = iterate_segments(M0, Arc(0.1, 0.101), maxN=40, eps=1e-6)
    hist = cert.history
    assert all(a <= b + 1e-15 for a, b in zip(hist, hist[1:]))


# --- trapping / horseshoe ----------------------------------------------------

def test_trapping_up_lorenz():
    m = M(0.707, 0.30)
    cert = trapping_interval(m)
    assert 0.70 < cert.l2 < 0.707
    assert 0.30 < cert.l1 < 0.3092
    assert cert.invariance_margin > 0
    assert arc_contains(cert.R_L, 0.0)


def test_trapping_down_lorenz():
    cert = trapping_interval(M(0.79, 0.20))
    assert cert.invariance_margin > 0
    assert arc_contains(cert.R_L, 0.5)


def test_trapping_rejects_tilde():
    with pytest.raises(NoTrappingInterval):
        trapping_interval(M0)


def test_trapping_boundary_at_double_heteroclinic():
    cert = trapping_interval(M(0.75, 0.25))
    assert cert.invariance_margin == 0.0
    assert cert.R_L.start == pytest.approx(0.75, abs=1e-9)
    assert cert.R_L.end == pytest.approx(0.25, abs=1e-9)


def test_horseshoe_certificate():
    m = M(0.707, 0.30)
    t = trapping_interval(m)
    cert = horseshoe_certificate(m, Arc(t.l1, t.l2))
    assert cert.crossing_margins[0] > 0 and cert.crossing_margins[1] > 0
    assert cert.orientations == (1, 1)
    # c- escapes: neither cusp in the closed strip
    for q in (m.q1, m.q2):
        assert not arc_contains(Arc(t.l1, t.l2), q)


def test_horseshoe_mirror_down_case():
    m = M(0.79, 0.20)
    t = trapping_interval(m)
    cert = horseshoe_certificate(m, Arc(t.l2, t.l1))
    assert cert.crossing_margins[0] > 0 and cert.crossing_margins[1] > 0
    assert arc_contains(cert.R_H, 0.0)


def test_horseshoe_rejects_both_discontinuities():
    with pytest.raises(PreconditionError):
        horseshoe_certificate(M(0.707, 0.30), Arc(0.9, 0.6))


# --- attractor span ----------------------------------------------------------

def test_span_up_lorenz():
    s = attractor_span(M(0.707, 0.30))
    assert not s.full
    assert s.span.start == pytest.approx(0.707, abs=1e-6)
    assert s.span.end == pytest.approx(0.30, abs=1e-6)
    assert s.length == pytest.approx(0.593, abs=1e-3)


def test_span_two_sided():
    s = attractor_span(M(0.25, 0.75))
    assert s.full and s.length == 1.0


def test_span_fat_lorenz():
    s = attractor_span(M(0.5, 0.5))
    assert s.full
    assert any(circle_dist(p, 0.5) < 1e-9 for p in s.missed_points)
