import numpy as np
import pytest
from numpy.testing import assert_allclose

from eframe_core.errors import DimensionMismatchError, NotAFrameError
from eframe_core.frames import (
    EFrameSystem,
    NotAFrame,
    analysis,
    analyze_system,
    canonical_dual,
    dual_reconstruction_check,
    frame_operator,
    is_e_bessel,
    is_e_frame,
    lemma1_bessel_bound,
    optimal_frame_bounds,
    rayleigh_oracle,
    reconstruct,
    require_frame,
    synthesis,
)
from eframe_core.generators import gen_matrix, gen_random_frame, random_complex, seeded_rng
from eframe_core.hilbert import MatrixMap, VectorSequence
from eframe_core.models import DiagonalSpec, FrameBounds, RandomHSSpec

SQRT5 = np.sqrt(5.0)


def diag_system(e2, *lam):
    return EFrameSystem(e2, MatrixMap.diagonal(lam))


def test_synthesis_examples(e2):
    assert_allclose(synthesis(diag_system(e2, 1, 1), [1, 0]), [1, 0])
    assert_allclose(synthesis(diag_system(e2, 2, 3), [1, 1]), [2, 3])
    assert_allclose(synthesis(diag_system(e2, 2, 3), [0, 0]), [0, 0])


def test_analysis_examples(e2):
    assert_allclose(analysis(diag_system(e2, 1, 1), [1, 0]), [1, 0])
    assert_allclose(analysis(diag_system(e2, 2, 3), [1, 1]), [2, 3])
    assert_allclose(analysis(diag_system(e2, 2, 3), [0, 0]), [0, 0])


def test_analysis_conjugates_the_frame_vectors(e2):
    sys = EFrameSystem(VectorSequence(np.array([[1j, 0], [0, 1]])), MatrixMap.identity(2))
    # <e1, i e1> = -i
    assert_allclose(analysis(sys, [1, 0]), [-1j, 0])


def test_shape_errors(e2):
    sys = diag_system(e2, 2, 3)
    with pytest.raises(DimensionMismatchError):
        synthesis(sys, [1, 2, 3])
    with pytest.raises(DimensionMismatchError):
        analysis(sys, [1])


def test_frame_operator_examples(e2, upper):
    assert_allclose(frame_operator(diag_system(e2, 1, 1)), np.eye(2))
    assert_allclose(frame_operator(diag_system(e2, 2, 3)), np.diag([4, 9]))
    assert_allclose(frame_operator(EFrameSystem(e2, upper)), [[1, 1], [1, 2]])


def test_frame_operator_is_synthesis_after_analysis():
    rng = seeded_rng(3)
    seq = VectorSequence(random_complex(rng, (5, 3)))
    sys = EFrameSystem(seq, MatrixMap(random_complex(rng, (5, 5))))
    S = frame_operator(sys)
    for f in random_complex(rng, (10, 3)):
        assert_allclose(S @ f, synthesis(sys, analysis(sys, f)), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("lam, expected", [((1, 1), (1, 1)), ((2, 3), (4, 9))])
def test_optimal_bounds_diagonal(e2, lam, expected):
    b = optimal_frame_bounds(diag_system(e2, *lam))
    assert isinstance(b, FrameBounds)
    assert (b.lower, b.upper) == pytest.approx(expected)
    assert b.provenance == "optimal"


def test_optimal_bounds_upper_triangular(e2, upper):
    b = optimal_frame_bounds(EFrameSystem(e2, upper))
    assert b.lower == pytest.approx((3 - SQRT5) / 2, rel=1e-12)
    assert b.upper == pytest.approx((3 + SQRT5) / 2, rel=1e-12)


def test_not_a_frame_is_a_result(e2):
    sys = EFrameSystem(VectorSequence(np.array([[1, 0], [1, 0]])), MatrixMap.identity(2))
    b = optimal_frame_bounds(sys)
    assert isinstance(b, NotAFrame)
    assert b.upper == pytest.approx(2.0)
    with pytest.raises(NotAFrameError):
        require_frame(sys)


def test_is_e_frame(e2):
    sys = diag_system(e2, 2, 3)
    assert is_e_frame(sys, FrameBounds(lower=4, upper=9, provenance="optimal")).passed
    r = is_e_frame(sys, FrameBounds(lower=5, upper=9, provenance="optimal"))
    assert not r.passed
    assert r.failed == ["lower_excess"]
    assert is_e_frame(diag_system(e2, 1, 1), FrameBounds(lower=0.5, upper=2, provenance="optimal")).passed


def test_is_e_bessel(e2):
    sys = diag_system(e2, 2, 3)
    assert is_e_bessel(sys, 9.0).passed
    r = is_e_bessel(sys, 8.0)
    assert set(r.failed) == {"upper_excess", "synthesis_norm_excess"}


@pytest.mark.parametrize("vectors, upper", [
    (np.eye(2), 2.0),
    (np.zeros((2, 2)), 0.0),
    (np.diag([2.0, 3.0]), 13.0),
])
def test_lemma1_bessel_bound(vectors, upper):
    b = lemma1_bessel_bound(VectorSequence(vectors))
    assert b.lower is None
    assert b.upper == pytest.approx(upper)


def test_canonical_dual_examples(e2):
    assert_allclose(canonical_dual(diag_system(e2, 1, 1)).vectors, np.eye(2))
    assert_allclose(canonical_dual(diag_system(e2, 2, 3)).vectors, np.diag([0.5, 1 / 3]))


def test_canonical_dual_reconstructs_random_frame():
    seq = gen_random_frame(3, 5, seed=7)
    sys = EFrameSystem(seq, gen_matrix(DiagonalSpec(), 5, seed=7))
    dual = canonical_dual(sys)
    rng = seeded_rng(7)
    for f in random_complex(rng, (50, 3)):
        assert np.linalg.norm(f - reconstruct(sys, dual, f)) <= 1e-9 * np.linalg.norm(f)


def test_canonical_dual_needs_a_frame():
    sys = EFrameSystem(VectorSequence(np.array([[1, 0], [2, 0]])), MatrixMap.identity(2))
    with pytest.raises(NotAFrameError):
        canonical_dual(sys)


def test_dual_campaign():
    for trial in range(50):
        d = 1 + trial % 4
        n = d + trial % 3
        seq = gen_random_frame(d, n, seed=trial)
        sys = EFrameSystem(seq, gen_matrix(DiagonalSpec(), n, seed=trial))
        report = dual_reconstruction_check(sys, samples=20, seed=trial)
        assert report.passed, report.residuals


def test_rayleigh_oracle_agrees_with_eigensolver():
    for trial in range(50):
        d = 1 + trial % 4
        n = d + 2
        seq = gen_random_frame(d, n, seed=100 + trial)
        sys = EFrameSystem(seq, gen_matrix(RandomHSSpec(rho=0.9), n, seed=100 + trial))
        b = optimal_frame_bounds(sys)
        q_min, q_max = rayleigh_oracle(sys, samples=10_000, seed=trial)
        assert q_min == pytest.approx(b.lower, rel=1e-6)
        assert q_max == pytest.approx(b.upper, rel=1e-6)


def test_analyze_system_diagonal(e2):
    r = analyze_system(diag_system(e2, 2, 3))
    assert r.verifier == "optimal"
    assert r.passed, r.residuals
    assert (r.optimal.lower, r.optimal.upper) == pytest.approx((4, 9))
    assert r.predicted.upper == pytest.approx(2.0)   # lemma1 bound of {e1, e2}
    assert r.details["E_norm"] == pytest.approx(3.0)


def test_analyze_system_random():
    rng = seeded_rng(21)
    for _ in range(10):
        seq = VectorSequence(random_complex(rng, (6, 4)))
        sys = EFrameSystem(seq, MatrixMap(random_complex(rng, (6, 6))))
        r = analyze_system(sys, samples=20, seed=1)
        assert r.passed, r.failed
