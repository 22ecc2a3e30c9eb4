import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigstream.core import (
    IncompatibleSignaturesError,
    InvalidAxesError,
    InvalidPathError,
    Path,
    TruncatedSignature,
    chen_product,
    multi_indices,
    shuffle,
    signature,
    signature_oracle,
    signed_area,
    term_count,
)


class TestPathValidation:
    def test_rejects_dimension_zero(self):
        with pytest.raises(InvalidPathError, match="dimension"):
            Path(np.empty((3, 0)))

    def test_rejects_single_point(self):
        with pytest.raises(InvalidPathError, match="2 points"):
            Path([[0.0, 0.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidPathError, match="finite"):
            Path([[0.0, 0.0], [np.nan, 1.0]])

    def test_signature_validates_through(self):
        with pytest.raises(InvalidPathError):
            signature([[0.0]], 2)


class TestTermCount:
    @pytest.mark.parametrize(
        "d,depth,expected", [(3, 2, 12), (3, 4, 120), (2, 3, 14), (1, 5, 5), (3, 3, 39)]
    )
    def test_known_counts(self, d, depth, expected):
        assert term_count(d, depth) == expected

    def test_matches_enumeration(self):
        for d in (1, 2, 3):
            for depth in (1, 2, 3):
                assert term_count(d, depth) == len(list(multi_indices(d, depth)))


class TestSignature:
    def test_straight_line_is_tensor_exponential(self):
        sig = signature([[0.0, 0.0], [1.0, 1.0]], 2)
        assert sig.get((1,)) == 1.0
        assert sig.get((2,)) == 1.0
        for index in ((1, 1), (1, 2), (2, 1), (2, 2)):
            assert sig.get(index) == pytest.approx(0.5, abs=1e-15)

    def test_constant_path_vanishes(self):
        sig = signature([[2.0, 3.0], [2.0, 3.0]], 4)
        assert sig.coefficients[0] == 1.0
        assert np.all(sig.coefficients[1:] == 0.0)

    def test_corner_path_frozen_values(self):
        # brute-force iterated integration over the two segments gives
        # S^(1,2)=1 (first coordinate moves before the second), S^(2,1)=0
        pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]
        sig = signature(pts, 2)
        assert sig.get((1, 2)) == pytest.approx(1.0, abs=1e-15)
        assert sig.get((2, 1)) == pytest.approx(0.0, abs=1e-15)
        assert signed_area(sig, 1, 2) == pytest.approx(0.5, abs=1e-15)
        assert signature_oracle(pts, (1, 2)) == pytest.approx(1.0, abs=1e-15)
        assert signature_oracle(pts, (2, 1)) == pytest.approx(0.0, abs=1e-15)

    def test_level_one_equals_total_increment(self, path_corpus):
        for pts in path_corpus[:50]:
            sig = signature(pts, 2)
            np.testing.assert_allclose(
                sig.level(1), pts[-1] - pts[0], rtol=0, atol=1e-12
            )

    def test_depth_cap(self):
        with pytest.raises(ValueError, match="hard cap"):
            signature([[0.0], [1.0]], 11)

    def test_bad_depth(self):
        with pytest.raises(ValueError, match="depth"):
            signature([[0.0], [1.0]], 0)


class TestChenProduct:
    def test_identity_is_neutral(self):
        sig = signature([[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]], 3)
        ident = TruncatedSignature.identity(2, 3)
        for product in (chen_product(sig, ident), chen_product(ident, sig)):
            np.testing.assert_array_equal(product.coefficients, sig.coefficients)

    def test_concatenation_at_every_split(self):
        pts = np.array([[1.0, 1.0], [2.0, 5.0], [3.0, 3.0], [4.0, -2.0], [5.0, 7.0]])
        whole = signature(pts, 4)
        for cut in range(1, len(pts) - 1):
            left = signature(pts[: cut + 1], 4)
            right = signature(pts[cut:], 4)
            np.testing.assert_allclose(
                chen_product(left, right).coefficients,
                whole.coefficients,
                rtol=0,
                atol=1e-10,
            )

    def test_reversal_cancels(self, path_corpus):
        for pts in path_corpus[:30]:
            path = Path(pts)
            round_trip = path.concat(path.reversed())
            sig = signature(round_trip, 3)
            ident = TruncatedSignature.identity(path.dimension, 3)
            np.testing.assert_allclose(
                sig.coefficients, ident.coefficients, rtol=0, atol=1e-10
            )

    def test_dimension_mismatch(self):
        a = signature([[0.0], [1.0]], 2)
        b = signature([[0.0, 0.0], [1.0, 1.0]], 2)
        with pytest.raises(IncompatibleSignaturesError):
            chen_product(a, b)

    def test_depth_mismatch(self):
        a = signature([[0.0], [1.0]], 2)
        b = signature([[0.0], [1.0]], 3)
        with pytest.raises(IncompatibleSignaturesError):
            chen_product(a, b)


class TestShuffle:
    def test_two_letters(self):
        assert shuffle((1,), (2,)).terms == [((1, 2), 1), ((2, 1), 1)]

    def test_repeated_letter(self):
        assert shuffle((1,), (1,)).terms == [((1, 1), 2)]

    def test_pair_with_single(self):
        assert shuffle((1, 2), (3,)).terms == [
            ((1, 2, 3), 1),
            ((1, 3, 2), 1),
            ((3, 1, 2), 1),
        ]

    @given(
        st.lists(st.integers(1, 3), min_size=1, max_size=4),
        st.lists(st.integers(1, 3), min_size=1, max_size=4),
    )
    def test_total_multiplicity_is_binomial(self, i, j):
        expansion = shuffle(tuple(i), tuple(j))
        assert expansion.total_multiplicity == math.comb(len(i) + len(j), len(i))
        assert all(len(k) == len(i) + len(j) for k, _ in expansion.terms)

    def test_shuffle_identity_on_random_paths(self, path_corpus):
        for pts in path_corpus[:20]:
            d = pts.shape[1]
            sig = signature(pts, 4)
            for a in range(1, 4):
                for b in range(1, 5 - a):
                    for i in itertools.product(range(1, d + 1), repeat=a):
                        for j in itertools.product(range(1, d + 1), repeat=b):
                            product = sig.get(i) * sig.get(j)
                            expanded = shuffle(i, j).evaluate(sig)
                            assert abs(product - expanded) <= 1e-9 * max(
                                1.0, abs(product)
                            )


class TestSignedArea:
    def test_single_segment_is_zero(self):
        sig = signature([[0.0, 0.0], [3.0, 7.0]], 2)
        assert signed_area(sig, 1, 2) == pytest.approx(0.0, abs=1e-15)

    def test_unit_square_loop(self):
        loop = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]
        sig = signature(loop, 2)
        assert signed_area(sig, 1, 2) == pytest.approx(1.0, abs=1e-14)

    def test_antisymmetry(self):
        sig = signature([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], 2)
        assert signed_area(sig, 1, 2) == -signed_area(sig, 2, 1)

    def test_equal_axes_rejected(self):
        sig = signature([[0.0, 0.0], [1.0, 1.0]], 2)
        with pytest.raises(InvalidAxesError):
            signed_area(sig, 1, 1)

    def test_axis_out_of_range(self):
        sig = signature([[0.0, 0.0], [1.0, 1.0]], 2)
        with pytest.raises(InvalidAxesError):
            signed_area(sig, 1, 3)

    def test_needs_depth_two(self):
        sig = signature([[0.0, 0.0], [1.0, 1.0]], 1)
        with pytest.raises(InvalidAxesError):
            signed_area(sig, 1, 2)


class TestOracle:
    def test_straight_line(self):
        assert signature_oracle([[0.0, 0.0], [1.0, 1.0]], (1, 2)) == pytest.approx(
            0.5, abs=1e-15
        )

    def test_single_letter_is_increment(self, path_corpus):
        for pts in path_corpus[:30]:
            for axis in range(1, pts.shape[1] + 1):
                value = signature_oracle(pts, (axis,))
                assert value == pytest.approx(
                    pts[-1, axis - 1] - pts[0, axis - 1], abs=1e-12
                )

    def test_matches_signature_on_small_corpus(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            pts = rng.uniform(-0.5, 0.5, size=(10, 3))
            sig = signature(pts, 4)
            for index, value in sig.items():
                assert abs(value - signature_oracle(pts, index)) <= 1e-9


class TestInvariants:
    def test_reparametrization_invariance(self, path_corpus):
        rng = np.random.default_rng(5)
        for pts in path_corpus[:25]:
            seg = int(rng.integers(0, len(pts) - 1))
            frac = rng.uniform(0.1, 0.9)
            inserted = pts[seg] + frac * (pts[seg + 1] - pts[seg])
            refined = np.insert(pts, seg + 1, inserted, axis=0)
            for depth in range(1, 6):
                np.testing.assert_allclose(
                    signature(refined, depth).coefficients,
                    signature(pts, depth).coefficients,
                    rtol=0,
                    atol=1e-12,
                )

    def test_scaling_covariance(self, path_corpus):
        for pts in path_corpus[:20]:
            lam = 1.7
            direct = signature(pts * lam, 3)
            predicted = signature(pts, 3).scale_covariant(lam)
            np.testing.assert_allclose(
                direct.coefficients, predicted.coefficients, rtol=1e-12, atol=1e-12
            )


class TestTruncatedSignature:
    def test_constant_term_enforced(self):
        with pytest.raises(ValueError, match="constant term"):
            TruncatedSignature(2, 1, np.array([0.5, 1.0, 2.0]))

    def test_coefficient_count_enforced(self):
        with pytest.raises(ValueError, match="expected"):
            TruncatedSignature(2, 2, np.array([1.0, 2.0]))

    def test_items_order_matches_enumeration(self):
        sig = signature([[0.0, 0.0], [1.0, 2.0], [3.0, 1.0]], 3)
        listed = [index for index, _ in sig.items()]
        assert listed == list(multi_indices(2, 3))

    def test_get_matches_items(self):
        sig = signature([[0.0, 0.0, 0.0], [1.0, 2.0, -1.0], [0.5, 0.5, 2.0]], 3)
        for index, value in sig.items():
            assert sig.get(index) == value
