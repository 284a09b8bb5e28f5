import numpy as np
import pytest

import blockinfer as bi
from blockinfer.core import ShapeError, canonical_labels
from blockinfer._rng import gaussian_block, key_from_parts
from blockinfer.enumeration import iter_structures

from conftest import (
    block_sums_oracle,
    dense_projector_oracle,
    unfactored_residue_oracle,
)


def make_structure(rows, cols, K, H):
    return bi.BlockStructure(np.asarray(rows), np.asarray(cols), K, H)


def seeded_matrix(seed, n, p, scale=1.0):
    return scale * gaussian_block(key_from_parts(seed), n * p).reshape(n, p)


class TestVectorize:
    def test_column_major_index_map(self):
        A = bi.DataMatrix([[1.0, 2.0], [3.0, 4.0]])
        assert bi.vectorize(A).x.tolist() == [1.0, 3.0, 2.0, 4.0]

    def test_single_entry(self):
        assert bi.vectorize(bi.DataMatrix([[7.0]])).x.tolist() == [7.0]

    def test_round_trip(self):
        A = bi.DataMatrix(seeded_matrix(11, 3, 4))
        back = bi.devectorize(bi.vectorize(A))
        np.testing.assert_array_equal(back.values, A.values)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            bi.DataMatrix([[1.0, np.nan]])


class TestBlockStructure:
    def test_canonicalization(self):
        assert canonical_labels([2, 1, 2, 1]).tolist() == [1, 2, 1, 2]
        assert canonical_labels([3, 3, 1]).tolist() == [1, 1, 2]

    def test_rejects_non_canonical(self):
        with pytest.raises(ValueError):
            make_structure([2, 1], [1, 1], 2, 1)

    def test_rejects_cap_violation(self):
        with pytest.raises(ValueError):
            make_structure([1, 2, 3], [1], 2, 1)

    def test_equality_is_label_permutation_invariance(self):
        a = bi.BlockStructure.from_labels([2, 1, 2], [1, 1], 2, 2)
        b = bi.BlockStructure.from_labels([1, 2, 1], [2, 2], 2, 2)
        assert a == b

    def test_occupied_blocks(self):
        g = make_structure([1, 1, 2], [1, 1, 1], 3, 2)
        assert g.occupied_blocks == 2


class TestBlockSums:
    def test_all_ones_single_block(self):
        x = bi.vectorize(bi.DataMatrix(np.ones((2, 2))))
        bs = bi.block_sums(x, make_structure([1, 1], [1, 1], 1, 1))
        assert bs.sums[0, 0] == 4.0
        assert bs.counts[0, 0] == 4

    def test_split_rows(self):
        x = bi.DataVector(2, 2, [1.0, 3.0, 2.0, 4.0])
        bs = bi.block_sums(x, make_structure([1, 2], [1, 1], 2, 1))
        assert bs.sums[0, 0] == 3.0  # row 1: 1 + 2
        assert bs.sums[1, 0] == 7.0  # row 2: 3 + 4

    def test_matches_double_loop(self):
        A = seeded_matrix(5, 5, 5)
        x = bi.vectorize(bi.DataMatrix(A))
        g = bi.BlockStructure.from_labels([1, 2, 1, 2, 1], [1, 1, 2, 2, 1], 2, 2)
        bs = bi.block_sums(x, g)
        sums, counts = block_sums_oracle(A, g)
        np.testing.assert_allclose(bs.sums, sums, rtol=1e-14)
        np.testing.assert_array_equal(bs.counts, counts)

    def test_shape_mismatch(self):
        x = bi.DataVector(2, 2, [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ShapeError):
            bi.block_sums(x, make_structure([1, 2, 1], [1, 1], 2, 1))


class TestProjectedQuadratic:
    def test_single_block_closed_form(self):
        x = seeded_matrix(3, 3, 4).T.ravel()
        g = make_structure([1, 1, 1], [1, 1, 1, 1], 1, 1)
        expected = x @ x - x.sum() ** 2 / 12
        assert bi.projected_quadratic(x, x, g) == pytest.approx(expected, rel=1e-14)

    def test_constant_vector_in_mean_span(self):
        g = bi.BlockStructure.from_labels([1, 2, 1], [1, 2, 2], 2, 2)
        v = np.full(9, 3.7)
        assert bi.projected_quadratic(v, v, g) == pytest.approx(0.0, abs=1e-12)

    def test_matches_dense_oracle(self):
        E_cache = {}
        for rep in range(20):
            key = key_from_parts(100, rep)
            vals = gaussian_block(key, 40)
            v, w = vals[:16], vals[16:32]
            g = bi.BlockStructure.from_labels(
                (vals[32:36] > 0).astype(int) + 1, (vals[36:40] > 0).astype(int) + 1, 2, 2
            )
            if g not in E_cache:
                E_cache[g] = dense_projector_oracle(g)
            expected = v @ E_cache[g] @ w
            got = bi.projected_quadratic(v, w, g)
            assert got == pytest.approx(expected, abs=1e-10 * max(1.0, abs(expected)))

    def test_symmetry_and_bilinearity(self):
        key = key_from_parts(7)
        vals = gaussian_block(key, 27)
        v, w, q = vals[:9], vals[9:18], vals[18:27]
        g = bi.BlockStructure.from_labels([1, 2, 3], [1, 1, 2], 3, 2)
        assert bi.projected_quadratic(v, w, g) == pytest.approx(
            bi.projected_quadratic(w, v, g), rel=1e-12)
        lhs = bi.projected_quadratic(v, 2.5 * w + q, g)
        rhs = 2.5 * bi.projected_quadratic(v, w, g) + bi.projected_quadratic(v, q, g)
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestSquaredResidue:
    def test_constant_matrix_is_zero(self):
        x = bi.vectorize(bi.DataMatrix(np.full((3, 3), 2.5)))
        for g in iter_structures(3, 3, 2, 2):
            assert bi.squared_residue(x, g) == pytest.approx(0.0, abs=1e-14)

    def test_blockwise_constant_is_zero(self):
        x = bi.vectorize(bi.DataMatrix([[1.0, 1.0], [0.0, 0.0]]))
        g = make_structure([1, 2], [1, 1], 2, 1)
        assert bi.squared_residue(x, g) == pytest.approx(0.0, abs=1e-14)

    def test_matches_unfactored_oracle(self):
        A = seeded_matrix(21, 5, 5)
        x = bi.vectorize(bi.DataMatrix(A))
        g = bi.BlockStructure.from_labels([1, 1, 2, 2, 2], [1, 2, 1, 2, 1], 2, 2)
        assert bi.squared_residue(x, g) == pytest.approx(
            unfactored_residue_oracle(A, g), rel=1e-12)

    def test_nonnegative_everywhere(self):
        A = seeded_matrix(31, 4, 4)
        x = bi.vectorize(bi.DataMatrix(A))
        for g in iter_structures(4, 4, 2, 2):
            assert bi.squared_residue(x, g) >= 0.0


class TestBlockMeanMle:
    def test_recovers_planted_means(self):
        base = np.array([[0.0, 1.0], [1.0, 0.0]])
        g = bi.BlockStructure.from_labels([1, 1, 2, 2], [1, 2, 1, 2], 2, 2)
        A = base[g.row_labels - 1][:, g.col_labels - 1]
        bm = bi.block_mean_mle(bi.vectorize(bi.DataMatrix(A)), g)
        np.testing.assert_allclose(bm.means, base, atol=1e-15)

    def test_single_block_grand_mean(self):
        A = seeded_matrix(41, 3, 3)
        x = bi.vectorize(bi.DataMatrix(A))
        bm = bi.block_mean_mle(x, make_structure([1, 1, 1], [1, 1, 1], 1, 1))
        assert bm.means[0, 0] == pytest.approx(A.mean(), rel=1e-14)

    def test_maximizes_gaussian_log_likelihood(self):
        # log likelihood of (g, B) up to constants: -sum (x_ij - B_{g1 g2})^2
        A = seeded_matrix(51, 4, 4)
        x = bi.vectorize(bi.DataMatrix(A))
        g = bi.BlockStructure.from_labels([1, 2, 1, 2], [1, 1, 2, 2], 2, 2)
        bm = bi.block_mean_mle(x, g)

        def neg_sq_loss(B):
            fitted = B[g.row_labels - 1][:, g.col_labels - 1]
            return -((A - fitted) ** 2).sum()

        best = neg_sq_loss(bm.means)
        for rep in range(30):
            delta = gaussian_block(key_from_parts(52, rep), 4).reshape(2, 2) * 0.1
            assert neg_sq_loss(bm.means + delta) <= best + 1e-12


class TestMaterializeProjection:
    def test_one_by_one_single_block(self):
        g = make_structure([1], [1], 1, 1)
        np.testing.assert_array_equal(bi.materialize_projection(g), np.zeros((1, 1)))

    def test_symmetric_idempotent(self):
        for g in iter_structures(3, 3, 2, 2):
            E = bi.materialize_projection(g)
            assert np.abs(E - E.T).max() < 1e-12
            assert np.abs(E @ E - E).max() < 1e-12

    def test_rank_with_all_blocks_occupied(self):
        g = bi.BlockStructure.from_labels([1, 2, 1, 2], [1, 1, 2, 2], 2, 2)
        E = bi.materialize_projection(g)
        assert np.linalg.matrix_rank(E, tol=1e-10) == 16 - 4

    def test_rank_counts_occupied_blocks(self):
        # only 2 occupied blocks despite caps (3, 2)
        g = make_structure([1, 1, 2, 2], [1, 1, 1], 3, 2)
        E = bi.materialize_projection(g)
        assert np.linalg.matrix_rank(E, tol=1e-10) == 12 - 2

    def test_size_guard(self):
        g = bi.BlockStructure.from_labels(np.ones(25, dtype=int), np.ones(25, dtype=int), 1, 1)
        with pytest.raises(ValueError):
            bi.materialize_projection(g)


class TestDistinctStructuresDiffer:
    def test_blockwise_constant_witness(self):
        # a matrix constant on g's blocks with distinct values separates g
        # from any g' that is not a refinement; refinements separate the
        # other way around
        structures = list(iter_structures(3, 3, 2, 2))
        for i, g in enumerate(structures):
            for gp in structures[i + 1:]:
                witness = np.arange(1, g.occupied_blocks + 1, dtype=float).reshape(
                    g.n_row_clusters, g.n_col_clusters)
                A = witness[g.row_labels - 1][:, g.col_labels - 1]
                x = bi.vectorize(bi.DataMatrix(A))
                if abs(bi.squared_residue(x, g) - bi.squared_residue(x, gp)) > 1e-12:
                    continue
                witness = np.arange(1, gp.occupied_blocks + 1, dtype=float).reshape(
                    gp.n_row_clusters, gp.n_col_clusters)
                A = witness[gp.row_labels - 1][:, gp.col_labels - 1]
                x = bi.vectorize(bi.DataMatrix(A))
                assert abs(bi.squared_residue(x, g) - bi.squared_residue(x, gp)) > 1e-12


class TestCsvRoundTrip:
    def test_bit_exact(self, tmp_path):
        A = bi.DataMatrix(seeded_matrix(61, 4, 3, scale=0.1))
        path = tmp_path / "m.csv"
        bi.save_matrix_csv(path, A)
        back = bi.load_matrix_csv(path)
        np.testing.assert_array_equal(back.values, A.values)

    def test_single_row(self, tmp_path):
        A = bi.DataMatrix([[1.5, -2.25, 3.125]])
        path = tmp_path / "row.csv"
        bi.save_matrix_csv(path, A)
        assert bi.load_matrix_csv(path).values.shape == (1, 3)
