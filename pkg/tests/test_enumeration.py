import numpy as np
import pytest

from blockinfer.core import is_canonical
from blockinfer.enumeration import (
    count_structures,
    exact_count_lower_bound,
    iter_rgs,
    iter_structures,
    rgs_matrix,
    stirling2,
)


class TestRgs:
    def test_two_items(self):
        got = [r.copy().tolist() for r in iter_rgs(2, 2)]
        assert got == [[1, 1], [1, 2]]

    def test_cap_restricts_parts(self):
        got = [r.copy().tolist() for r in iter_rgs(3, 2)]
        assert got == [[1, 1, 1], [1, 1, 2], [1, 2, 1], [1, 2, 2]]

    def test_lexicographic_order(self):
        rows = rgs_matrix(4, 3)
        as_tuples = [tuple(r) for r in rows]
        assert as_tuples == sorted(as_tuples)

    def test_restartable(self):
        first = [r.copy().tolist() for r in iter_rgs(3, 3)]
        second = [r.copy().tolist() for r in iter_rgs(3, 3)]
        assert first == second

    def test_invalid_caps(self):
        with pytest.raises(ValueError):
            list(iter_rgs(2, 3))
        with pytest.raises(ValueError):
            list(iter_rgs(2, 0))


class TestIterStructures:
    def test_minimal_family(self):
        got = [g for g in iter_structures(2, 1, 2, 1)]
        assert len(got) == 2
        assert got[0].row_labels.tolist() == [1, 1]
        assert got[1].row_labels.tolist() == [1, 2]

    def test_product_count(self):
        assert sum(1 for _ in iter_structures(3, 3, 2, 2)) == 16

    def test_all_distinct_canonical(self):
        seen = set()
        for g in iter_structures(5, 5, 2, 2):
            assert is_canonical(g.row_labels) and is_canonical(g.col_labels)
            key = (g.row_labels.tobytes(), g.col_labels.tobytes())
            assert key not in seen
            seen.add(key)
        assert len(seen) == 256

    def test_row_varies_slowest(self):
        got = list(iter_structures(2, 2, 2, 2))
        rows = [g.row_labels.tolist() for g in got]
        assert rows == [[1, 1], [1, 1], [1, 2], [1, 2]]

    def test_stream_length_equals_count(self):
        for (n, p, K, H) in [(4, 3, 2, 2), (5, 4, 3, 2), (3, 3, 3, 3)]:
            assert sum(1 for _ in iter_structures(n, p, K, H)) == count_structures(n, p, K, H)

    def test_shards_partition_the_stream(self):
        whole = {(g.row_labels.tobytes(), g.col_labels.tobytes())
                 for g in iter_structures(5, 4, 2, 2)}
        sharded = set()
        for i in range(3):
            part = {(g.row_labels.tobytes(), g.col_labels.tobytes())
                    for g in iter_structures(5, 4, 2, 2, shard=(i, 3))}
            assert not (sharded & part)
            sharded |= part
        assert sharded == whole

    def test_shard_validation(self):
        with pytest.raises(ValueError):
            list(iter_structures(3, 3, 2, 2, shard=(3, 3)))


class TestCounts:
    def test_stirling_values(self):
        assert stirling2(3, 2) == 3
        assert stirling2(6, 2) == 31
        assert stirling2(5, 2) == 15

    def test_exact_blocks_product(self):
        assert count_structures(3, 3, 2, 2, exact_blocks=True) == 9
        assert count_structures(6, 5, 2, 2, exact_blocks=True) == 31 * 15

    def test_diagonal_is_singleton(self):
        assert count_structures(4, 3, 4, 3, exact_blocks=True) == 1

    def test_exact_count_by_enumeration(self):
        for (n, p, K, H) in [(3, 3, 2, 2), (4, 3, 2, 2), (4, 4, 3, 2)]:
            by_enum = sum(
                1 for g in iter_structures(n, p, K, H)
                if g.n_row_clusters == K and g.n_col_clusters == H
            )
            assert by_enum == count_structures(n, p, K, H, exact_blocks=True)

    def test_lower_bound_examples(self):
        assert count_structures(3, 3, 2, 2, exact_blocks=True) >= exact_count_lower_bound(3, 3, 2, 2)
        assert count_structures(6, 5, 2, 2, exact_blocks=True) == 465
        assert exact_count_lower_bound(6, 5, 2, 2) == 128

    def test_lower_bound_grid(self):
        for n in range(2, 9):
            for K in range(2, n + 1):
                for p in range(2, 9):
                    for H in range(2, p + 1):
                        assert (count_structures(n, p, K, H, exact_blocks=True)
                                >= exact_count_lower_bound(n, p, K, H))
