import math

import numpy as np
import pytest
from shapely.geometry import Point

from lgcp_duplicates.errors import (
    ConfigError,
    DataIOError,
    DegenerateSeedError,
    DomainError,
    InvalidPartitionError,
    OutOfDomainError,
    UnsupportedGeometryError,
)
from lgcp_duplicates.geometry import (
    PointPattern,
    Window,
    equivalent_diameter,
    find_duplicates,
    load_partition,
    locate,
    locate_many,
    make_dirichlet_tessellation,
    make_regular_grid,
    random_tessellation,
    read_pattern_csv,
    save_partition,
    write_pattern_csv,
)


class TestWindow:
    def test_degenerate_rectangle_rejected(self):
        """Test that a zero-width rectangle is a configuration error."""
        with pytest.raises(ConfigError):
            Window.rectangle(0.0, 0.0, 0.0, 1.0)

    def test_axis_aligned_polygon_becomes_rectangle(self):
        """Test that a square given as vertices is recognised as a rectangle."""
        window = Window.from_vertices([(0, 0), (0, 3), (2, 3), (2, 0)])
        assert window.is_rectangle
        assert window.bounds == (0.0, 2.0, 0.0, 3.0)
        assert window.area == pytest.approx(6.0)

    def test_l_shape_is_polygon(self, l_shape):
        assert not l_shape.is_rectangle
        assert l_shape.area == pytest.approx(3.0)

    def test_contains_is_boundary_inclusive(self, unit_square):
        mask = unit_square.contains(np.array([[0.0, 0.0], [1.0, 0.5], [1.0 + 1e-3, 0.5]]))
        assert mask.tolist() == [True, True, False]

    def test_polygon_contains(self, l_shape):
        mask = l_shape.contains(np.array([[0.5, 1.5], [1.5, 1.5], [1.0, 1.0]]))
        assert mask.tolist() == [True, False, True]


class TestPointPattern:
    def test_points_outside_window_rejected(self, unit_square):
        with pytest.raises(OutOfDomainError):
            PointPattern(points=np.array([[0.5, 0.5], [2.0, 0.5]]), window=unit_square)

    def test_non_finite_rejected(self, unit_square):
        with pytest.raises(ConfigError):
            PointPattern(points=np.array([[np.nan, 0.5]]), window=unit_square)

    def test_points_are_read_only_copy(self, unit_square):
        """Test that the pattern does not alias or expose a writable array."""
        raw = np.array([[0.1, 0.2], [0.3, 0.4]])
        pattern = PointPattern(points=raw, window=unit_square)
        raw[0, 0] = 0.9
        assert pattern.points[0, 0] == 0.1
        with pytest.raises(ValueError):
            pattern.points[0, 0] = 0.5

    def test_empty_pattern(self, unit_square):
        pattern = PointPattern.from_iterable([], unit_square)
        assert pattern.n == 0
        assert len(pattern) == 0


class TestFindDuplicates:
    def test_multiplicities_in_first_occurrence_order(self, unit_square):
        pattern = PointPattern.from_iterable(
            [(0.1, 0.1), (0.1, 0.1), (0.2, 0.2), (0.1, 0.1)], unit_square
        )
        groups = find_duplicates(pattern)
        assert groups.counts.tolist() == [3, 1]
        assert groups.labels.tolist() == [0, 0, 1, 0]
        assert groups.first_index.tolist() == [0, 2]
        assert groups.duplicated_mask().tolist() == [True, True, False, True]
        assert groups.n_points == 4
        assert groups.as_dict() == {(0.1, 0.1): 3, (0.2, 0.2): 1}

    def test_default_tolerance_merges_float_noise(self, square):
        pattern = PointPattern.from_iterable([(100.0, 100.0), (100.0 + 1e-10, 100.0)], square)
        assert find_duplicates(pattern).n_distinct == 1

    def test_zero_tolerance_is_exact(self, square):
        pattern = PointPattern.from_iterable([(100.0, 100.0), (100.0 + 1e-10, 100.0)], square)
        assert find_duplicates(pattern, tol=0.0).n_distinct == 2

    def test_negative_tolerance_rejected(self, unit_square):
        pattern = PointPattern.from_iterable([(0.5, 0.5)], unit_square)
        with pytest.raises(ConfigError):
            find_duplicates(pattern, tol=-1.0)

    def test_no_duplicates(self, csr_pattern):
        groups = find_duplicates(csr_pattern)
        assert not groups.has_duplicates
        assert groups.n_distinct == csr_pattern.n


class TestEquivalentDiameter:
    def test_circle_of_area_pi(self):
        assert equivalent_diameter(math.pi) == pytest.approx(2.0)

    def test_non_positive_area(self):
        with pytest.raises(DomainError):
            equivalent_diameter(0.0)


class TestRegularGrid:
    def test_grid_cells(self, square):
        partition = make_regular_grid(square, 18, 18)
        assert partition.n_cells == 324
        assert partition.mean_cell_area == pytest.approx(45.0**2)
        assert partition.snap_points[0].tolist() == [22.5, 22.5]
        assert partition.grid_index(19) == (1, 1)

    def test_locate_boundary_ties_go_to_lowest_index(self, square):
        partition = make_regular_grid(square, 18, 18)
        assert locate(partition, (0.0, 0.0)) == 0
        assert locate(partition, (45.0, 10.0)) == 0
        assert locate(partition, (45.1, 10.0)) == 1
        assert locate(partition, (810.0, 810.0)) == 323

    def test_locate_outside(self, square):
        partition = make_regular_grid(square, 2, 2)
        with pytest.raises(OutOfDomainError):
            locate(partition, (900.0, 10.0))

    def test_polygon_window_rejected(self, l_shape):
        with pytest.raises(UnsupportedGeometryError):
            make_regular_grid(l_shape, 2, 2)


class TestTessellation:
    def test_two_seeds_split_along_bisector(self, square):
        partition = make_dirichlet_tessellation(square, np.array([[205.0, 205.0], [605.0, 605.0]]))
        assert partition.n_cells == 2
        assert partition.areas.sum() == pytest.approx(square.area)
        assert partition.areas[0] == pytest.approx(square.area / 2, rel=1e-9)
        assert locate_many(partition, np.array([[100.0, 100.0], [700.0, 700.0]])).tolist() == [
            0,
            1,
        ]

    def test_duplicate_seeds_rejected(self, square):
        with pytest.raises(DegenerateSeedError):
            make_dirichlet_tessellation(square, np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_seed_outside_rejected(self, square):
        with pytest.raises(DegenerateSeedError):
            make_dirichlet_tessellation(square, np.array([[1.0, 1.0], [900.0, 1.0]]))

    def test_single_seed_is_whole_window(self, l_shape):
        partition = make_dirichlet_tessellation(l_shape, np.array([[0.5, 0.5]]))
        assert partition.n_cells == 1
        assert partition.areas[0] == pytest.approx(3.0)

    def test_random_tessellation_reproducible(self, square):
        a = random_tessellation(square, 50, seed=3)
        b = random_tessellation(square, 50, seed=3)
        assert a.n_cells == 50
        np.testing.assert_array_equal(a.areas, b.areas)
        assert a.areas.sum() == pytest.approx(square.area, rel=1e-6)

    def test_every_point_located_in_its_cell(self, square, csr_pattern):
        partition = random_tessellation(square, 30, seed=1)
        cells = locate_many(partition, csr_pattern.points)
        for (x, y), k in zip(csr_pattern.points[:50], cells[:50]):
            assert partition.cells[int(k)].distance(Point(x, y)) <= 1e-9


class TestPartitionDocuments:
    def _two_halves(self):
        return {
            "cells": [
                {"id": "west", "ring": [[0, 0], [1, 0], [1, 1], [0, 1]]},
                {"id": "east", "ring": [[1, 0], [2, 0], [2, 1], [1, 1]]},
            ]
        }

    def test_load_from_dict(self):
        partition = load_partition(self._two_halves())
        assert partition.ids == ("west", "east")
        assert partition.window.area == pytest.approx(2.0)
        assert locate(partition, (1.5, 0.5)) == 1

    def test_gap_rejected(self):
        doc = self._two_halves()
        doc["cells"][1]["ring"] = [[1.2, 0], [2, 0], [2, 1], [1.2, 1]]
        with pytest.raises(InvalidPartitionError):
            load_partition(doc, Window.rectangle(0, 2, 0, 1))

    def test_overlap_rejected(self):
        doc = self._two_halves()
        doc["cells"][1]["ring"] = [[0.5, 0], [2, 0], [2, 1], [0.5, 1]]
        with pytest.raises(InvalidPartitionError):
            load_partition(doc)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InvalidPartitionError):
            load_partition(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataIOError):
            load_partition(tmp_path / "missing.json")

    def test_saved_grid_reloads_with_same_cells(self, square, tmp_path):
        grid = make_regular_grid(square, 3, 3)
        path = tmp_path / "grid.json"
        save_partition(grid, path)
        again = load_partition(path, square)
        assert again.n_cells == 9
        np.testing.assert_allclose(again.areas, grid.areas)


class TestPatternCsv:
    def test_write_then_read(self, csr_pattern, tmp_path):
        path = tmp_path / "pattern.csv"
        write_pattern_csv(csr_pattern, path)
        assert path.read_text().splitlines()[0] == "x,y"
        again = read_pattern_csv(path, csr_pattern.window)
        np.testing.assert_array_equal(again.points, csr_pattern.points)

    def test_wrong_header(self, square, tmp_path):
        path = tmp_path / "pattern.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(DataIOError):
            read_pattern_csv(path, square)

    def test_points_outside_configured_window(self, unit_square, tmp_path):
        path = tmp_path / "pattern.csv"
        path.write_text("x,y\n5,5\n")
        with pytest.raises(OutOfDomainError):
            read_pattern_csv(path, unit_square)
