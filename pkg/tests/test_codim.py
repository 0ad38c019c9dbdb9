import itertools
import random

import pytest

from nobeling.codim import (
    CODIM1,
    CODIM2,
    FULL,
    REFUSED,
    Box,
    VoxelSet,
    axis_line,
    bfs_component_count,
    classify,
    complement_components,
    complement_connected,
    complement_nonempty,
    octant_windows,
    read_voxels,
    slab,
    write_voxels,
)


def full_set(dim, r):
    return VoxelSet(dim, r, frozenset(itertools.product(range(r), repeat=dim)))


class TestNonempty:
    def test_fully_occupied(self):
        v = full_set(3, 4)
        assert not complement_nonempty(v, v.full_window())

    def test_empty_set(self):
        v = VoxelSet(3, 4)
        assert complement_nonempty(v, v.full_window())

    def test_slab(self):
        v = slab(3, 8)
        assert complement_nonempty(v, v.full_window())
        # the slab leaves 8^3 - 8^2 cells free
        assert (~v.mask()).sum() == 8**3 - 8**2

    def test_empty_window(self):
        v = VoxelSet(2, 4)
        with pytest.raises(ValueError):
            complement_nonempty(v, Box((1, 1), (1, 3)))

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone(self, seed):
        rng = random.Random(seed)
        v = VoxelSet(3, 4)
        w = Box((1, 0, 1), (3, 2, 4))
        prev = True
        cells = list(itertools.product(range(4), repeat=3))
        rng.shuffle(cells)
        for c in cells:
            v = v.with_cells([c])
            now = complement_nonempty(v, w)
            assert not (now and not prev)
            prev = now


class TestConnected:
    def test_empty_set(self):
        v = VoxelSet(3, 4)
        assert complement_connected(v, v.full_window())

    def test_slab_splits(self):
        v = slab(3, 8)
        assert not complement_connected(v, v.full_window())
        assert complement_components(v, v.full_window()) == 2

    def test_line_in_3d(self):
        v = axis_line(3, 8)
        free = ~v.mask()
        assert bfs_component_count(free) == 1
        assert complement_connected(v, v.full_window())

    def test_line_in_2d_splits(self):
        v = axis_line(2, 8)
        assert not complement_connected(v, v.full_window())

    def test_full_set_is_not_connected(self):
        v = full_set(2, 4)
        assert not complement_connected(v, v.full_window())

    @pytest.mark.parametrize("seed", range(25))
    @pytest.mark.parametrize("use_numba", [True, False])
    def test_union_find_matches_bfs(self, seed, use_numba):
        rng = random.Random(seed)
        dim = rng.choice([2, 3, 4])
        r = rng.choice([3, 4, 6]) if dim == 4 else rng.choice([4, 8, 12])
        density = rng.choice([0.2, 0.4, 0.55, 0.7])
        cells = [c for c in itertools.product(range(r), repeat=dim) if rng.random() < density]
        v = VoxelSet(dim, r, frozenset(cells))
        for w in octant_windows(dim, r):
            free = ~v.mask()[w.slices()]
            assert complement_components(v, w, use_numba) == bfs_component_count(free)

    def test_implies_nonempty(self):
        rng = random.Random(9)
        for _ in range(30):
            cells = [c for c in itertools.product(range(4), repeat=3) if rng.random() < 0.6]
            v = VoxelSet(3, 4, frozenset(cells))
            for w in octant_windows(3, 4):
                if complement_connected(v, w):
                    assert complement_nonempty(v, w)


class TestClassify:
    def test_empty(self):
        v = VoxelSet(4, 4)
        assert classify(v, octant_windows(4, 4)).verdict == CODIM2

    def test_slab(self):
        v = slab(3, 8)
        report = classify(v, octant_windows(3, 8))
        assert report.verdict == CODIM1
        full = report.windows[0]
        assert full[0] == v.full_window() and full[1] and not full[2]

    @pytest.mark.parametrize("r", [4, 8])
    def test_line_in_4d(self, r):
        assert classify(axis_line(4, r), octant_windows(4, r)).verdict == CODIM2

    def test_full(self):
        assert classify(full_set(2, 4), octant_windows(2, 4)).verdict == FULL

    def test_non_compact_refused(self):
        v = VoxelSet(3, 4, frozenset(), compact=False)
        assert classify(v, octant_windows(3, 4)).verdict == REFUSED


def test_file_round_trip(tmp_path):
    v = axis_line(3, 4)
    path = tmp_path / "line.jsonl"
    write_voxels(v, path)
    assert read_voxels(path) == v
    assert path.read_text().splitlines()[0] == '{"dim": 3, "resolution": 4}'
