#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


from schrolab.grid import make_grid, Field
from schrolab.norms import lp_norm
from schrolab.cz import (Cube, decompose, verify_properties, coverage,
                         split_scales, scale_sums)
import numpy as np
import pytest


def heavy_field(grid, seed):
    rng = np.random.default_rng(seed)
    values = rng.lognormal(0.0, 1.5, grid.shape)
    return Field(grid, values*rng.choice([-1.0, 1.0], grid.shape))


@pytest.mark.parametrize('cells, spacing, scale', [
    (1, 1.0, -1), (2, 1.0, 0), (4, 1.0, 1), (8, 0.5, 1), (16, 0.25, 1),
])
def test_cube_scale(cells, spacing, scale):
    cube = Cube((0,), cells, spacing)
    assert cube.scale == scale
    assert 2.0**scale <= cube.radius < 2.0**(scale+1)


def test_single_spike():
    grid = make_grid(1, 16, 16.0)
    values = np.zeros(16)
    values[3] = 16.0
    f = Field(grid, values)
    result = decompose(f, 2.0)
    assert len(result.cubes) == 1
    cube = result.cubes[0]
    assert (cube.corner, cube.cells) == ((0,), 4)
    assert np.allclose(result.good.values[:4], 4.0)
    report = verify_properties(result, f)
    assert report.passed
    assert report.C_ii == pytest.approx(2.0)
    assert report.C_iv == pytest.approx(0.5)


@pytest.mark.parametrize('n, N, seed', [(1, 64, 1), (1, 256, 2),
                                        (2, 16, 3), (2, 32, 4)])
@pytest.mark.parametrize('height', [2.0, 4.0, 8.0])
def test_decomposition_properties(n, N, seed, height):
    grid = make_grid(n, N, float(N))
    f = heavy_field(grid, seed)
    result = decompose(f, height*lp_norm(f, 1)/grid.measure)
    report = verify_properties(result, f)
    assert report.passed, report.failures
    assert report.reconstruction <= 1e-12
    assert report.mean_defect <= 1e-12
    assert report.C_ii <= 2.0**n
    assert report.C_iv <= 1.0
    assert report.overlap <= 1
    assert report.overlap_9_8 >= report.overlap


def test_height_must_exceed_mean(line):
    f = Field(line, np.ones(line.shape))
    with pytest.raises(ValueError):
        decompose(f, 1.0)


def test_verify_reports_tampering():
    grid = make_grid(1, 64, 64.0)
    values = heavy_field(grid, 5).values
    values[10] = 1000.0
    f = Field(grid, values)
    result = decompose(f, 4.0*lp_norm(f, 1)/grid.measure)
    assert result.bad_parts
    result.bad_parts[0].values = result.bad_parts[0].values+1.0
    report = verify_properties(result, f)
    assert not report.passed
    assert any("reconstruction" in failure for failure in report.failures)


def test_coverage_of_dilates():
    grid = make_grid(1, 16, 16.0)
    cubes = [Cube((0,), 4, 1.0), Cube((4,), 4, 1.0)]
    assert coverage(grid, cubes).max() == 1
    assert coverage(grid, cubes, 9/8).max() == 1
    assert coverage(grid, cubes, 2.0).max() == 2


def test_scale_split(plane):
    f = heavy_field(plane, 6)
    result = decompose(f, 2.0*lp_norm(f, 1)/plane.measure)
    low, high = split_scales(result, 0)
    assert np.allclose(result.good.values+low.values+high.values, f.values)
    buckets = result.buckets()
    sums = scale_sums(result)
    assert set(sums) == set(buckets)
    total = sum(sums[k].values for k in sums)
    assert np.allclose(total, low.values+high.values)


def test_cube_table(tmp_path, plane):
    f = heavy_field(plane, 7)
    result = decompose(f, 2.0*lp_norm(f, 1)/plane.measure)
    path = tmp_path/'cubes.csv'
    result.write_csv(str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == 'scale,corner,side,mass'
    assert len(lines) == len(result.cubes)+1
