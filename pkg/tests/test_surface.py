import numpy as np
import pytest

from epchiral.errors import EmptyRegion
from epchiral.spectra import NHDirac, SquareRoot
from epchiral.surface import constraint_loci, spectrum_grid


@pytest.mark.parametrize("model", [NHDirac(1.0), SquareRoot(-1j, 1j), SquareRoot(0.3, 1 + 1j)])
def test_grid_matches_eigvals(model):
    g = spectrum_grid(model, (-2, 2, -2, 2), 21, 17)
    rng = np.random.default_rng(0)
    for _ in range(20):
        i, j = rng.integers(0, 21), rng.integers(0, 17)
        ev = np.linalg.eigvals(model.hamiltonian(g.x[i], g.y[j]))
        p, m = g.e_plus[i, j], g.e_minus[i, j]
        err = min(abs(p - ev[0]) + abs(m - ev[1]), abs(p - ev[1]) + abs(m - ev[0]))
        assert err < 1e-9


def test_grid_rejects_degenerate():
    with pytest.raises(EmptyRegion):
        spectrum_grid(NHDirac(), nx=1, ny=50)
    with pytest.raises(EmptyRegion):
        constraint_loci(NHDirac(), (0, 0, -1, 1))


@pytest.mark.parametrize("n", [50, 64, 201, 333])
@pytest.mark.parametrize("b", [0.5, 1.0])
def test_dirac_loci_exact(n, b):
    loci = constraint_loci(NHDirac(b), nx=n, ny=n + 7)
    for c in loci.real:
        assert np.max(np.abs(c[:, 0] ** 2 + c[:, 1] ** 2 - b * b)) < 1e-9
    for c in loci.imag:
        assert np.max(np.abs(c[:, 0])) < 1e-12
    zs = [ep.z for ep in loci.intersections]
    assert len(zs) == 2
    assert abs(zs[0] + 1j * b) < 1e-6 and abs(zs[1] - 1j * b) < 1e-6


def test_square_root_loci_cross_at_branch_points():
    # Re (z^2 + 1) = 0 is a hyperbola, Im = 0 the two axes; they meet only at +-i
    loci = constraint_loci(SquareRoot(-1j, 1j))
    assert [ep.z for ep in loci.intersections] == pytest.approx([-1j, 1j], abs=1e-9)


def test_loci_csv():
    loci = constraint_loci(NHDirac(1.0), nx=40, ny=40)
    assert loci.csv_real().startswith("x,y,branch\n")
    assert loci.csv_intersections().splitlines()[1:] == ["0,-1,0", "0,1,0"]
