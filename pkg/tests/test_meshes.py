import numpy as np
import pytest

from disclab import Mesh, MeshError


def test_uniform():
    m = Mesh.uniform(0.0, 1.0, 10)
    assert m.n_elements == 10
    assert m.lo == 0.0 and m.hi == 1.0
    assert np.allclose(m.sizes, 0.1)


def test_geometric_toward_left():
    m = Mesh.geometric(0.0, 1.0, 64, ratio=0.85, toward="left")
    sizes = m.sizes
    # smallest element sits at the graded end, sizes grow away from it
    assert sizes[0] == m.h_min
    assert np.all(np.diff(sizes) > 0)
    assert np.allclose(sizes[1:] / sizes[:-1], 1 / 0.85)
    assert m.hi == 1.0


def test_geometric_toward_right_mirrors():
    left = Mesh.geometric(0.0, 1.0, 32, toward="left")
    right = Mesh.geometric(0.0, 1.0, 32, toward="right")
    assert np.allclose(left.sizes, right.sizes[::-1])


def test_double_graded_structure():
    m = Mesh.double_graded(0.0, 1.0, 512, ratio=0.9, h_min=1e-6)
    assert m.h_min == pytest.approx(1e-6)
    assert m.nodes[0] == 0.0 and m.nodes[-1] == 1.0
    # graded at both ends
    assert m.sizes[0] < 1e-5 and m.sizes[-1] < 1e-5


def test_log_graded_scales():
    m = Mesh.log_graded(0.0, 1.0, 256, s_min=1e-20)
    assert m.nodes[1] == pytest.approx(1e-20)
    ratios = m.nodes[2:-1] / m.nodes[1:-2]
    assert np.allclose(ratios, ratios[0])


def test_refine_is_nested_and_halves():
    m = Mesh.double_graded(0.0, 1.0, 128, h_min=1e-4)
    r = m.refine()
    assert r.n_elements == 2 * m.n_elements
    assert np.all(np.isin(m.nodes, r.nodes))
    assert r.h_max == pytest.approx(m.h_max / 2)


@pytest.mark.parametrize("call", [
    lambda: Mesh.uniform(1.0, 0.0, 4),
    lambda: Mesh.geometric(0.0, 1.0, 16, ratio=0.4),
    lambda: Mesh.geometric(0.0, 1.0, 16, ratio=1.1),
    lambda: Mesh.geometric(0.0, 1.0, 16, toward="up"),
    lambda: Mesh.double_graded(0.0, 1.0, 16, h_min=1e-9),
    lambda: Mesh.log_graded(0.0, 1.0, 16, s_min=0.9),
    lambda: Mesh(np.array([0.0, 0.5, 0.5, 1.0])),
])
def test_invalid_meshes_rejected(call):
    with pytest.raises(MeshError):
        call()
