import json

import pytest

from src import blowup
from src.blowup import PlaneField
from src.deriv import DerivationType
from src.errors import InputError, PreconditionError
from src.ring import RingSpec


@pytest.fixture
def weighted():
    return PlaneField.diagonal(5, 1, 2)


def test_chart_lifts(weighted):
    c1, c2 = blowup.lift_to_charts(weighted)
    assert (str(c1.P), str(c1.Q)) == ("u", "v")
    assert (str(c2.P), str(c2.Q)) == ("4*u", "2*v")
    assert blowup.normal_form_tag(c1) == (1, 1)
    assert blowup.normal_form_tag(c2) == (1, 2)
    assert blowup.normal_form_tag(weighted) == (1, 2)


def test_tag_uses_swap_and_scaling():
    assert blowup.normal_form_tag(PlaneField.diagonal(5, 2, 1)) == (1, 2)
    assert blowup.normal_form_tag(PlaneField.diagonal(7, 3, 0)) == (1, 0)
    assert blowup.normal_form_tag(PlaneField.parse(3, "x+y", "y")) is None


def test_lifts_keep_the_type(weighted):
    assert blowup.lift_type_check(weighted).passed


def test_lift_needs_fixed_origin():
    with pytest.raises(PreconditionError):
        blowup.lift_to_charts(PlaneField.parse(3, "1", "0"))


def test_fixed_points():
    fp = blowup.fixed_points(PlaneField.diagonal(5, 1, 2))
    assert fp.origin_fixed and fp.isolated_at_origin and not fp.free
    assert fp.divisorial.is_one()
    line = blowup.fixed_points(PlaneField.parse(3, "x^2", "x*y"))
    assert not line.isolated_at_origin
    assert str(line.divisorial) == "x"
    free = blowup.fixed_points(PlaneField.parse(3, "1", "0"))
    assert free.free and not free.origin_fixed
    assert [r.name for r in free.to_report(3)][:2] == ["ideal", "origin_fixed"]
    # the zero at x = -1 is off the chart origin and is not searched for
    shifted = blowup.fixed_points(PlaneField.parse(3, "x+1", "y"))
    assert not shifted.origin_fixed and not shifted.isolated_at_origin and not shifted.free
    assert shifted.divisorial is None


def test_weighted_tree_cycles(weighted):
    tree = blowup.blowup_tree(weighted, 10)
    assert tree.dtype is DerivationType.MULTIPLICATIVE
    assert [n.depth for n in tree.cycles()] == [1]
    assert [n.chart_path for n in tree.cycles()] == [[2]]
    assert not tree.terminated
    assert len(tree.nodes()) == 5
    data = json.loads(tree.to_json())
    assert data["root"]["tag"] == "(1,2)"
    assert "cycle" in tree.to_text()


def test_euler_tree_terminates_in_char_two():
    tree = blowup.blowup_tree(PlaneField.diagonal(2, 1, 1), 10)
    assert tree.terminated
    assert max(n.depth for n in tree.nodes()) == 1
    assert tree.cycles() == []


def test_depth_limit_leaves_tree_open(weighted):
    tree = blowup.blowup_tree(weighted, 0)
    assert not tree.terminated
    assert tree.root.children == []
    assert tree.root.render() == ["root: (x)*d/dx + (2*y)*d/dy tag=(1,2) fixed"]


def test_tree_preconditions():
    with pytest.raises(PreconditionError):
        blowup.blowup_tree(PlaneField.parse(3, "x", "1"), 4)
    with pytest.raises(InputError):
        blowup.blowup_tree(PlaneField.diagonal(3, 1, 1), -1)


def test_plane_field_shape():
    spec = RingSpec.polynomial(3, ["x", "y", "z"])
    with pytest.raises(InputError):
        PlaneField(spec.pc, spec.var("x"), spec.var("y"))
    V = PlaneField.parse(5, "x+2*y", "3*x")
    assert V.linear_part.tolist() == [[1, 2], [3, 0]]
    assert V.diagonal_pair() is None
