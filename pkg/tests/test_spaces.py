import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greedylab.analysis import VectorFamily, family_array
from greedylab.spaces import (
    MAX_DIM,
    DimensionError,
    IndexSet,
    NormModel,
    SignPattern,
    Vector,
    basis_constants,
    coordinate,
    coordinate_functional_norms,
    norm,
    parse_space,
    partial_sum,
    project,
    schauder_constant,
    sign_indicator,
)

CATALOG = ["lp:1", "lp:2", "lp:3", "lp:inf", "sup", "summing", "wl1:2,1", "wl1:0.5,3,1"]


def models(dim):
    return [parse_space(s, dim) for s in CATALOG]


# -- norm ------------------------------------------------------------------

def test_norm_examples():
    assert norm(NormModel.lp(2, 3), Vector([3, 4, 0])) == 5
    assert norm(NormModel.summing(3), Vector([1, -1, 1])) == 1
    assert norm(NormModel.weighted_l1([2, 1]), Vector([1, 1])) == 3


def test_norm_dimension_mismatch():
    with pytest.raises(DimensionError):
        norm(NormModel.lp(2, 3), Vector([1, 2]))


@pytest.mark.parametrize("space", CATALOG)
def test_norm_axioms_random(space):
    rng = np.random.default_rng(7)
    model = parse_space(space, 6)
    X = rng.standard_normal((1000, 6)) * rng.choice([0.01, 1, 100], size=(1000, 1))
    Y = rng.standard_normal((1000, 6))
    lam = rng.standard_normal(1000) * 10
    nx, ny = model.norms(X), model.norms(Y)
    np.testing.assert_allclose(model.norms(X * lam[:, None]), np.abs(lam) * nx, rtol=1e-12)
    assert np.all(model.norms(X + Y) <= nx + ny + 1e-12 * (1 + nx + ny))
    assert np.all(nx > 0)
    assert model.norms(np.zeros((1, 6)))[0] == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
       st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4))
def test_triangle_inequality_property(a, b):
    for model in models(4):
        x, y = np.array(a), np.array(b)
        assert model(x + y) <= model(x) + model(y) + 1e-9 * (1 + model(x) + model(y))


def test_custom_model_extension_point():
    model = NormModel.custom(lambda X: np.abs(X).sum(axis=-1) + np.abs(X).max(axis=-1), 3, name="l1+sup")
    assert model.id == "custom:l1+sup"
    assert model(np.array([1.0, -2.0, 0.0])) == 5.0
    assert not model.is_lattice
    assert model.dual_unit_norms() is None


# -- coordinates and projections --------------------------------------------

def test_coordinate_examples():
    x = Vector([3, -5, 1])
    assert coordinate(x, 2) == -5
    assert coordinate(x, 3) == 1
    assert coordinate(Vector.unit(1, 3), 1) == 1
    with pytest.raises(DimensionError):
        coordinate(x, 4)
    with pytest.raises(DimensionError):
        coordinate(x, 0)


def test_project_examples():
    x = Vector([3, -5, 1])
    assert project(x, IndexSet((1, 3))) == Vector([3, 0, 1])
    assert project(x, IndexSet()) == Vector.zeros(3)
    assert project(x, IndexSet.full(3)) == x


def test_partial_sum_examples():
    x = Vector([3, -5, 1])
    assert partial_sum(x, 2) == Vector([3, -5, 0])
    assert partial_sum(x, 0) == Vector.zeros(3)
    assert partial_sum(x, 3) == x


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=5, max_size=5), st.integers(0, 31))
def test_projection_identities(coeffs, mask):
    x = Vector(coeffs)
    A = IndexSet.from_mask(mask)
    Ac = IndexSet.full(5) - A
    assert project(project(x, A), A) == project(x, A)
    # P_A + P_{A^c} = identity, exactly (disjoint supports)
    assert project(x, A) + project(x, Ac) == x


def test_sign_indicator_examples():
    A = IndexSet((1, 3))
    assert sign_indicator(A, SignPattern.constant(A, 1), 4) == Vector([1, 0, 1, 0])
    B = IndexSet((2,))
    assert sign_indicator(B, SignPattern.from_sequence(B, [-1]), 3) == Vector([0, -1, 0])
    assert sign_indicator(IndexSet(), SignPattern({}), 3) == Vector.zeros(3)
    with pytest.raises(KeyError):
        sign_indicator(A, SignPattern.constant(IndexSet((1,))), 4)


def test_index_set_algebra():
    A, B = IndexSet((3, 1)), IndexSet((4, 5))
    assert A.indices == (1, 3)
    assert (A | B).indices == (1, 3, 4, 5)
    assert (A & IndexSet((3, 4))).indices == (3,)
    assert ((A | B) - A).indices == (4, 5)
    assert A.precedes(B) and not B.precedes(A)
    assert IndexSet().precedes(A)
    assert IndexSet.from_mask(A.mask) == A
    with pytest.raises(ValueError):
        IndexSet((0, 1))


def test_vector_validation():
    with pytest.raises(ValueError):
        Vector([1.0, math.nan])
    with pytest.raises(DimensionError):
        Vector(np.zeros(MAX_DIM + 1))
    assert Vector([0, 2, 0, -1]).support().indices == (2, 4)


# -- basis constants ---------------------------------------------------------

def test_basis_constants_examples():
    assert basis_constants(NormModel.lp(2, 4)) == (1.0, 1.0)
    assert basis_constants(NormModel.weighted_l1([2, 1])) == (0.5, 2.0)
    assert basis_constants(NormModel.summing(3)) == (1.0, 2.0)


@pytest.mark.parametrize("space", CATALOG)
def test_dual_norm_closed_forms_match_grid_oracle(space):
    # oracle: maximise |x_n| / ||x|| over a level grid, independent of the closed form
    model = parse_space(space, 4)
    X = family_array(VectorFamily.symmetric_grid((1, 2, 3)), 4)
    grid = coordinate_functional_norms(model, X)
    np.testing.assert_allclose(grid, model.dual_unit_norms(), rtol=1e-12)


@pytest.mark.parametrize("space", CATALOG)
def test_unit_and_dual_norms_within_c1_c2(space):
    model = parse_space(space, 5)
    c1, c2 = basis_constants(model)
    for vals in (model.unit_norms(), model.dual_unit_norms()):
        assert np.all(vals >= c1 - 1e-15) and np.all(vals <= c2 + 1e-15)


@pytest.mark.parametrize("space", ["lp:1", "lp:2", "lp:inf", "sup", "summing", "wl1:2,1"])
def test_schauder_constant_is_one_and_grid_agrees(space):
    model = parse_space(space, 5)
    X = family_array(VectorFamily.symmetric_grid((1, 2)), 5)
    kb = schauder_constant(model, X)
    assert kb.value == 1.0 and kb.exact
    assert kb.grid_value == pytest.approx(1.0, abs=1e-12)


def test_schauder_constant_custom_is_lower_bound():
    # ||x|| = max(|x_1 + x_2|, |x_2|); x = (2, -1) gives ||P_1 x|| / ||x|| = 2
    model = NormModel.custom(lambda X: np.maximum(np.abs(X[..., 0] + X[..., 1]), np.abs(X[..., 1])), 2)
    X = family_array(VectorFamily.symmetric_grid((1, 2)), 2)
    kb = schauder_constant(model, X)
    assert not kb.exact and kb.value == pytest.approx(2.0)


# -- convex hull of sign indicators ------------------------------------------

@pytest.mark.parametrize("space", ["lp:1", "lp:2", "lp:inf", "summing", "wl1:2,1"])
def test_convex_hull_of_sign_indicators(space):
    rng = np.random.default_rng(3)
    model = parse_space(space, 8)
    for _ in range(40):
        A = sorted(rng.choice(8, size=rng.integers(1, 9), replace=False))
        z = np.zeros(8)
        z[A] = rng.uniform(-1, 1, len(A))
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=len(A))))
        S = np.zeros((len(signs), 8))
        S[:, A] = signs
        assert model(z) <= model.norms(S).max() + 1e-9


# -- config strings -----------------------------------------------------------

def test_parse_space_catalog():
    assert parse_space("lp:2", 3).id == "lp:2"
    assert math.isinf(parse_space("lp:inf", 3).p)
    assert parse_space("sup", 2).kind == "sup"
    assert parse_space("summing", 2).kind == "summing"
    assert parse_space("wl1:2,1", 5).v == (2, 1, 2, 1, 2)


@pytest.mark.parametrize("bad", ["lp:zero", "lp:0.5", "wl1:", "wl1:1,-1", "l2", "sup:3", ""])
def test_parse_space_rejects(bad):
    with pytest.raises(ValueError):
        parse_space(bad, 3)
