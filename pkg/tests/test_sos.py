"""
Tests for monomial bases, coefficient operators and the ellipsoid certification engine
"""
import numpy as np
import pytest

from src.constraints import QuadraticConstraintSet, build_rotmat_set
from src.sos import (
    EllipsoidBound,
    EllipsoidObjective,
    coefficient_operator,
    dump_lmi,
    gram_operator,
    lift_product,
    monomial_basis,
    placement_operator,
    shifted_form_operator,
    solve_min_volume_ellipsoid,
)
from src.sos.engine import _assemble, _check_flat
from src.harness import disk_constraint
from src.utils.config_loader import get_config
from src.utils.errors import InputError, NumericalSolveError, UnboundedSetError


def _random_sym(rng, n):
    m = rng.standard_normal((n, n))
    return 0.5 * (m + m.T)


class TestMonomialBasis:
    def test_two_variables_degree_two(self):
        basis = monomial_basis(2, 2)
        assert basis.dim == 3
        x = np.array([1.0, 0.7])
        assert np.allclose(basis.evaluate(x), [1.0, 0.7, 0.49])

    def test_degree_one_is_identity(self, rng):
        x = rng.standard_normal(5)
        assert np.allclose(monomial_basis(5, 1).evaluate(x), x)

    def test_dimension(self):
        assert monomial_basis(13, 2).dim == 91
        assert monomial_basis(8, 4).dim == 330

    def test_invalid(self):
        with pytest.raises(InputError):
            monomial_basis(0, 1)
        with pytest.raises(InputError):
            monomial_basis(3, -1)

    def test_index_of(self):
        basis = monomial_basis(3, 2)
        idx = basis.index_of(basis.exponents)
        assert list(idx) == list(range(basis.dim))
        with pytest.raises(InputError):
            basis.index_of(np.array([[3, 0, 0]]))


class TestOperators:
    def test_lift_product_block_placement(self, rng):
        multiplier = monomial_basis(2, 1)
        y = _random_sym(rng, 2)
        lifted = lift_product(multiplier, y, np.array([[1.0, 0.0], [0.0, 0.0]]))
        expected = np.zeros((3, 3))
        expected[:2, :2] = y
        assert np.allclose(lifted, expected)

    def test_lift_product_zero(self, rng):
        multiplier = monomial_basis(3, 1)
        assert np.allclose(lift_product(multiplier, _random_sym(rng, 3), np.zeros((3, 3))), 0.0)

    def test_lift_product_polynomial_identity(self, rng):
        n, kappa = 3, 1
        multiplier = monomial_basis(n, kappa)
        lifted_basis = monomial_basis(n, kappa + 1)
        a = _random_sym(rng, n)
        coeff = _random_sym(rng, multiplier.dim)
        lifted = lift_product(multiplier, a, coeff)
        worst = 0.0
        for _ in range(50):
            x = rng.standard_normal(n)
            lhs = lifted_basis.evaluate(x) @ lifted @ lifted_basis.evaluate(x)
            m = multiplier.evaluate(x)
            rhs = (m @ coeff @ m) * (x @ a @ x)
            worst = max(worst, abs(lhs - rhs))
        assert worst < 1e-9

    def test_coefficient_operator_matches_gram_of_placement(self, rng):
        n = 3
        multiplier = monomial_basis(n, 1)
        lifted = monomial_basis(n, 2)
        out = monomial_basis(n, 4)
        a = _random_sym(rng, n)
        direct = coefficient_operator(multiplier, a, out)
        composed = gram_operator(lifted, out) @ placement_operator(multiplier, a, lifted)
        assert np.allclose(direct.toarray(), composed.toarray())

    def test_shifted_form_operator(self, rng):
        n = 3
        out = monomial_basis(n, 4)
        w = _random_sym(rng, n)
        coef = shifted_form_operator(n, 2, out) @ w.reshape(-1, order="F")
        x = rng.standard_normal(n)
        assert coef @ out.evaluate(x) == pytest.approx(x[0] ** 2 * (x @ w @ x))

    def test_constraint_shape_checked(self):
        with pytest.raises(InputError):
            coefficient_operator(monomial_basis(3, 1), np.eye(2))


def _unit_ball(d=3):
    a = np.eye(d + 1)
    a[0, 0] = -1.0
    return QuadraticConstraintSet(dim=d + 1, inequalities=(a,))


class TestEngine:
    def test_single_constraint_is_exact(self):
        bound, certificate = solve_min_volume_ellipsoid(_unit_ball(), np.zeros(3), kappa=0)
        assert np.linalg.norm(bound.h - np.eye(3)) < 1e-5
        assert certificate.residual() < 1e-5

    def test_disk_is_its_own_ellipse(self):
        disk = QuadraticConstraintSet(dim=3, inequalities=(disk_constraint((0.2, 0.1), 0.5),))
        bound, _ = solve_min_volume_ellipsoid(disk, np.array([0.2, 0.1]), kappa=0)
        assert np.allclose(bound.h, 4.0 * np.eye(2), atol=1e-4)

    def test_higher_order_on_ball(self):
        bound, certificate = solve_min_volume_ellipsoid(_unit_ball(2), np.zeros(2), kappa=1)
        assert np.linalg.norm(bound.h - np.eye(2)) < 1e-4
        assert certificate.residual() < 1e-5

    def test_slab_is_unbounded(self):
        slab = QuadraticConstraintSet(dim=3, inequalities=(np.diag([-1.0, 1.0, 0.0]),))
        with pytest.raises(UnboundedSetError) as info:
            solve_min_volume_ellipsoid(slab, np.zeros(2), kappa=0)
        assert 1 in info.value.axes

    def test_chirality_only_is_not_certified(self, scene):
        full = build_rotmat_set(scene.obs)
        chirality_only = full.restricted(list(range(scene.obs.n)))
        center = np.concatenate([scene.ground_truth.rotation.vec, scene.ground_truth.translation])
        with pytest.raises(UnboundedSetError) as info:
            solve_min_volume_ellipsoid(chirality_only, center, kappa=0)
        assert info.value.axes
        assert "unbounded in some direction" in str(info.value)

    def test_flat_optimal_shape_is_unbounded(self):
        with pytest.raises(UnboundedSetError) as info:
            _check_flat(np.diag([2.0, 1e-14, -5e-6]), (0, 1, 2))
        assert info.value.axes == [1, 2]

    def test_flat_axes_map_to_target_coordinates(self):
        with pytest.raises(UnboundedSetError) as info:
            _check_flat(np.diag([0.0, 3.0]), (9, 11))
        assert info.value.axes == [9]
        _check_flat(np.diag([1e4, 1.0, 0.5]), (0, 1, 2))

    def test_residual_over_tolerance_is_numerical(self, monkeypatch):
        monkeypatch.setitem(get_config().config.setdefault("solver", {}), "certificate_tol", 1e-30)
        with pytest.raises(NumericalSolveError) as info:
            solve_min_volume_ellipsoid(_unit_ball(), np.zeros(3), kappa=0)
        assert info.value.status == "certificate"

    def test_subblock_zeroes_other_coordinates(self):
        bound, _ = solve_min_volume_ellipsoid(_unit_ball(), np.zeros(3), kappa=0,
                                              objective=EllipsoidObjective.subblock([0, 2]))
        assert np.all(bound.h[1, :] == 0.0)
        assert np.all(bound.h[:, 1] == 0.0)
        assert np.allclose(bound.h[np.ix_([0, 2], [0, 2])], np.eye(2), atol=1e-4)

    def test_input_checks(self):
        with pytest.raises(InputError):
            solve_min_volume_ellipsoid(_unit_ball(), np.zeros(2), kappa=0)
        with pytest.raises(InputError):
            solve_min_volume_ellipsoid(_unit_ball(), np.zeros(3), kappa=-1)

    def test_dump_lmi(self, tmp_path):
        lmi, _, _ = _assemble(_unit_ball(), 0, (0, 1, 2))
        path = dump_lmi(lmi, tmp_path / "ball.lmi")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# sos-lmi n=4 kappa=0")
        assert any(line.startswith("# block") for line in lines)
        data = [line for line in lines if not line.startswith("#")]
        assert data and all(len(line.split()) == 4 for line in data)


class TestEllipsoidBound:
    def test_contains_and_logdet(self):
        bound = EllipsoidBound(h=np.diag([1.0, 4.0]), center=np.array([1.0, 0.0]))
        assert bound.contains(np.array([2.0, 0.0]))
        assert not bound.contains(np.array([1.0, 0.6]))
        assert bound.logdet == pytest.approx(np.log(4.0))
        assert np.allclose(bound.value(np.array([[1.0, 0.0], [1.0, 0.5]])), [0.0, 1.0])

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            EllipsoidBound(h=np.eye(3), center=np.zeros(2))

    def test_singular_logdet(self):
        assert EllipsoidBound(h=np.diag([1.0, 0.0]), center=np.zeros(2)).logdet == float("-inf")
