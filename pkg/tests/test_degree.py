import math
import random

import pytest

from mapdeg import (
    Compose,
    Conj,
    DegreeParams,
    DimensionMismatch,
    InvalidBlend,
    Iterate,
    Perturb,
    Pow,
    ResolutionExceeded,
    Rot,
    Susp,
    degree,
    degree_quadrature,
    degree_winding,
    parse,
    sup_distance,
    symbolic_degree,
)
from mapdeg.degree import quadrature_raw, winding_raw

from test_expr import winding_oracle


class TestWinding:
    def test_pow3_is_nearly_exact(self):
        res = degree_winding(Pow(3))
        assert res.value == 3
        assert res.residual < 1e-9
        assert res.method == "winding"

    def test_identity_wraps_once(self):
        assert degree_winding(parse("(id 1)")).value == 1

    def test_conj_after_squaring(self):
        e = Compose(Conj(), Pow(2))
        res = degree_winding(e)
        assert res.value == -2
        assert res.value == symbolic_degree(Conj()) * symbolic_degree(Pow(2))
        assert winding_oracle(e) == -2

    def test_rejects_sphere_maps(self):
        with pytest.raises(DimensionMismatch):
            degree_winding(parse("(susp (pow 2))"))

    def test_fast_wrapping_map_is_inconclusive_not_wrong(self):
        with pytest.raises(ResolutionExceeded):
            degree_winding(Pow(5000), DegreeParams(max_resolution=2048))

    def test_high_degree_resolves_with_a_bigger_cap(self):
        res = degree_winding(Pow(5000), DegreeParams(max_resolution=1 << 17))
        assert res.value == 5000

    @pytest.mark.parametrize("offset", [0.0, 0.1, 1.0, 2.5])
    def test_invariant_under_sample_offset(self, offset):
        raw, _ = winding_raw(Compose(Pow(3), Rot(0.4)), 1024, offset)
        assert round(raw) == 3
        assert abs(raw - 3) < 1e-9


class TestQuadrature:
    def test_identity(self):
        res = degree_quadrature(parse("(id 2)"))
        assert res.value == 1
        assert res.residual < 0.05

    def test_antipode_reverses_orientation(self):
        assert degree_quadrature(parse("(antipode 2)")).value == -1

    def test_suspended_squaring_has_degree_two(self):
        # the base map every ball certificate in the experiment relies on
        res = degree_quadrature(parse("(susp (pow 2))"))
        assert res.value == 2

    def test_suspension_preserves_higher_degrees(self):
        assert degree_quadrature(parse("(susp (pow -3))")).value == -3

    def test_rejects_circle_maps(self):
        with pytest.raises(DimensionMismatch):
            degree_quadrature(Pow(2))


class TestDegreeDispatch:
    def test_symbolic_with_numeric_witness(self):
        res = degree(parse("(iterate 2 (susp (pow 2)))"))
        assert res.value == 4
        assert res.method == "symbolic"

    def test_blend_goes_numeric(self):
        e = parse("(blend 0.5 (pow 2) (perturb 9 0.3 (pow 2)))")
        res = degree(e)
        assert res.value == 2
        assert res.method == "winding"
        assert winding_oracle(e) == 2

    def test_blend_with_vanishing_denominator(self):
        e = parse("(blend 0.5 (pow 1) (compose (antipode 1) (pow 1)))")
        with pytest.raises(InvalidBlend):
            degree(e)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            DegreeParams(tolerance=0.7)
        with pytest.raises(ValueError):
            DegreeParams(initial_resolution=4)

    def test_multiplicativity_on_seeded_pairs(self):
        rng = random.Random(1729)

        def random_expr(depth):
            if depth == 0 or rng.random() < 0.5:
                r = rng.random()
                if r < 0.5:
                    return Pow(rng.randint(-4, 4))
                if r < 0.8:
                    return Rot(rng.uniform(0, 2 * math.pi))
                return Conj()
            return Compose(random_expr(depth - 1), random_expr(depth - 1))

        for _ in range(30):
            f, g = random_expr(2), random_expr(2)
            df = degree_winding(f).value
            dg = degree_winding(g).value
            assert degree_winding(Compose(f, g)).value == df * dg

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_iterate_law_on_the_circle(self, n):
        assert degree(Iterate(n, Pow(2))).value == 2**n

    def test_iterate_law_on_the_sphere(self):
        assert degree(Iterate(2, Susp(Pow(2)))).value == 4

    @pytest.mark.parametrize("seed", [0, 7, 123])
    def test_homotopy_invariance_under_perturbation(self, seed):
        assert degree(Perturb(seed, 0.9, Pow(2))).value == 2

    def test_homotopy_invariance_on_the_sphere(self):
        assert degree(Perturb(5, 0.8, Susp(Pow(2)))).value == 2

    def test_winding_accepts_stably(self):
        res = degree_winding(Perturb(21, 0.7, Pow(2)))
        raw, _ = winding_raw(Perturb(21, 0.7, Pow(2)), 2 * res.resolution)
        assert round(raw) == res.value

    def test_quadrature_accepts_stably(self):
        res = degree_quadrature(Susp(Pow(3)))
        raw = quadrature_raw(Susp(Pow(3)), 2 * res.resolution)
        assert round(raw) == res.value


class TestSupDistance:
    def test_distance_to_self_is_zero(self):
        f = parse("(pow 2)")
        assert sup_distance(f, f).sampled_max == 0.0

    def test_identity_versus_antipode(self):
        est = sup_distance(parse("(id 1)"), parse("(antipode 1)"))
        assert est.sampled_max == 2.0

    def test_perturbation_stays_inside_the_unit_ball(self):
        est = sup_distance(parse("(pow 2)"), parse("(perturb 5 0.4 (pow 2))"), 2048)
        assert est.sampled_max < 1.0

    def test_rigorous_bound_needs_lipschitz_constants(self):
        f, g = parse("(pow 2)"), parse("(perturb 5 0.4 (pow 2))")
        plain = sup_distance(f, g, 512)
        assert plain.rigorous is None
        bounded = sup_distance(f, g, 512, lipschitz=(2.0, 8.0))
        assert bounded.rigorous is not None
        assert bounded.rigorous >= bounded.sampled_max

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sup_distance(parse("(pow 2)"), parse("(susp (pow 2))"))
