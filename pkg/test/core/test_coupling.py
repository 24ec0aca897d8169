import unittest

import numpy as np
from hypothesis import given, strategies as st

from cutfsci.core.coupling import (FREE, InterfaceParams, LinearForm, case_indicator, case_labels,
                                   extend_fluid_scalar, extension_sources, find_partners, normal_gap, slip_length,
                                   tangential_factors)
from cutfsci.core.cutcell import SIDE_DRY, SIDE_FS, SIDE_SC
from cutfsci.core.fluid import FluidParams, fluid_penalty, fluid_penalty_scale
from cutfsci.core.mesh import InterfaceMesh
from cutfsci.exception import ConfigurationError, ExtensionError


def facing_interface():
    """A downward-facing segment of body 2 at y = 0.1 above x in [0, 1]."""
    return InterfaceMesh(start=np.array([[1.0, 0.1]]), end=np.array([[0.0, 0.1]]), edges=np.array([7]),
                         bodies=np.array([2]), normals=np.array([[0.0, -1.0]]))


class TestGap(unittest.TestCase):

    def test_gap_along_the_normal(self):
        result = normal_gap([0.25, 0.0], [0.0, 1.0], facing_interface(), body=1)
        self.assertTrue(result.valid)
        self.assertAlmostEqual(result.gap, 0.1)
        np.testing.assert_allclose(result.point, [0.25, 0.1])
        self.assertAlmostEqual(result.param, 0.75)

    def test_penetration_gives_a_negative_gap(self):
        result = normal_gap([0.5, 0.15], [0.0, 1.0], facing_interface(), body=1)
        self.assertAlmostEqual(result.gap, -0.05)

    def test_no_projection(self):
        interface = facing_interface()
        self.assertFalse(normal_gap([2.0, 0.0], [0.0, 1.0], interface, body=1).valid)
        self.assertFalse(normal_gap([0.5, 0.0], [0.0, -1.0], interface, body=1).valid)
        own = normal_gap([0.5, 0.0], [0.0, 1.0], interface, body=2)
        self.assertFalse(own.valid)
        self.assertEqual(own.gap, np.inf)
        self.assertEqual(own.segment, -1)

    def test_closest_facing_segment_wins(self):
        interface = InterfaceMesh(start=np.array([[1.0, 0.3], [1.0, 0.2]]), end=np.array([[0.0, 0.3], [0.0, 0.2]]),
                                  edges=np.array([0, 1]), bodies=np.array([2, 3]),
                                  normals=np.array([[0.0, -1.0], [0.0, -1.0]]))
        segment, s, _ = find_partners([[0.5, 0.0]], [[0.0, 1.0]], [1], interface)
        self.assertEqual(segment[0], 1)
        self.assertAlmostEqual(s[0], 0.2)


class TestSlipLaw(unittest.TestCase):

    def test_values(self):
        h, kappa0 = 0.1, 0.5
        kappa = slip_length([2 * h, h, h / 2, h / 10, 0.0, -h], h, kappa0)
        np.testing.assert_allclose(kappa[:4], [0.0, 0.0, kappa0 * h, 9 * kappa0 * h])
        self.assertEqual(kappa[4], np.inf)
        self.assertEqual(kappa[5], np.inf)
        self.assertEqual(slip_length(np.inf, h, kappa0), 0.0)
        with self.assertRaises(ConfigurationError):
            slip_length(0.1, 0.0, kappa0)

    @given(a=st.floats(1e-6, 1.0), b=st.floats(1e-6, 1.0))
    def test_monotone_in_the_gap(self, a, b):
        small, large = min(a, b), max(a, b)
        self.assertGreaterEqual(slip_length(small, 0.5, 0.1), slip_length(large, 0.5, 0.1))

    def test_tangential_factors_limits(self):
        h, gamma_t, mu = 0.1, 10.0, 0.5
        a, b = tangential_factors(np.array([0.0, np.inf, 0.2]), h, gamma_t, mu)
        np.testing.assert_allclose(a, [gamma_t / h, 0.0, 1.0 / (0.2 * mu + h / gamma_t)])
        np.testing.assert_allclose(b, [0.0, 1.0 / mu, 0.2 / (0.2 * mu + h / gamma_t)])

    @given(kappa=st.floats(0.0, 1e6))
    def test_tangential_factors_blend(self, kappa):
        h, gamma_t, mu = 0.1, 10.0, 0.5
        a, b = tangential_factors(np.array([kappa]), h, gamma_t, mu)
        self.assertAlmostEqual(float(mu * b[0] + h / gamma_t * a[0]), 1.0, places=9)


class TestCases(unittest.TestCase):

    def test_indicator_and_labels(self):
        indicator = case_indicator([1.0, -1.0, 0.0, 2.0], [0.0, 0.0, 0.0, 5.0], [True, True, True, False])
        np.testing.assert_allclose(indicator[:3], [1.0, -1.0, 0.0])
        self.assertEqual(indicator[3], np.inf)
        sides = np.array([SIDE_FS, SIDE_FS, SIDE_SC, SIDE_SC], dtype=object)
        labels = case_labels(sides, [1.0, 0.0, -1.0, np.inf])
        self.assertEqual(list(labels), ['I', 'III', 'II', 'IV'])
        self.assertEqual(list(case_labels(np.array([SIDE_DRY, SIDE_DRY], dtype=object), [0.5, -0.5])), [FREE, 'II'])

    def test_params(self):
        self.assertEqual(InterfaceParams(gamma_f0=20.0).gamma_t, 20.0)
        self.assertEqual(InterfaceParams(gamma_t0=4.0, gamma_t_scale=0.5).gamma_t, 2.0)
        for kwargs, key in (({'gamma_s0': 0.0}, 'interface.gamma_s0'), ({'tangential': 'stick'}, 'interface.tangential'),
                            ({'weighting': 'mean'}, 'interface.weighting'), ({'slip_length': -1.0},
                                                                             'interface.slip_length')):
            with self.assertRaises(ConfigurationError) as ctx:
                InterfaceParams(**kwargs)
            self.assertEqual(ctx.exception.key_path, key)

    def test_fluid_penalty(self):
        params = FluidParams(density=2.0, viscosity=0.5)
        np.testing.assert_allclose(fluid_penalty_scale(params, [0.0, 1.0], 0.1, None), [0.5, 0.7])
        np.testing.assert_allclose(fluid_penalty_scale(params, [0.0], 0.1, 0.01), [2.5])
        np.testing.assert_allclose(fluid_penalty(10.0, params, [0.0], 0.1, None), [50.0])
        with self.assertRaises(ConfigurationError):
            FluidParams(density=1.0, viscosity=0.0)


class TestExtension(unittest.TestCase):

    def test_nearest_source_along_a_closed_loop(self):
        arc = np.array([0.1, 0.5, 0.95, 0.35, 0.7])
        loops = np.zeros(5, dtype=int)
        lengths = np.ones(5)
        bodies = np.ones(5, dtype=int)
        is_source = np.array([True, True, False, False, False])
        needs = np.array([False, False, True, True, True])
        sources = extension_sources(arc, loops, lengths, bodies, is_source, needs)
        np.testing.assert_array_equal(sources, [-1, -1, 0, 1, 1])
        np.testing.assert_allclose(extend_fluid_scalar([4.0, 7.0, 0.0, 0.0, 0.0], sources), [0, 0, 4, 7, 7])

    def test_sources_stay_on_their_loop(self):
        arc = np.array([0.0, 0.1, 0.05])
        loops = np.array([0, 1, 1])
        sources = extension_sources(arc, loops, np.ones(3), np.array([1, 2, 2]), np.array([True, True, False]),
                                    np.array([False, False, True]))
        np.testing.assert_array_equal(sources, [-1, -1, 1])

    def test_body_without_fluid_interface(self):
        with self.assertRaises(ExtensionError) as ctx:
            extension_sources(np.array([0.0, 0.5]), np.array([0, 0]), np.ones(2), np.array([3, 3]),
                              np.array([False, False]), np.array([True, False]))
        self.assertEqual(ctx.exception.body, 3)


class TestLinearForm(unittest.TestCase):

    def test_take_and_scale(self):
        form = LinearForm([1.0, 2.0], [(np.array([[0], [1]]), np.array([[1.0], [1.0]]))])
        taken = form.take([1, -1]).scaled(np.array([2.0, 3.0]))
        np.testing.assert_allclose(taken.value, [4.0, 0.0])
        cols, d = taken.terms[0]
        np.testing.assert_array_equal(cols[:, 0], [1, 0])
        np.testing.assert_allclose(d[:, 0], [2.0, 0.0])
        difference = form - form
        np.testing.assert_allclose(difference.value, 0.0)
        self.assertEqual(len(difference.terms), 2)


if __name__ == '__main__':
    unittest.main()
