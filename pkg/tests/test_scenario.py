"""Test scenario parsing and validation."""

from unittest import TestCase

from hamflow.scenarios.scenario import ScenarioMode, load_scenario, parse_scenario
from hamflow.tests.files import scenario_file, scenario_workspace
from hamflow.tools.errors import ScenarioError
from hamflow.tools.hamiltonians import FreeNonRelativistic, OpticsRay
from hamflow.tools.potentials import SumPotential

HARMONIC = """
mode = "canonical4d"
dt = 0.01
n_steps = 10

[model]
name = "free_nonrel"
potential = { kind = "harmonic", stiffness = 2.0 }

[initial]
position = [1.0, 0.0, 0.0]
"""


class ParseScenarioTestCase(TestCase):

    def assertScenarioError(self, text, *fragments):
        with self.assertRaises(ScenarioError) as cm:
            parse_scenario(text)
        joined = "\n".join(cm.exception.errors)
        for fragment in fragments:
            self.assertIn(fragment, joined)
        return cm.exception

    def test_defaults(self):
        scenario = parse_scenario(HARMONIC)
        self.assertEqual(scenario.mode, ScenarioMode.CANONICAL_4D)
        self.assertEqual(scenario.model.c, 1.0)
        self.assertEqual(scenario.model.hbar, 1.0)
        self.assertEqual(scenario.initial.momentum, (0.0, 0.0, 0.0))
        self.assertEqual(scenario.grid.n_points, 2048)
        model = scenario.model.build()
        self.assertIsInstance(model, FreeNonRelativistic)
        self.assertEqual(model.potential.stiffness, 2.0)

    def test_potential_list(self):
        scenario = parse_scenario(
            """
            mode = "reference3d"
            dt = 0.01
            n_steps = 10
            [initial]
            [[model.potential]]
            kind = "harmonic"
            [[model.potential]]
            kind = "sine"
            gradient = [1.0, 0.0, 0.0]
            omega = 2.0
            """
        )
        potential = scenario.model.build_potential()
        self.assertIsInstance(potential, SumPotential)
        self.assertEqual(len(potential.terms), 2)

    def test_optics(self):
        scenario = parse_scenario(
            """
            mode = "canonical4d"
            dt = 0.01
            n_steps = 10
            [model]
            name = "optics_ray"
            index = { kind = "linear_gradient", n0 = 1.5, alpha = 0.1 }
            [initial]
            momentum = [1.0, 0.0, 0.0]
            """
        )
        self.assertIsInstance(scenario.model.build(), OpticsRay)

    def test_bytes_input(self):
        self.assertEqual(parse_scenario(HARMONIC.encode("utf-8")).n_steps, 10)

    def test_syntax_error(self):
        error = self.assertScenarioError("mode = \ndt = 0.1", "syntax error", "line")
        self.assertEqual(len(error.errors), 1)

    def test_non_positive_dt(self):
        self.assertScenarioError(HARMONIC.replace("dt = 0.01", "dt = 0.0"), "dt: dt must be positive")

    def test_zero_steps(self):
        self.assertScenarioError(HARMONIC.replace("n_steps = 10", "n_steps = 0"), "n_steps")

    def test_unknown_model(self):
        self.assertScenarioError(HARMONIC.replace('"free_nonrel"', '"maxwell"'), "unknown model 'maxwell'")

    def test_unknown_key(self):
        self.assertScenarioError(HARMONIC + "\nspeed = 3\n", "speed")

    def test_gauge_needs_field(self):
        self.assertScenarioError(HARMONIC.replace('"canonical4d"', '"gauge4d"'), "field: required for mode gauge4d")

    def test_all_errors_reported(self):
        text = HARMONIC.replace('"canonical4d"', '"gauge4d"').replace("dt = 0.01", "dt = -1.0")
        error = self.assertScenarioError(text, "dt must be positive", "field: required")
        self.assertGreaterEqual(len(error.errors), 2)

    def test_quantum_needs_packet(self):
        self.assertScenarioError('mode = "quantum"\ndt = 0.01\nn_steps = 5\n', "packet: required for mode quantum")

    def test_quantum_needs_free_particle(self):
        self.assertScenarioError(
            'mode = "quantum"\ndt = 0.01\nn_steps = 5\n[packet]\n[model]\nname = "relativistic"\n',
            "mode quantum needs model 'free_nonrel'",
        )

    def test_optics_needs_index(self):
        text = HARMONIC.replace('potential = { kind = "harmonic", stiffness = 2.0 }\n', "").replace("free_nonrel", "optics_ray")
        self.assertScenarioError(text, "model.index")

    def test_non_finite_values(self):
        text = HARMONIC.replace("position = [1.0, 0.0, 0.0]", "position = [nan, 0.0, 0.0]")
        self.assertScenarioError(text, "initial.position.0", "finite")
        text = HARMONIC.replace('name = "free_nonrel"\n', 'name = "free_nonrel"\nmass = inf\n')
        self.assertScenarioError(text, "model.mass", "finite")
        self.assertScenarioError(HARMONIC.replace("dt = 0.01", "dt = inf"), "dt")

    def test_grid_bounds_ordered(self):
        text = HARMONIC + "\n[grid]\nx_min = 5.0\nx_max = -5.0\n"
        self.assertScenarioError(text, "grid: x_max (-5.0) must be greater than x_min (5.0)")

    def test_unknown_field_kind(self):
        text = HARMONIC.replace('"canonical4d"', '"gauge4d"') + '\n[field]\nkind = "dipole"\n'
        self.assertScenarioError(text, "field")

    def test_load(self):
        with scenario_workspace() as workspace:
            scenario = load_scenario(scenario_file(workspace, HARMONIC))
        self.assertEqual(scenario.dt, 0.01)
        with self.assertRaises(OSError):
            load_scenario("/nonexistent/scenario.toml")
