"""
Created on 2026-10-15

@author: wf
"""
from histories.config import Settings, build_space, dump_space, load_config, save_config
from histories.errors import ConfigError, ValidationError
from histories.history import decoherence_report, iter_histories
from histories.models import partial_decoherence_model
from histories.operators import Tolerance
from histories.probability import absolute_measure
from tests.base_histories import BaseHistoriesTest


class TestConfig(BaseHistoriesTest):
    """
    test the settings and the yaml model configs
    """

    def test_settings_defaults(self):
        settings = Settings.load(self.temp_path("missing.yaml"))
        self.assertEqual(Settings(), settings)
        self.assertEqual(Tolerance(1e-10, 1e-8), settings.tolerance())
        self.assertEqual(Tolerance(1e-6, 1e-6), settings.tolerance(1e-6))
        budget = settings.budget()
        self.assertEqual(10**7, budget.max_histories)
        self.assertTrue(Settings.get_settings_path().endswith("settings.yaml"))

    def test_settings_load(self):
        path = self.temp_path("settings.yaml")
        save_config({"tol_alg": 1e-6, "max_histories": 1000}, path)
        settings = Settings.load(path)
        self.assertEqual(1e-6, settings.tol_alg)
        self.assertEqual(1000, settings.max_histories)
        self.assertEqual(1e-8, settings.eps_dec)
        self.assertEqual(1000, settings.to_dict()["max_histories"])
        save_config({"tolerance": 1e-6}, path)
        with self.assertRaises(ConfigError):
            Settings.load(path)
        with open(path, "w") as stream:
            stream.write("tol_alg: [1, 2\n")
        with self.assertRaises(ConfigError):
            Settings.load(path)

    def test_model_kinds(self):
        bernoulli = build_space({"model": {"kind": "bernoulli", "N": 3, "p": 0.5}})
        self.assertEqual(8, bernoulli.dim)
        self.assertEqual((0, 1, 2), bernoulli.times)
        partial = build_space({"model": {"kind": "partial-decoherence", "delta": 0.5}})
        self.assertClose(1 / 16, decoherence_report(partial).max_offdiag, 1e-12)
        weights = [[0.5, 0.5], [0.2, 0.8]]
        tree = build_space(
            {"model": {"kind": "tree", "weights": weights, "labels": ["a", "b"]}}
        )
        self.assertEqual(4, tree.dim)
        self.assertClose(0.4, absolute_measure(tree.history(["a", "b"])), 1e-12)
        division = build_space({"model": {"kind": "division"}})
        self.assertEqual((0, 1, 2), division.times)
        self.assertEqual(0, division.present)
        with self.assertRaises(ConfigError):
            build_space({"model": {"kind": "lattice"}})
        with self.assertRaises(ConfigError):
            build_space({"model": {"kind": "bernoulli", "p": 0.5}})
        with self.assertRaises(ConfigError):
            build_space({"model": {"kind": "bernoulli", "N": 3, "p": "half"}})
        with self.assertRaises(ValidationError):
            build_space({"model": {"kind": "partial-decoherence", "delta": 2.0}})

    def test_explicit_config(self):
        """
        the x-then-z space declared explicitly in yaml
        """
        path = self.temp_path("x-then-z.yaml")
        with open(path, "w") as stream:
            stream.write(
                """name: x-then-z
dim: 2
rho:
  state: "0"
present: 2
times:
  - t: 1
    basis: x
  - t: 2
    basis: z
"""
            )
        space = build_space(load_config(path))
        self.assertEqual("x-then-z", space.name)
        self.assertEqual((1, 2), space.times)
        self.assertEqual(("+", "-"), space.decompositions[0].labels)
        self.assertClose(0.25, decoherence_report(space).max_offdiag)
        projectors = build_space(
            {
                "dim": 2,
                "rho": {"ket": [[1, 0], [0, 0]]},
                "times": [
                    {
                        "t": 0,
                        "labels": ["up", "down"],
                        "projectors": [[1, 0, 0, 0], [0, 0, 0, 1]],
                    }
                ],
            }
        )
        self.assertClose(1.0, absolute_measure(projectors.history(["up"])))
        self.assertEqual(0, projectors.present)

    def test_config_errors(self):
        with self.assertRaises(ConfigError):
            build_space({"dim": 2, "times": [{"t": 0, "basis": "z"}]})
        with self.assertRaises(ConfigError):
            build_space(
                {"dim": 2, "rho": {"state": "00"}, "times": [{"t": 0, "basis": "z"}]}
            )
        with self.assertRaises(ConfigError):
            build_space({"dim": 2, "rho": {"state": "0"}, "times": []})
        with self.assertRaises(ConfigError):
            build_space({"dim": 2, "rho": {"state": "0"}, "times": [{"t": 0}]})
        with self.assertRaises(ConfigError):
            build_space({"dim": 2, "rho": {}, "times": [{"t": 0, "basis": "z"}]})
        identity = [
            [1 / 3, 0],
            [0, 0],
            [0, 0],
            [0, 0],
            [1 / 3, 0],
            [0, 0],
            [0, 0],
            [0, 0],
            [1 / 3, 0],
        ]
        with self.assertRaises(ConfigError):
            build_space(
                {
                    "dim": 3,
                    "rho": {"matrix": identity},
                    "times": [{"t": 0, "basis": "z"}],
                }
            )
        path = self.temp_path("list.yaml")
        save_config([1, 2], path)
        with self.assertRaises(ConfigError):
            load_config(path)

    def test_dump_and_build(self):
        """
        a dumped space builds back to the same measures
        """
        space = partial_decoherence_model(0.5)
        path = self.temp_path("partial.yaml")
        save_config(dump_space(space), path)
        rebuilt = build_space(load_config(path))
        self.assertEqual(space.times, rebuilt.times)
        self.assertEqual(space.present, rebuilt.present)
        self.assertTrue(rebuilt.rho.is_close(space.rho))
        for h in iter_histories(space):
            self.assertClose(
                absolute_measure(h), absolute_measure(rebuilt.history(h.indices)), 1e-12
            )

    def test_settings_types(self):
        """
        settings values are checked against the field types
        """
        path = self.temp_path("settings.yaml")
        for bad in [
            {"max_histories": "many"},
            {"max_histories": 2.5},
            {"tol_alg": -1e-6},
            {"eps_dec": [1e-8]},
        ]:
            save_config(bad, path)
            with self.assertRaises(ConfigError, msg=f"{bad}"):
                Settings.load(path)
        save_config([1, 2], path)
        with self.assertRaises(ConfigError):
            Settings.load(path)
        with open(path, "w") as stream:
            stream.write(
                "max_histories: 1e7\nwarn_histories: 1.0e+5\ntol_alg: '1e-9'\n"
            )
        settings = Settings.load(path)
        self.assertEqual(10**7, settings.max_histories)
        self.assertIsInstance(settings.max_histories, int)
        self.assertEqual(10**5, settings.warn_histories)
        self.assertEqual(1e-9, settings.tol_alg)
        self.assertEqual(10**7, settings.budget().max_histories)

    def test_config_shapes(self):
        """
        sections of the wrong shape are config errors
        """
        rho = {"state": "0"}
        for config in [
            [1, 2],
            {"dim": 2, "rho": rho, "times": [1, 2]},
            {"dim": 2, "rho": rho, "times": ["z"]},
            {"dim": 2, "rho": "0", "times": [{"t": 0, "basis": "z"}]},
            {"dim": "two", "rho": rho, "times": [{"t": 0, "basis": "z"}]},
            {"dim": 2, "rho": rho, "times": [{"t": "now", "basis": "z"}]},
            {"model": "bernoulli"},
        ]:
            with self.assertRaises(ConfigError, msg=f"{config}"):
                build_space(config)
        with self.assertRaises(ValidationError):
            build_space(
                {"dim": 2, "rho": {"ket": "up"}, "times": [{"t": 0, "basis": "z"}]}
            )
        with self.assertRaises(ValidationError):
            build_space(
                {"dim": 2, "rho": {"ket": [1, "x"]}, "times": [{"t": 0, "basis": "z"}]}
            )

    def test_config_tolerance(self):
        """
        projectors that are valid to 1e-7 need a looser τ_alg
        """
        eps = 1e-7
        config = {
            "dim": 2,
            "rho": {"state": "0"},
            "times": [{"t": 0, "projectors": [[1 + eps, 0, 0, 0], [0, 0, 0, 1 - eps]]}],
        }
        with self.assertRaises(ValidationError):
            build_space(config)
        space = build_space(config, 1e-5)
        self.assertEqual(1e-5, space.tol)
        self.assertClose(1.0, absolute_measure(space.history([0]), 1e-5), 1e-6)
        for model in [
            {"kind": "bernoulli", "N": 2, "p": 0.5},
            {"kind": "partial-decoherence", "delta": 0.5},
            {"kind": "division"},
        ]:
            self.assertEqual(1e-5, build_space({"model": model}, 1e-5).tol)
