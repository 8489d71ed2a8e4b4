from __future__ import annotations

import importlib.util
import sys
import tempfile
import unittest
from pathlib import Path

from omegaconf import OmegaConf
from pydantic import ValidationError

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density import load_runtime_config  # noqa: E402
from elliptic_density.config_schema import TruncationParams  # noqa: E402

BASE_CONFIG = ROOT / "config/spec/defaults.yaml"
DEV_OVERRIDE = ROOT / "config/spec/overrides/dev.yaml"


def load_script(name: str):
    spec = importlib.util.spec_from_file_location(name, ROOT / "scripts" / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


class RuntimeConfigTests(unittest.TestCase):
    def test_base_config_loads(self) -> None:
        config = load_runtime_config(BASE_CONFIG)

        self.assertEqual(config.meta.project_id, "elliptic_density")
        self.assertEqual(config.truncation.P, 1_000_000)
        self.assertEqual(config.truncation.T, 100_000_000)
        self.assertEqual(config.grid.X[0], 1.0e6)
        self.assertEqual(config.caps.bias_max_n, 97)

    def test_override_merge_precedence_is_deterministic(self) -> None:
        config_a = load_runtime_config(BASE_CONFIG, [DEV_OVERRIDE])
        config_b = load_runtime_config(BASE_CONFIG, [DEV_OVERRIDE])

        self.assertEqual(config_a.truncation.P, 100_000)
        self.assertEqual(config_a.truncation.P_Q, 300)
        self.assertEqual(config_a.truncation.L_max, 5)
        self.assertEqual(config_a.grid.X, [1.0e6, 1.0e7])
        self.assertEqual(config_a.model_dump(), config_b.model_dump())

    def test_dotlist_applies_after_overrides(self) -> None:
        config = load_runtime_config(BASE_CONFIG, [DEV_OVERRIDE], dotlist={"truncation.P": 5000})

        self.assertEqual(config.truncation.P, 5000)
        self.assertEqual(config.truncation.P_Q, 300)

    def test_unknown_keys_fail_validation(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            override_path = Path(temp_dir) / "bad_override.yaml"
            override_path.write_text("unexpected_top_level:\n  value: 1\n", encoding="utf-8")

            with self.assertRaises(ValidationError):
                load_runtime_config(BASE_CONFIG, [override_path])

    def test_charsum_truncation_above_cap_fails_validation(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            broken_path = Path(temp_dir) / "broken.yaml"

            cfg = OmegaConf.load(BASE_CONFIG)
            cfg.caps.charsum_prime_cap = 1000
            OmegaConf.save(cfg, broken_path)

            with self.assertRaises(ValidationError):
                load_runtime_config(broken_path)

    def test_descending_grid_fails_validation(self) -> None:
        with self.assertRaises(ValidationError):
            load_runtime_config(BASE_CONFIG, dotlist={"grid.X": [1.0e7, 1.0e6]})

    def test_truncation_bounds(self) -> None:
        with self.assertRaises(ValidationError):
            TruncationParams(P=50, P_Q=300, L_max=5, T=10**6, quad_tol=1e-9)
        with self.assertRaises(ValidationError):
            TruncationParams(P=1000, P_Q=300, L_max=5, T=1000, quad_tol=1e-9)


class ValidateScriptTests(unittest.TestCase):
    def test_summary_names_every_section(self) -> None:
        script = load_script("validate_runtime_config")
        lines = script.summary_lines(load_runtime_config(BASE_CONFIG, [DEV_OVERRIDE]))

        self.assertEqual(lines[0], "validated project=elliptic_density version=1.0.0")
        self.assertEqual([line.split(" ", 1)[0] for line in lines[1:]], list(script.SECTIONS))
        self.assertIn("P_Q=300", lines[1])
        self.assertIn("kind=bump", lines[2])
        self.assertIn("direct_sample_size=500", lines[4])
        self.assertIn("default_rho=0.2", lines[6])


if __name__ == "__main__":
    unittest.main()
