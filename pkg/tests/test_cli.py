from __future__ import annotations

import contextlib
import io
import json
import math
import sys
import tempfile
import unittest
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density.cli import EXIT_DOMAIN, EXIT_OK, EXIT_RESOURCE_CAP, EXIT_USAGE, run  # noqa: E402

DEV_OVERRIDE = ROOT / "config/spec/overrides/dev.yaml"


def invoke(*argv: str) -> tuple[int, str, str]:
    stdout, stderr = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
        code = run(list(argv))
    return code, stdout.getvalue(), stderr.getvalue()


class CommandTests(unittest.TestCase):
    def test_charsum_reports_exact_rational(self) -> None:
        code, out, _err = invoke("charsum", "--family", "f1", "--p", "5", "--nu", "4")
        payload = json.loads(out)

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(payload["results"]["Q"], "-216/25")
        self.assertEqual(list(payload), ["config", "results", "diagnostics"])
        self.assertEqual(payload["config"]["arguments"]["command"], "charsum")
        self.assertNotIn("threads", payload["config"]["arguments"])

    def test_bias_baseline(self) -> None:
        code, out, _err = invoke("bias", "--family", "f1", "--n", "3", "--sign", "minus")
        results = json.loads(out)["results"]

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(results["q_n"], 3)
        self.assertEqual(results["sign"], "-")
        self.assertAlmostEqual(results["e_value"], math.log(3.0) / 3.0, delta=1e-12)

    def test_constants_report(self) -> None:
        code, out, _err = invoke("--config", str(DEV_OVERRIDE), "constants", "--family", "f2", "--q", "1")
        results = json.loads(out)["results"]

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(sorted(results["constants"]["c"]), ["1", "2", "3", "4", "5", "6"])
        self.assertEqual(results["constants"]["provenance"]["P_Q"], 300)
        self.assertIn("c_sum", results)

    def test_density_report_carries_finite_scale_coefficients(self) -> None:
        code, out, _err = invoke("--config", str(DEV_OVERRIDE), "density", "--family", "f1", "--X", "1e6")
        payload = json.loads(out)
        results, diagnostics = payload["results"], payload["diagnostics"]

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(results["method"], "tables")
        self.assertAlmostEqual(results["residual"], results["empirical"] - results["predicted"], places=9)
        self.assertAlmostEqual(diagnostics["gamma_coefficient"], diagnostics["term_gamma"] * math.log(1.0e6), places=9)
        self.assertTrue(math.isfinite(diagnostics["pnt_sum_coefficient"]))

    def test_output_is_independent_of_thread_count(self) -> None:
        outputs = set()
        for threads in ("1", "4", "8"):
            code, out, _err = invoke("--threads", threads, "bias", "--family", "f2", "--n", "23", "--sign", "plus")
            self.assertEqual(code, EXIT_OK)
            outputs.add(out)
        self.assertEqual(len(outputs), 1)

    def test_constants_verify_and_charsum_are_independent_of_thread_count(self) -> None:
        commands = (
            ("--config", str(DEV_OVERRIDE), "constants", "--family", "f1", "--q", "3", "--a0", "1", "--b0", "2"),
            ("--config", str(DEV_OVERRIDE), "verify", "--family", "f2", "--grid", "1e6,1e7", "--primes", "3"),
            ("charsum", "--family", "f2", "--p", "7", "--nu", "6"),
        )
        for command in commands:
            outputs = set()
            for threads in ("1", "4", "8"):
                code, out, _err = invoke("--threads", threads, *command)
                self.assertEqual(code, EXIT_OK, msg=" ".join(command))
                outputs.add(out)
            self.assertEqual(len(outputs), 1, msg=" ".join(command))

    def test_verify_csv(self) -> None:
        code, out, _err = invoke(
            "--config", str(DEV_OVERRIDE), "--format", "csv",
            "verify", "--family", "f1", "--grid", "1e6,1e7", "--primes", "3",
        )
        lines = out.split("\r\n")

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(lines[0], "label,X,observed,predicted,ratio,residual_scaled,flags")
        self.assertTrue(lines[1].startswith("family_size,1000000.0,"))
        self.assertEqual(lines[-1], "")

    def test_report_written_to_file(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            target = Path(temp_dir) / "report.json"
            code, out, _err = invoke("--out", str(target), "charsum", "--family", "f2", "--p", "3", "--nu", "6")

            self.assertEqual(code, EXIT_OK)
            self.assertEqual(out, "")
            self.assertEqual(json.loads(target.read_text(encoding="utf-8"))["results"]["Q"], "-8/9")


class ExitCodeTests(unittest.TestCase):
    def test_usage_errors(self) -> None:
        self.assertEqual(invoke("charsum", "--family", "f1", "--p", "5", "--nu", "4", "--bogus")[0], EXIT_USAGE)
        self.assertEqual(invoke()[0], EXIT_USAGE)
        self.assertEqual(invoke("--format", "csv", "charsum", "--family", "f1", "--p", "5", "--nu", "4")[0], EXIT_USAGE)

    def test_domain_errors_name_the_invariant(self) -> None:
        code, _out, err = invoke("density", "--family", "f1", "--X", "1e6", "--q", "3", "--a0", "1", "--b0", "1")

        self.assertEqual(code, EXIT_DOMAIN)
        self.assertIn("prime 3", err)
        self.assertEqual(invoke("bias", "--family", "f1", "--n", "2", "--sign", "plus")[0], EXIT_DOMAIN)

    def test_invalid_config_override(self) -> None:
        code, _out, _err = invoke("verify", "--family", "f1", "--grid", "1e7,1e6")
        self.assertEqual(code, EXIT_DOMAIN)

    def test_missing_config_file(self) -> None:
        missing = ROOT / "config/spec/overrides/missing.yaml"
        code, out, err = invoke("--config", str(missing), "charsum", "--family", "f1", "--p", "5", "--nu", "4")

        self.assertEqual(code, EXIT_DOMAIN)
        self.assertEqual(out, "")
        self.assertIn("missing.yaml", err)

    def test_resource_cap(self) -> None:
        self.assertEqual(invoke("charsum", "--family", "f1", "--p", "5003", "--nu", "2")[0], EXIT_RESOURCE_CAP)


if __name__ == "__main__":
    unittest.main()
