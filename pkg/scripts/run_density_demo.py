from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density import (  # noqa: E402
    compare_report,
    constants_report,
    family_by_name,
    load_runtime_config,
    make_test_function,
    make_weight,
    scale_family,
    validate_and_residues,
)
from elliptic_density.reports import to_jsonable  # noqa: E402


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Compare one family's empirical density with its prediction")
    parser.add_argument(
        "--base",
        type=Path,
        default=ROOT / "config/spec/defaults.yaml",
        help="Base runtime config path",
    )
    parser.add_argument(
        "--override",
        type=Path,
        action="append",
        default=[ROOT / "config/spec/overrides/dev.yaml"],
        help="Optional override config path(s)",
    )
    parser.add_argument("--family", choices=("f1", "f2"), default="f1")
    parser.add_argument("--X", type=float, default=1.0e7)
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    config = load_runtime_config(args.base, args.override)
    family = family_by_name(args.family)
    weight = make_weight(config.weight)
    params = validate_and_residues(family, 1, 1, 1)
    scaled = scale_family(params, args.X, weight)
    test = make_test_function(config.density.default_kind, config.density.default_rho, family.support_bound)
    constants = constants_report(
        family, weight=weight, trunc=config.truncation, cap=config.caps.charsum_prime_cap
    )
    report = compare_report(scaled, test, config.truncation, constants, cap=config.caps.charsum_prime_cap)

    payload = {
        "family": report.family,
        "X": report.X,
        "curves": report.curve_count,
        "empirical": report.empirical,
        "predicted": report.predicted,
        "residual_scaled": report.residual_scaled,
        "lower_order_coefficient": report.lower_order_coefficient,
        "constants": constants.c,
    }
    print(json.dumps(to_jsonable(payload), indent=2))


if __name__ == "__main__":
    main()
