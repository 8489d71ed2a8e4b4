from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from elliptic_density import load_runtime_config  # noqa: E402
from elliptic_density.config_schema import RuntimeConfig  # noqa: E402

SECTIONS = ("truncation", "weight", "grid", "caps", "theta", "density")


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Validate runtime config with OmegaConf + Pydantic")
    parser.add_argument(
        "--base",
        type=Path,
        default=ROOT / "config/spec/defaults.yaml",
        help="Base config YAML path",
    )
    parser.add_argument(
        "--override",
        type=Path,
        action="append",
        default=[],
        help="Override YAML path; can be provided multiple times",
    )
    return parser.parse_args()


def summary_lines(config: RuntimeConfig) -> list[str]:
    """One header line, then one `section key=value ...` line per config section."""

    lines = [f"validated project={config.meta.project_id} version={config.meta.config_version}"]
    for section in SECTIONS:
        values = getattr(config, section).model_dump()
        lines.append(" ".join([section, *(f"{key}={value}" for key, value in values.items())]))
    return lines


def main() -> None:
    args = parse_args()
    config = load_runtime_config(args.base, args.override)
    print("\n".join(summary_lines(config)))


if __name__ == "__main__":
    main()
