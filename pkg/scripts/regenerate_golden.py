#!/usr/bin/env python3
"""Regenerate the frozen CLI transcripts under src/ribbonlens/golden/.

Run after any deliberate change to the structured-output schema or the
search engine (bump the engine version in that case), then commit the diff.
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ribbonlens import selfcheck


def main() -> None:
    golden_dir = pathlib.Path(__file__).resolve().parents[1] / "src" / "ribbonlens" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    for name in selfcheck.GOLDEN_COMMANDS:
        payload = selfcheck.render_golden(name)
        target = golden_dir / f"{name}.json"
        target.write_bytes(payload)
        print(f"wrote {target} ({len(payload)} bytes)")


if __name__ == "__main__":
    main()
