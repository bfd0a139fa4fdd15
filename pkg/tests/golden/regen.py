"""Regenerate the frozen golden outputs for the synthetic-play pipeline.

Run from the repository root:  python tests/golden/regen.py

The goldens are frozen only after the run has been cross-checked against the
independent oracles (tests/oracles.py); the acceptance suite re-does that
cross-check on every run, so a drifted golden cannot pass silently.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).parent
ROOT = HERE.parent.parent

sys.path.insert(0, str(HERE.parent))  # for conftest/fixture_config

from conftest import fixture_config  # noqa: E402
from dramaturg.report import analyze_play, render  # noqa: E402

GOLDEN_FILES = (
    "report.json",
    "arc.csv",
    "frequencies.csv",
    "arc.svg",
    "emotions.svg",
    "wordcloud.svg",
)


def main() -> None:
    play = HERE.parent / "fixtures" / "play_synthetic.txt"
    with tempfile.TemporaryDirectory() as tmp:
        report = analyze_play(str(play), fixture_config(), out_dir=tmp, use_cache=False)
        render(report, ["json", "csv", "svg"], tmp)
        produced = Path(tmp) / "play_synthetic"
        for name in GOLDEN_FILES:
            shutil.copyfile(produced / name, HERE / name)
            print("froze", HERE / name)


if __name__ == "__main__":
    main()
