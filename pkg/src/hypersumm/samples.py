"""Access to the bundled sample corpus: eight synthetic robot-leadership
interviews with one reference summary each.

Run ``python -m hypersumm.samples DIR`` to copy both files into DIR for use
with the command line.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

from .corpus import Corpus, load_corpus, load_summary_file

_DATA_DIR = Path(__file__).parent / "data"


def sample_corpus_path() -> Path:
    return _DATA_DIR / "sample_corpus.jsonl"


def sample_summaries_path() -> Path:
    return _DATA_DIR / "sample_summaries.jsonl"


def load_sample_corpus() -> Corpus:
    return load_corpus(sample_corpus_path())


def load_sample_summaries() -> list[tuple[str, str]]:
    return load_summary_file(sample_summaries_path())


def copy_samples(target_dir: str | Path) -> list[Path]:
    target = Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for source in (sample_corpus_path(), sample_summaries_path()):
        destination = target / source.name
        shutil.copyfile(source, destination)
        written.append(destination)
    return written


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print("usage: python -m hypersumm.samples TARGET_DIR", file=sys.stderr)
        raise SystemExit(2)
    for path in copy_samples(sys.argv[1]):
        print(path)
