"""Shared fixtures: tiny executable scripts and input corpora.

Mapper/reducer fixtures are real executables (bash or python) because the
launcher's contract is "run this program", not "call this function".
"""

import collections
import stat
from pathlib import Path

import pytest

WORDCOUNT_MAPPER = """\
#!/usr/bin/env python3
import collections, sys

counts = collections.Counter(open(sys.argv[1]).read().split())
with open(sys.argv[2], "w") as out:
    for word in sorted(counts):
        out.write(f"{word} {counts[word]}\\n")
"""

WORDCOUNT_MIMO_MAPPER = """\
#!/usr/bin/env python3
import collections, sys

for line in open(sys.argv[1]):
    fields = line.split()
    if not fields:
        continue
    src, dst = fields
    counts = collections.Counter(open(src).read().split())
    with open(dst, "w") as out:
        for word in sorted(counts):
            out.write(f"{word} {counts[word]}\\n")
"""

WORDCOUNT_REDUCER = """\
#!/usr/bin/env python3
import collections, os, sys

outdir, redout = sys.argv[1], sys.argv[2]
total = collections.Counter()
for name in sorted(os.listdir(outdir)):
    path = os.path.join(outdir, name)
    if not os.path.isfile(path):
        continue
    for line in open(path):
        word, n = line.split()
        total[word] += int(n)
with open(redout, "w") as out:
    for word in sorted(total):
        out.write(f"{word} {total[word]}\\n")
"""


def write_script(path: Path, text: str) -> Path:
    path.write_text(text)
    path.chmod(path.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return path


def make_corpus(directory: Path, texts: list[str], prefix: str = "doc") -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, text in enumerate(texts, 1):
        p = directory / f"{prefix}{i:03d}.txt"
        p.write_text(text)
        paths.append(p)
    return paths


def count_words_sequentially(paths) -> str:
    """Single-process oracle the distributed word count must match."""
    total = collections.Counter()
    for p in paths:
        total.update(Path(p).read_text().split())
    return "".join(f"{word} {total[word]}\n" for word in sorted(total))


@pytest.fixture
def wordcount_scripts(tmp_path):
    """(siso mapper, mimo mapper, reducer) executables under tmp_path/bin."""
    bin_dir = tmp_path / "bin"
    bin_dir.mkdir()
    return (
        write_script(bin_dir / "countwords", WORDCOUNT_MAPPER),
        write_script(bin_dir / "countwords_multi", WORDCOUNT_MIMO_MAPPER),
        write_script(bin_dir / "mergecounts", WORDCOUNT_REDUCER),
    )
