"""Rewrite tests/golden/*.out from tests/golden/commands.json.

Review the diff before committing: golden files pin behaviour, they do not check it.
"""
import contextlib
import io
import json
import sys
from pathlib import Path

from f1kgw.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


if __name__ == "__main__":
    cmds = json.loads((GOLDEN / "commands.json").read_text())
    only = set(sys.argv[1:])
    for name, argv in cmds.items():
        if only and name not in only:
            continue
        code, text = run(argv)
        (GOLDEN / f"{name}.out").write_text(f"exit {code}\n{text}")
        print(f"{name}: exit {code}")
