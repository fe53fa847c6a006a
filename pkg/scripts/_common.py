import sys
from pathlib import Path

from capa_isac.cli import main

OUT = Path(__file__).resolve().parent.parent / "results"


def run(*argv):
    code = main(list(argv))
    if code:
        sys.exit(code)
    return code
