"""Package entry point for ``python -m lozenge_lab``."""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
