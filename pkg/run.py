"""Run the verifier CLI."""

import sys

from cgmlab.main import main

if __name__ == "__main__":
    sys.exit(main())
