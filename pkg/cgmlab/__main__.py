"""`python -m cgmlab`."""

import sys

from cgmlab.main import main

sys.exit(main())
