from __future__ import annotations

import sys

from casalter.cli import main

sys.exit(main())
