#!/usr/bin/env python3
"""External explainer that violates the line-JSON protocol."""

import sys

for _line in sys.stdin:
    sys.stdout.write("this is not json\n")
    sys.stdout.flush()
