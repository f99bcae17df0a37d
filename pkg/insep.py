#!/usr/bin/env python3
"""Run the insep command line: python insep.py identities --primes 2,3,5"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
