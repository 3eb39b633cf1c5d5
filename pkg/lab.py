"""
Renewal Lab launcher
Runs the renewal-lab command line from a source checkout:

    python lab.py listing1 --seed 7
"""

import sys

from renewal_lab.cli import run

if __name__ == "__main__":
    sys.exit(run())
