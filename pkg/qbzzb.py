#!/usr/bin/env python3
"""
QBZZB command-line entry point.

Usage:
    python qbzzb.py lambda
    python qbzzb.py bound --prior configs/prior_2d.json --spectrum configs/spectrum_2mode.json
    python qbzzb.py scan --ratios 1e-3:1e3:25 --out outputs/scan.csv

Run `python qbzzb.py --help` for every sub-command.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
