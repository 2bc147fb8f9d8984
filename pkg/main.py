#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
FlatCurve - Main Entry Point

Usage:
  python main.py generate --model hk --n 200 --m 2 --pt 0.4 --seed 1 --out g.txt
  python main.py curve --in g.txt --isolate-top 0.03 --by degree --out curve.csv
  python main.py experiment --config config/experiment.json --out-dir results
  python main.py --debug <command> ...   # Enable debug logging
"""

import sys
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from cli import main


if __name__ == "__main__":
    sys.exit(main())
