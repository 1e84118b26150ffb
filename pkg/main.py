#!/usr/bin/env python3
"""
drkit - Main Entry Point
Numerical verification harness for harmonic analysis on Damek-Ricci spaces.

    python main.py verify --config config/default_run.json
    python main.py sweep --quantity weighted_l1 --range t=0.25,1,4,16
"""

import sys

from dotenv import load_dotenv

from src.drkit.cli import main


if __name__ == "__main__":
    # DRKIT_CONFIG_DIR / DRKIT_OUT_DIR may come from a .env file
    load_dotenv()
    sys.exit(main())
