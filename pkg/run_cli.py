#!/usr/bin/env python3
"""
Run the command-line front end.

Usage:
    python run_cli.py reproduce fig1 --seed 7 --out ./r
    python run_cli.py validate laplace --trials 2000 --jobs 8
    python run_cli.py simulate --config campaign.json --seed 3
    python run_cli.py inspect ./r/results.csv
"""
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.cli.main import parse_and_dispatch  # noqa: E402


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
