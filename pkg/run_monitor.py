#!/usr/bin/env python3
"""
Launch script for the spatio-temporal trace monitor
"""

import sys
from pathlib import Path

# Add src directory to Python path
src_dir = Path(__file__).parent / "src"
sys.path.insert(0, str(src_dir))

if __name__ == "__main__":
    from cli import main
    sys.exit(main())
