"""Run the benchmark CLI via ``python -m zlinalg``."""

from .bench import main

if __name__ == "__main__":
    raise SystemExit(main())
