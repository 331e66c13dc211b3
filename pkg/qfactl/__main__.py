"""Entry point for qfactl when run as a module."""

from qfactl.cli import main

if __name__ == "__main__":
    main()
