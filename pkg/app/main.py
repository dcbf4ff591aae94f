# app/main.py
"""Command-line entry point: python -m app.main <command> ..."""
from app.cli import cli


def main() -> None:
    cli(prog_name="corrchan")


if __name__ == "__main__":
    main()
