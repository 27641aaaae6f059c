"""
Entry point for running dauto as a module: python -m dauto
"""

from dauto.cli.commands import app

if __name__ == "__main__":
    app()
