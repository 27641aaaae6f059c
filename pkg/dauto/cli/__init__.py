"""CLI module for dauto."""
__all__: list[str] = []
