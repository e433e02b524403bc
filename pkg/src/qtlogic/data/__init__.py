"""Bundled example teams, tables and formulas."""

from importlib.resources import files


def example(name: str) -> str:
    """Text of the bundled example file ``name``, e.g. ``"figure2.team"``."""
    return files(__name__).joinpath("paper", name).read_text()


def example_path(name: str):
    return files(__name__).joinpath("paper", name)
