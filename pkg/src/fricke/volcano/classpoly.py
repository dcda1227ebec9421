"""Class polynomial files: first line "D h", then h + 1 coefficients, leading first."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class ClassPolynomial:
    D: int
    coeffs: tuple

    @property
    def h(self) -> int:
        return len(self.coeffs) - 1


def parse_classpoly(text: str) -> ClassPolynomial:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    D, h = map(int, lines[0].split())
    coeffs = tuple(int(c) for c in lines[1:])
    if len(coeffs) != h + 1:
        raise ValueError(f"expected {h + 1} coefficients, found {len(coeffs)}")
    return ClassPolynomial(D, coeffs)


def load_classpoly(source) -> ClassPolynomial:
    """Read from a path, or from a shipped fixture when given an integer discriminant."""
    if isinstance(source, int):
        name = f"classpoly_{-source}.txt"
        text = resources.files("fricke").joinpath("data", name).read_text()
    else:
        text = Path(source).read_text()
    return parse_classpoly(text)


def shipped_discriminants():
    folder = resources.files("fricke").joinpath("data")
    return sorted(-int(p.name[len("classpoly_"):-4]) for p in folder.iterdir()
                  if p.name.startswith("classpoly_"))
