"""
Constraint annotations for configuration fields.

The annotations are attached with `Annotated[T, ...]`; the schema generator turns them into JSON schema keywords, which
`jsonschema` then enforces when a configuration file is loaded.
"""

from dataclasses import dataclass
from typing import Annotated, Optional, TypeAlias


@dataclass(frozen=True)
class Alias:
    "Alternative name of a property, used as the key in configuration files and records."

    name: str


@dataclass(frozen=True)
class IntegerRange:
    "Minimum and maximum value of an integer. The range is inclusive."

    minimum: int
    maximum: int


@dataclass(frozen=True)
class FloatRange:
    """
    Bounds of a floating-point value.

    :param minimum: Smallest admissible value (inclusive), if any.
    :param maximum: Largest admissible value, if any.
    :param exclusive_maximum: Whether the maximum itself is excluded.
    """

    minimum: Optional[float] = None
    maximum: Optional[float] = None
    exclusive_maximum: bool = False


@dataclass(frozen=True)
class MinItems:
    "Minimum number of items in a list."

    value: int


seed64: TypeAlias = Annotated[int, IntegerRange(0, 18446744073709551615)]
positive_int: TypeAlias = Annotated[int, IntegerRange(1, 9223372036854775807)]
site_count: TypeAlias = Annotated[int, IntegerRange(2, 30)]

# maps type aliases defined in this module to their names, reported as the JSON schema `format`
_auxiliary_types = {seed64: "seed64"}


def get_auxiliary_format(data_type: type) -> Optional[str]:
    "Returns the JSON format string corresponding to an auxiliary type."

    return _auxiliary_types.get(data_type)
