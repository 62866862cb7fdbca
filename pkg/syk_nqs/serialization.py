"""
Entry points for converting configuration and result objects to and from JSON.
"""

import json
from typing import Any, TextIO, Type, TypeVar

from .core import JsonType
from .deserializer import create_deserializer
from .serializer import object_to_json

T = TypeVar("T")

__all__ = ["object_to_json", "json_to_object", "json_dump_string", "json_dump"]


def json_to_object(typ: Type[T], data: JsonType) -> T:
    """
    Creates an object from a representation that has been de-serialized from JSON.

    :raises TypeError: A de-serializing engine cannot be constructed for the input type.
    :raises JsonKeyError: A required property is missing, or an unrecognized property is present.
    :raises JsonTypeError: Deserialization for data has failed due to a type mismatch.
    :raises JsonValueError: A value is not admissible for its type (e.g. an unknown enumeration value).
    """

    parser = create_deserializer(typ)
    return parser.parse(data)


def json_dump_string(json_object: JsonType) -> str:
    "Dump an object as a JSON string with a compact representation, suitable for a single line of a JSONL file."

    return json.dumps(json_object, ensure_ascii=False, check_circular=False, separators=(",", ":"), allow_nan=False)


def json_dump(json_object: JsonType, file: TextIO, *, indent: Any = None) -> None:
    json.dump(
        json_object,
        file,
        ensure_ascii=False,
        check_circular=False,
        separators=(",", ": ") if indent else (",", ":"),
        indent=indent,
        allow_nan=False,
    )
    file.write("\n")
