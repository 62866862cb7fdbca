"""
Reconstruction of configuration and result objects from JSON values.

The conventions mirror those of the serializer: non-finite floats may be given as the strings `"inf"`, `"-inf"` and
`"nan"`, complex numbers as `[re, im]` and paths as strings.
"""

import abc
import dataclasses
import datetime
import enum
import functools
import pathlib
import typing
from typing import Any, Callable, Dict, Generic, List, Optional, Set, Tuple, Type, TypeVar

from .core import JsonType
from .exception import JsonKeyError, JsonTypeError, JsonValueError
from .inspection import (
    get_resolved_hints,
    is_dataclass_type,
    is_type_annotated,
    is_type_enum,
    is_type_optional,
    unwrap_annotated_type,
    unwrap_optional_type,
)
from .mapping import python_field_to_json_property
from .name import python_type_to_str

E = TypeVar("E", bound=enum.Enum)
T = TypeVar("T")
R = TypeVar("R")
V = TypeVar("V")

_NON_FINITE = {"inf": float("inf"), "-inf": float("-inf"), "nan": float("nan")}


class Deserializer(abc.ABC, Generic[T]):
    "Parses a JSON value into a Python type."

    @abc.abstractmethod
    def parse(self, data: JsonType) -> T:
        ...


class NoneDeserializer(Deserializer[None]):
    "Parses JSON `null` values into Python `None`."

    def parse(self, data: JsonType) -> None:
        if data is not None:
            raise JsonTypeError(f"`None` type expects JSON `null` but instead received: {data}")
        return None


class BoolDeserializer(Deserializer[bool]):
    "Parses JSON `boolean` values into Python `bool` type."

    def parse(self, data: JsonType) -> bool:
        if not isinstance(data, bool):
            raise JsonTypeError(f"`bool` type expects JSON `boolean` data but instead received: {data}")
        return bool(data)


class IntDeserializer(Deserializer[int]):
    "Parses JSON `number` values into Python `int` type."

    def parse(self, data: JsonType) -> int:
        # `bool` is a subclass of `int` in Python but not a number in JSON
        if not isinstance(data, int) or isinstance(data, bool):
            raise JsonTypeError(f"`int` type expects integer data as JSON `number` but instead received: {data}")
        return int(data)


class FloatDeserializer(Deserializer[float]):
    "Parses JSON `number` values (or a spelled-out non-finite value) into Python `float` type."

    def parse(self, data: JsonType) -> float:
        if isinstance(data, str):
            value = _NON_FINITE.get(data)
            if value is None:
                raise JsonValueError(f"`float` type expects a number or one of {list(_NON_FINITE)} but got: {data}")
            return value
        if not isinstance(data, (int, float)) or isinstance(data, bool):
            raise JsonTypeError(f"`float` type expects data as JSON `number` but instead received: {data}")
        return float(data)


class ComplexDeserializer(Deserializer[complex]):
    "Parses a two-element JSON `array` `[re, im]` into Python `complex` type."

    parser = FloatDeserializer()

    def parse(self, data: JsonType) -> complex:
        if not isinstance(data, list) or len(data) != 2:
            raise JsonTypeError(f"`complex` type expects a JSON `array` of length 2 but instead received: {data}")
        return complex(self.parser.parse(data[0]), self.parser.parse(data[1]))


class StringDeserializer(Deserializer[str]):
    "Parses JSON `string` values into Python `str` type."

    def parse(self, data: JsonType) -> str:
        if not isinstance(data, str):
            raise JsonTypeError(f"`str` type expects JSON `string` data but instead received: {data}")
        return str(data)


class PathDeserializer(Deserializer[pathlib.Path]):
    "Parses JSON `string` values into a file system path."

    def parse(self, data: JsonType) -> pathlib.Path:
        if not isinstance(data, str):
            raise JsonTypeError(f"`Path` type expects JSON `string` data but instead received: {data}")
        return pathlib.Path(data)


class DateTimeDeserializer(Deserializer[datetime.datetime]):
    "Parses JSON `string` values representing timestamps in ISO 8601 format to Python `datetime` with time zone."

    def parse(self, data: JsonType) -> datetime.datetime:
        if not isinstance(data, str):
            raise JsonTypeError(f"`datetime` type expects JSON `string` data but instead received: {data}")

        if data.endswith("Z"):
            data = f"{data[:-1]}+00:00"  # Python's isoformat() does not support military time zones like "Zulu" for UTC
        timestamp = datetime.datetime.fromisoformat(data)
        if timestamp.tzinfo is None:
            raise JsonValueError(f"timestamp lacks explicit time zone designator: {data}")
        return timestamp


class ListDeserializer(Deserializer[List[T]]):
    "Recursively de-serializes a JSON array into a Python `list`."

    item_parser: Deserializer

    def __init__(self, item_type: Type[T]) -> None:
        self.item_parser = create_deserializer(item_type)

    def parse(self, data: JsonType) -> List[T]:
        if not isinstance(data, list):
            raise JsonTypeError(f"type `List` expects JSON `array` data but instead received: {data}")
        return [self.item_parser.parse(item) for item in data]


class DictDeserializer(Deserializer[Dict[str, V]]):
    "Recursively de-serializes a JSON object into a Python `dict` with string keys."

    value_parser: Deserializer[V]

    def __init__(self, value_type: Type[V]) -> None:
        self.value_parser = create_deserializer(value_type)

    def parse(self, data: JsonType) -> Dict[str, V]:
        if not isinstance(data, dict):
            raise JsonTypeError(f"type `Dict` expects JSON `object` data but instead received: {data}")
        return {key: self.value_parser.parse(value) for key, value in data.items()}


class TupleDeserializer(Deserializer[Tuple[Any, ...]]):
    "Recursively de-serializes a JSON array into a Python `tuple` of fixed length."

    item_parsers: Tuple[Deserializer[Any], ...]

    def __init__(self, item_types: Tuple[Type[Any], ...]) -> None:
        self.item_parsers = tuple(create_deserializer(item_type) for item_type in item_types)

    def parse(self, data: JsonType) -> Tuple[Any, ...]:
        if not isinstance(data, list) or len(data) != len(self.item_parsers):
            count = len(self.item_parsers)
            raise JsonTypeError(f"type `Tuple` expects a JSON `array` of length {count} but instead received: {data}")
        return tuple(item_parser.parse(item) for item_parser, item in zip(self.item_parsers, data))


class VariadicTupleDeserializer(Deserializer[Tuple[T, ...]]):
    "Recursively de-serializes a JSON array into a homogeneous Python `tuple`."

    item_parser: Deserializer[T]

    def __init__(self, item_type: Type[T]) -> None:
        self.item_parser = create_deserializer(item_type)

    def parse(self, data: JsonType) -> Tuple[T, ...]:
        if not isinstance(data, list):
            raise JsonTypeError(f"type `Tuple` expects JSON `array` data but instead received: {data}")
        return tuple(self.item_parser.parse(item) for item in data)


class OptionalDeserializer(Deserializer[Optional[T]]):
    "Accepts JSON `null` in addition to values of the wrapped type."

    parser: Deserializer[T]

    def __init__(self, inner_type: Type[T]) -> None:
        self.parser = create_deserializer(inner_type)

    def parse(self, data: JsonType) -> Optional[T]:
        if data is None:
            return None
        return self.parser.parse(data)


class EnumDeserializer(Deserializer[E]):
    "Returns an enumeration instance based on the enumeration value read from a JSON value."

    enum_type: Type[E]

    def __init__(self, enum_type: Type[E]) -> None:
        self.enum_type = enum_type

    def parse(self, data: JsonType) -> E:
        try:
            return self.enum_type(data)
        except ValueError:
            allowed = ", ".join(repr(e.value) for e in self.enum_type)
            raise JsonValueError(f"`{self.enum_type.__name__}` expects one of {allowed} but got: {data!r}") from None


class CustomDeserializer(Deserializer[T]):
    "Uses the `from_json` class method in class to de-serialize the object from JSON."

    converter: Callable[[JsonType], T]

    def __init__(self, converter: Callable[[JsonType], T]) -> None:
        self.converter = converter

    def parse(self, data: JsonType) -> T:
        return self.converter(data)


class FieldDeserializer(abc.ABC, Generic[T, R]):
    """
    Deserializes a JSON property into a Python object field.

    :param property_name: The name of the JSON property to read from a JSON `object`.
    :param field_name: The name of the field in a Python class to write data to.
    :param parser: A compatible deserializer that can handle the field's type.
    """

    property_name: str
    field_name: str
    parser: Deserializer[T]

    def __init__(self, property_name: str, field_name: str, parser: Deserializer[T]) -> None:
        self.property_name = property_name
        self.field_name = field_name
        self.parser = parser

    @abc.abstractmethod
    def parse_field(self, data: Dict[str, JsonType]) -> R:
        ...


class RequiredFieldDeserializer(FieldDeserializer[T, T]):
    "Deserializes a JSON property into a mandatory Python object field."

    def parse_field(self, data: Dict[str, JsonType]) -> T:
        if self.property_name not in data:
            raise JsonKeyError(f"missing required property `{self.property_name}` from JSON object: {data}")
        return self.parser.parse(data[self.property_name])


class OptionalFieldDeserializer(FieldDeserializer[T, Optional[T]]):
    "Deserializes a JSON property into an optional Python object field with a default value of `None`."

    def parse_field(self, data: Dict[str, JsonType]) -> Optional[T]:
        value = data.get(self.property_name)
        if value is not None:
            return self.parser.parse(value)
        return None


class DefaultFieldDeserializer(FieldDeserializer[T, T]):
    "Deserializes a JSON property into a Python object field with an explicit default value (or default factory)."

    default_factory: Callable[[], T]

    def __init__(
        self,
        property_name: str,
        field_name: str,
        parser: Deserializer[T],
        default_factory: Callable[[], T],
    ) -> None:
        super().__init__(property_name, field_name, parser)
        self.default_factory = default_factory

    def parse_field(self, data: Dict[str, JsonType]) -> T:
        value = data.get(self.property_name)
        if value is not None:
            return self.parser.parse(value)
        return self.default_factory()


class DataclassDeserializer(Deserializer[T]):
    """
    De-serializes a data class from a JSON `object`.

    The class initializer is invoked so that validation in `__post_init__` applies to parsed objects too.
    """

    class_type: Type[T]
    property_parsers: List[FieldDeserializer]
    property_names: Set[str]

    def __init__(self, class_type: Type[T]) -> None:
        self.class_type = class_type
        self.property_parsers = []
        resolved_hints = get_resolved_hints(class_type)
        for field in dataclasses.fields(class_type):  # type: ignore
            if not field.init:
                continue

            field_type = resolved_hints[field.name]
            property_name = python_field_to_json_property(field.name, field_type)
            parser = create_deserializer(field_type)

            if field.default is not dataclasses.MISSING:
                default_value = field.default
                field_parser: FieldDeserializer = DefaultFieldDeserializer(
                    property_name, field.name, parser, lambda value=default_value: value
                )
            elif field.default_factory is not dataclasses.MISSING:
                default_factory = typing.cast(Callable[[], Any], field.default_factory)
                field_parser = DefaultFieldDeserializer(property_name, field.name, parser, default_factory)
            elif is_type_optional(field_type):
                field_parser = OptionalFieldDeserializer(property_name, field.name, parser)
            else:
                field_parser = RequiredFieldDeserializer(property_name, field.name, parser)

            self.property_parsers.append(field_parser)

        self.property_names = set(property_parser.property_name for property_parser in self.property_parsers)

    def parse(self, data: JsonType) -> T:
        if not isinstance(data, dict):
            type_name = python_type_to_str(self.class_type)
            raise JsonTypeError(f"type `{type_name}` expects JSON `object` data but instead received: {data}")

        object_data: Dict[str, JsonType] = typing.cast(Dict[str, JsonType], data)
        if not self.property_names.issuperset(object_data):
            unassigned_names = [name for name in object_data if name not in self.property_names]
            raise JsonKeyError(f"unrecognized fields in JSON object: {unassigned_names}")

        field_values = {
            property_parser.field_name: property_parser.parse_field(object_data)
            for property_parser in self.property_parsers
        }
        return self.class_type(**field_values)  # type: ignore


def create_deserializer(typ: Type[T]) -> Deserializer[T]:
    """
    Creates a de-serializer engine to parse an object obtained from a JSON string.

    :raises TypeError: A de-serializing engine cannot be constructed for the input type.
    """

    if isinstance(typ, type):
        return _fetch_deserializer(typ)
    else:
        # special forms are not always hashable
        return _create_deserializer(typ)


@functools.lru_cache(maxsize=None)
def _fetch_deserializer(typ: type) -> Deserializer:
    return _create_deserializer(typ)


def _create_deserializer(typ: type) -> Deserializer:
    if is_type_annotated(typ):
        return create_deserializer(unwrap_annotated_type(typ))
    if is_type_optional(typ):
        return OptionalDeserializer(unwrap_optional_type(typ))

    # check for well-known types
    if typ is type(None):
        return NoneDeserializer()
    elif typ is bool:
        return BoolDeserializer()
    elif typ is int:
        return IntDeserializer()
    elif typ is float:
        return FloatDeserializer()
    elif typ is complex:
        return ComplexDeserializer()
    elif typ is str:
        return StringDeserializer()
    elif typ is pathlib.Path:
        return PathDeserializer()
    elif typ is datetime.datetime:
        return DateTimeDeserializer()

    origin_type = typing.get_origin(typ)
    if origin_type is list:
        (list_item_type,) = typing.get_args(typ)
        return ListDeserializer(list_item_type)
    elif origin_type is dict:
        key_type, value_type = typing.get_args(typ)
        if key_type is not str:
            raise TypeError(f"dictionary keys must be strings but got: {key_type}")
        return DictDeserializer(value_type)
    elif origin_type is tuple:
        args = typing.get_args(typ)
        if len(args) == 2 and args[1] is Ellipsis:
            return VariadicTupleDeserializer(args[0])
        return TupleDeserializer(args)

    if not isinstance(typ, type):
        raise TypeError(f"type `{python_type_to_str(typ)}` is not supported in configuration files and records")

    # check if object has custom de-serialization method
    convert_func = getattr(typ, "from_json", None)
    if callable(convert_func):
        return CustomDeserializer(convert_func)

    if is_type_enum(typ):
        return EnumDeserializer(typ)
    if is_dataclass_type(typ):
        return DataclassDeserializer(typ)

    raise TypeError(f"type `{python_type_to_str(typ)}` is not supported in configuration files and records")
