"""
Conversion of configuration and result objects into JSON-compatible values.

Numerical results are exported with the following conventions:

* Non-finite floats are written as the strings `"inf"`, `"-inf"` and `"nan"`, since JSON has no literal for them.
* Complex numbers are written as a two-element list `[re, im]`.
* NumPy scalars are written as the matching Python scalar.
* Paths are written as strings.
* Time-zone aware timestamps are written in ISO 8601 format, with `Z` for UTC.
"""

import abc
import datetime
import enum
import functools
import math
import pathlib
import types
import typing
from typing import Any, Callable, Dict, Generic, List, Tuple, Type, TypeVar, Union

import numpy as np

from .core import JsonType
from .exception import JsonTypeError, JsonValueError
from .inspection import (
    get_class_properties,
    is_dataclass_type,
    is_type_annotated,
    is_type_enum,
    is_type_optional,
    unwrap_annotated_type,
    unwrap_optional_type,
)
from .mapping import python_field_to_json_property

T = TypeVar("T")


def float_to_json(value: float) -> Union[float, str]:
    "Writes a float, spelling out non-finite values."

    value = float(value)
    if math.isfinite(value):
        return value
    elif math.isnan(value):
        return "nan"
    elif value > 0:
        return "inf"
    else:
        return "-inf"


class Serializer(abc.ABC, Generic[T]):
    @abc.abstractmethod
    def generate(self, data: T) -> JsonType:
        ...


class NoneSerializer(Serializer[None]):
    def generate(self, data: None) -> None:
        return None


class BoolSerializer(Serializer[bool]):
    def generate(self, data: bool) -> bool:
        return bool(data)


class IntSerializer(Serializer[int]):
    def generate(self, data: int) -> int:
        # accepts NumPy integer scalars as well
        return int(data)


class FloatSerializer(Serializer[float]):
    def generate(self, data: float) -> Union[float, str]:
        return float_to_json(data)


class ComplexSerializer(Serializer[complex]):
    def generate(self, data: complex) -> List[JsonType]:
        data = complex(data)
        return [float_to_json(data.real), float_to_json(data.imag)]


class StringSerializer(Serializer[str]):
    def generate(self, data: str) -> str:
        return data


class PathSerializer(Serializer[pathlib.Path]):
    def generate(self, data: pathlib.Path) -> str:
        return data.as_posix()


class DateTimeSerializer(Serializer[datetime.datetime]):
    def generate(self, obj: datetime.datetime) -> str:
        if obj.tzinfo is None:
            raise JsonValueError(f"timestamp lacks explicit time zone designator: {obj}")
        fmt = obj.isoformat()
        if fmt.endswith("+00:00"):
            fmt = f"{fmt[:-6]}Z"  # Python's isoformat() does not support military time zones like "Zulu" for UTC
        return fmt


class EnumSerializer(Serializer[enum.Enum]):
    def generate(self, obj: enum.Enum) -> Union[int, str]:
        return obj.value


class UntypedListSerializer(Serializer[list]):
    def generate(self, obj: list) -> List[JsonType]:
        return [object_to_json(item) for item in obj]


class UntypedDictSerializer(Serializer[dict]):
    def generate(self, obj: dict) -> Dict[str, JsonType]:
        return {(key.value if isinstance(key, enum.Enum) else str(key)): object_to_json(value) for key, value in obj.items()}


class UntypedTupleSerializer(Serializer[tuple]):
    def generate(self, obj: tuple) -> List[JsonType]:
        return [object_to_json(item) for item in obj]


class OptionalSerializer(Serializer):
    generator: Serializer

    def __init__(self, inner_type: type) -> None:
        self.generator = create_serializer(inner_type)

    def generate(self, obj: Any) -> JsonType:
        if obj is None:
            return None
        return self.generator.generate(obj)


class TypedCollectionSerializer(Serializer, Generic[T]):
    generator: Serializer[T]

    def __init__(self, item_type: Type[T]) -> None:
        self.generator = create_serializer(item_type)


class TypedListSerializer(TypedCollectionSerializer[T]):
    def generate(self, obj: List[T]) -> List[JsonType]:
        return [self.generator.generate(item) for item in obj]


class TypedStringDictSerializer(TypedCollectionSerializer[T]):
    def generate(self, obj: Dict[str, T]) -> Dict[str, JsonType]:
        return {str(key): self.generator.generate(value) for key, value in obj.items()}


class TypedTupleSerializer(Serializer[tuple]):
    item_generators: Tuple[Serializer, ...]

    def __init__(self, item_types: Tuple[type, ...]) -> None:
        self.item_generators = tuple(create_serializer(item_type) for item_type in item_types)

    def generate(self, obj: tuple) -> List[JsonType]:
        return [item_generator.generate(item) for item_generator, item in zip(self.item_generators, obj)]


class VariadicTupleSerializer(TypedCollectionSerializer[T]):
    "Serializes a homogeneous tuple `Tuple[T, ...]`."

    def generate(self, obj: Tuple[T, ...]) -> List[JsonType]:
        return [self.generator.generate(item) for item in obj]


class CustomSerializer(Serializer):
    converter: Callable[[object], JsonType]

    def __init__(self, converter: Callable[[object], JsonType]) -> None:
        self.converter = converter

    def generate(self, obj: object) -> JsonType:
        return self.converter(obj)


class FieldSerializer(Generic[T]):
    """
    Serializes a Python object field into a JSON property.

    :param field_name: The name of the field in a Python class to read data from.
    :param property_name: The name of the JSON property to write to a JSON `object`.
    :param generator: A compatible serializer that can handle the field's type.
    """

    field_name: str
    property_name: str
    generator: Serializer

    def __init__(self, field_name: str, property_name: str, generator: Serializer[T]) -> None:
        self.field_name = field_name
        self.property_name = property_name
        self.generator = generator

    def generate_field(self, obj: object, object_dict: Dict[str, JsonType]) -> None:
        value = getattr(obj, self.field_name)
        if value is not None:
            object_dict[self.property_name] = self.generator.generate(value)


class DataclassSerializer(Serializer[T]):
    property_generators: List[FieldSerializer]

    def __init__(self, class_type: Type[T]) -> None:
        self.property_generators = [
            FieldSerializer(
                field_name,
                python_field_to_json_property(field_name, field_type),
                create_serializer(field_type),
            )
            for field_name, field_type in get_class_properties(class_type)
        ]

    def generate(self, obj: T) -> Dict[str, JsonType]:
        object_dict: Dict[str, JsonType] = {}
        for property_generator in self.property_generators:
            property_generator.generate_field(obj, object_dict)
        return object_dict


def create_serializer(typ: type) -> Serializer:
    if isinstance(typ, type):
        return _fetch_serializer(typ)
    else:
        # special forms are not always hashable
        return _create_serializer(typ)


@functools.lru_cache(maxsize=None)
def _fetch_serializer(typ: type) -> Serializer:
    return _create_serializer(typ)


def _create_serializer(typ: type) -> Serializer:
    if isinstance(typ, str):
        raise TypeError("expected a type; got an instance of str")

    if is_type_annotated(typ):
        return create_serializer(unwrap_annotated_type(typ))
    if is_type_optional(typ):
        return OptionalSerializer(unwrap_optional_type(typ))

    # check for well-known types
    if typ is type(None):
        return NoneSerializer()
    elif typ is bool or typ is np.bool_:
        return BoolSerializer()
    elif typ is int or (isinstance(typ, type) and issubclass(typ, np.integer)):
        return IntSerializer()
    elif typ is float or (isinstance(typ, type) and issubclass(typ, np.floating)):
        return FloatSerializer()
    elif typ is complex or (isinstance(typ, type) and issubclass(typ, np.complexfloating)):
        return ComplexSerializer()
    elif typ is str:
        return StringSerializer()
    elif isinstance(typ, type) and issubclass(typ, pathlib.PurePath):
        return PathSerializer()
    elif typ is datetime.datetime:
        return DateTimeSerializer()

    # dynamically-typed collection types
    if typ is list:
        return UntypedListSerializer()
    elif typ is dict:
        return UntypedDictSerializer()
    elif typ is tuple:
        return UntypedTupleSerializer()

    origin_type = typing.get_origin(typ)
    if origin_type is list:
        (list_item_type,) = typing.get_args(typ)
        return TypedListSerializer(list_item_type)
    elif origin_type is dict:
        key_type, value_type = typing.get_args(typ)
        if key_type is not str:
            raise JsonTypeError(f"dictionary keys must be strings but got: {key_type}")
        return TypedStringDictSerializer(value_type)
    elif origin_type is tuple:
        args = typing.get_args(typ)
        if len(args) == 2 and args[1] is Ellipsis:
            return VariadicTupleSerializer(args[0])
        return TypedTupleSerializer(args)

    # check if object has custom serialization method
    convert_func = getattr(typ, "to_json", None)
    if callable(convert_func):
        return CustomSerializer(convert_func)

    if is_type_enum(typ):
        return EnumSerializer()
    if is_dataclass_type(typ):
        return DataclassSerializer(typ)

    if typ is types.FunctionType or typ is types.ModuleType or typ is type or typ is types.MethodType:
        raise TypeError(f"object of type {typ} cannot be represented in JSON")

    raise JsonValueError(f"type `{typ}` has no JSON representation in result records")


def object_to_json(obj: Any) -> JsonType:
    """
    Converts a configuration or result object to a representation that can be exported to JSON.

    * Fundamental types are written as is; non-finite floats are spelled out as strings.
    * Complex numbers are written as `[re, im]`.
    * Enumerations are written as their value.
    * Containers (`list`, `tuple`, `dict`) are exported recursively.
    * Data classes are converted to dictionaries of key-value pairs; fields whose value is `None` are omitted.
    """

    typ: type = type(obj)
    generator = create_serializer(typ)
    return generator.generate(obj)
