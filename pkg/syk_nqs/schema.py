"""
Generation of JSON schemas from configuration classes, and validation of configuration files against them.

Field descriptions are taken from the `:param name:` lines of the class documentation string, and constraints from
`Annotated` metadata such as `IntegerRange`.
"""

import dataclasses
import datetime
import enum
import functools
import pathlib
import typing
from copy import deepcopy
from typing import Any, Dict, List, Optional, Tuple

import jsonschema

from . import docstring
from .auxiliary import FloatRange, IntegerRange, MinItems, get_auxiliary_format
from .core import JsonType, Schema
from .inspection import (
    enum_value_types,
    get_class_properties,
    is_dataclass_type,
    is_type_enum,
    is_type_optional,
    unwrap_optional_type,
)
from .mapping import python_field_to_json_property
from .serializer import object_to_json


def docstring_to_schema(data_type: type) -> Schema:
    docstr = docstring.parse_type(data_type)
    schema: Schema = {}
    if docstr.short_description:
        schema["title"] = docstr.short_description
    if docstr.long_description:
        schema["description"] = docstr.long_description
    return schema


class JsonSchemaGenerator:
    "Creates a JSON schema with nested data classes collected under `$defs`."

    types_used: Dict[str, type]

    def __init__(self) -> None:
        self.types_used = {}

    @functools.singledispatchmethod
    def _metadata_to_schema(self, arg) -> Schema:
        # unrecognized annotation
        return {}

    @_metadata_to_schema.register
    def _(self, arg: IntegerRange) -> Schema:
        return {"minimum": arg.minimum, "maximum": arg.maximum}

    @_metadata_to_schema.register
    def _(self, arg: FloatRange) -> Schema:
        schema: Schema = {}
        if arg.minimum is not None:
            schema["minimum"] = arg.minimum
        if arg.maximum is not None:
            schema["exclusiveMaximum" if arg.exclusive_maximum else "maximum"] = arg.maximum
        return schema

    @_metadata_to_schema.register
    def _(self, arg: MinItems) -> Schema:
        return {"minItems": arg.value}

    def _simple_type_to_schema(self, typ: type) -> Optional[Schema]:
        "Returns the JSON schema associated with a simple, unrestricted type."

        if typ is type(None):
            return {"type": "null"}
        elif typ is bool:
            return {"type": "boolean"}
        elif typ is int:
            return {"type": "integer"}
        elif typ is float:
            return {"type": "number"}
        elif typ is complex:
            return {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
        elif typ is str:
            return {"type": "string"}
        elif typ is pathlib.Path:
            return {"type": "string"}
        elif typ is datetime.datetime:
            return {"type": "string", "format": "date-time"}
        else:
            return None

    def type_to_schema(self, data_type: type) -> Schema:
        """
        Returns the JSON schema associated with a type.

        :param data_type: The Python type whose JSON schema to return.
        :returns: The JSON schema associated with the type.
        """

        schema = self._simple_type_to_schema(data_type)
        if schema is not None:
            return schema

        metadata = getattr(data_type, "__metadata__", None)
        if metadata is not None:
            # type is Annotated[T, ...]
            schema = self.type_to_schema(typing.get_args(data_type)[0])
            fmt = get_auxiliary_format(data_type)
            if fmt is not None:
                schema["format"] = fmt
            for m in metadata:
                schema.update(self._metadata_to_schema(m))
            return schema

        if is_type_optional(data_type):
            return {"oneOf": [self.type_to_schema(unwrap_optional_type(data_type)), {"type": "null"}]}

        if is_type_enum(data_type):
            value_types = enum_value_types(data_type)
            if len(value_types) != 1:
                raise ValueError(
                    f"enumerations must have a consistent member value type but several types found: {value_types}"
                )
            enum_schema = self.type_to_schema(value_types[0])
            enum_schema["enum"] = [e.value for e in data_type]
            enum_schema.update(docstring_to_schema(data_type))
            return enum_schema

        origin_type = typing.get_origin(data_type)
        if origin_type is list:
            (list_type,) = typing.get_args(data_type)
            return {"type": "array", "items": self.type_to_schema(list_type)}
        elif origin_type is dict:
            _, value_type = typing.get_args(data_type)
            return {"type": "object", "additionalProperties": self.type_to_schema(value_type)}
        elif origin_type is tuple:
            args = typing.get_args(data_type)
            if len(args) == 2 and args[1] is Ellipsis:
                return {"type": "array", "items": self.type_to_schema(args[0])}
            return {
                "type": "array",
                "minItems": len(args),
                "maxItems": len(args),
                "prefixItems": [self.type_to_schema(member_type) for member_type in args],
            }

        if is_dataclass_type(data_type):
            self.types_used.setdefault(data_type.__name__, data_type)
            return {"$ref": f"#/$defs/{data_type.__name__}"}

        raise TypeError(f"type `{data_type}` cannot be described with a JSON schema")

    def dataclass_to_schema(self, data_type: type) -> Schema:
        "Expands a data class into a JSON schema of type `object`."

        property_docstrings = {name: param.description for name, param in docstring.parse_type(data_type).params.items()}
        defaults: Dict[str, Any] = {}
        for field in dataclasses.fields(data_type):
            if field.default is not dataclasses.MISSING:
                defaults[field.name] = field.default
            elif field.default_factory is not dataclasses.MISSING:
                defaults[field.name] = field.default_factory()

        properties: Dict[str, Schema] = {}
        required: List[str] = []
        for property_name, property_type in get_class_properties(data_type):
            output_name = python_field_to_json_property(property_name, property_type)
            property_def = self.type_to_schema(property_type)

            if property_name in defaults:
                def_value = defaults[property_name]
                if def_value is not None:
                    property_def["default"] = object_to_json(def_value)
            elif not is_type_optional(property_type):
                required.append(output_name)

            property_doc = property_docstrings.get(property_name)
            if property_doc:
                property_def["description"] = property_doc

            properties[output_name] = property_def

        schema: Schema = {"type": "object", "properties": properties, "additionalProperties": False}  # type: ignore
        if required:
            schema["required"] = required  # type: ignore
        schema.update(docstring_to_schema(data_type))
        return schema

    def classdef_to_schema(self, data_type: type) -> Tuple[Schema, Dict[str, Schema]]:
        """
        Returns the JSON schema associated with a data class and any nested data classes.

        :returns: A tuple of the JSON schema, and a mapping between nested type names and their corresponding schema.
        """

        self.types_used = {}
        try:
            type_schema = self.dataclass_to_schema(data_type)

            types_defined: Dict[str, Schema] = {}
            while len(self.types_used) > len(types_defined):
                # make a snapshot copy; original collection is going to be modified
                types_undefined = {
                    sub_name: sub_type for sub_name, sub_type in self.types_used.items() if sub_name not in types_defined
                }
                for sub_name, sub_type in types_undefined.items():
                    types_defined[sub_name] = self.dataclass_to_schema(sub_type)

            type_definitions = dict(sorted(types_defined.items()))
        finally:
            self.types_used = {}

        return type_schema, type_definitions


class Validator(enum.Enum):
    "Defines constants for JSON schema standards."

    Draft7 = jsonschema.Draft7Validator
    Draft201909 = jsonschema.Draft201909Validator
    Draft202012 = jsonschema.Draft202012Validator
    Latest = jsonschema.Draft202012Validator


@functools.lru_cache(maxsize=None)
def _cached_schema(data_type: type, validator: Validator) -> Schema:
    if not is_dataclass_type(data_type):
        raise TypeError(f"expected a data class type but got: {data_type}")

    type_schema, type_definitions = JsonSchemaGenerator().classdef_to_schema(data_type)

    class_schema: Schema = {}
    if type_definitions:
        class_schema["$defs"] = type_definitions  # type: ignore
    class_schema.update(type_schema)

    validator_id = validator.value.META_SCHEMA["$id"]
    try:
        validator.value.check_schema(class_schema)
    except jsonschema.exceptions.SchemaError:
        raise TypeError(f"schema does not validate against meta-schema <{validator_id}>")

    schema: Schema = {"$schema": validator_id}
    schema.update(class_schema)
    return schema


def classdef_to_schema(data_type: type, validator: Validator = Validator.Latest) -> Schema:
    """
    Returns the JSON schema corresponding to the given data class.

    :param data_type: The Python type used to generate the JSON schema.
    :returns: A JSON object that you can serialize to a JSON string with json.dump or json.dumps.
    :raises TypeError: Indicates that the generated JSON schema does not validate against the desired meta-schema.
    """

    # callers may modify the returned dictionary
    return deepcopy(_cached_schema(data_type, validator))


def validate_object(data_type: type, json_dict: JsonType) -> None:
    """
    Validates if the JSON dictionary object conforms to the expected type.

    :param data_type: The type to match against.
    :param json_dict: A JSON object obtained with `json.load` or `json.loads`.
    :raises jsonschema.exceptions.ValidationError: Indicates that the JSON object cannot represent the type.
    """

    schema_dict = _cached_schema(data_type, Validator.Latest)
    jsonschema.validate(json_dict, schema_dict, cls=jsonschema.Draft202012Validator)
