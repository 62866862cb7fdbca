"""
Human-readable names of Python types, used in error messages and schema definitions.
"""

import typing

from .auxiliary import get_auxiliary_format
from .inspection import is_type_optional, unwrap_optional_type


def _python_type_to_str(data_type: type) -> str:
    "Returns the string representation of a Python type without metadata."

    if is_type_optional(data_type):
        return f"Optional[{python_type_to_str(unwrap_optional_type(data_type))}]"

    origin = typing.get_origin(data_type)
    if origin is not None:
        data_type_args = typing.get_args(data_type)
        if origin is dict:
            origin_name = "Dict"
        elif origin is list:
            origin_name = "List"
        elif origin is tuple:
            origin_name = "Tuple"
        else:
            origin_name = getattr(origin, "__name__", str(origin))

        args = ", ".join("..." if t is Ellipsis else python_type_to_str(t) for t in data_type_args)
        return f"{origin_name}[{args}]"

    if isinstance(data_type, typing.ForwardRef):
        return data_type.__forward_arg__

    return getattr(data_type, "__name__", str(data_type))


def python_type_to_str(data_type: type) -> str:
    "Returns the string representation of a Python type."

    if data_type is type(None):
        return "None"

    # use compact name for alias types
    name = get_auxiliary_format(data_type)
    if name is not None:
        return name

    metadata = getattr(data_type, "__metadata__", None)
    if metadata is not None:
        arg = typing.get_args(data_type)[0]
        return _python_type_to_str(arg)

    return _python_type_to_str(data_type)
