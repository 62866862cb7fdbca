"""
Parsing of ReST-style documentation strings.

The `:param name:` lines of configuration classes double as field documentation: they become descriptions in the
generated JSON schema printed by `syk-nqs schema`.
"""

import dataclasses
import inspect
import re
from dataclasses import dataclass
from typing import Dict, Optional

from .inspection import get_class_properties, is_dataclass_type, is_type_enum


@dataclass
class DocstringParam:
    """
    A parameter declaration in a parameter block.

    :param name: The name of the parameter.
    :param description: The description text for the parameter.
    """

    name: str
    description: str

    def __str__(self) -> str:
        return f":param {self.name}: {self.description}"


@dataclass
class Docstring:
    """
    Represents the documentation string of a (data) class.

    :param short_description: The first block of text, ending with a double newline or a parameter block.
    :param long_description: The optional text between the short description and the parameter block.
    :param params: The parameter block of named parameter and description string pairs.
    """

    short_description: Optional[str] = None
    long_description: Optional[str] = None
    params: Dict[str, DocstringParam] = dataclasses.field(default_factory=dict)

    @property
    def full_description(self) -> Optional[str]:
        if self.short_description and self.long_description:
            return f"{self.short_description}\n\n{self.long_description}"
        else:
            return self.short_description


def parse_text(text: Optional[str]) -> Docstring:
    """
    Parse a ReST-style docstring into its components.

    Meta-fields other than `:param:` (e.g. `:returns:`, `:raises:`) are skipped.

    :param text: The documentation string to parse, typically acquired as `type.__doc__`.
    :returns: Components of the documentation string.
    """

    if not text:
        return Docstring()

    # find block that starts object metadata block (e.g. `:param p:` or `:returns:`)
    text = inspect.cleandoc(text)
    match = re.search("^:", text, flags=re.MULTILINE)
    if match:
        desc_chunk = text[: match.start()]
        meta_chunk = text[match.start() :]
    else:
        desc_chunk = text
        meta_chunk = ""

    parts = desc_chunk.split("\n\n", 1)
    short_description = parts[0].strip().replace("\n", " ") or None
    long_description = parts[1].strip() or None if len(parts) > 1 else None

    params: Dict[str, DocstringParam] = {}
    for match in re.finditer(r"(^:.*?)(?=^:|\Z)", meta_chunk, flags=re.DOTALL | re.MULTILINE):
        args_chunk, desc = match.group(0).lstrip(":").split(":", 1)
        args = args_chunk.split()
        if len(args) == 2 and args[0] == "param":
            # collapse continuation lines into a single line of text
            params[args[1]] = DocstringParam(name=args[1], description=" ".join(desc.split()))

    return Docstring(short_description=short_description, long_description=long_description, params=params)


def has_default_docstring(typ: type) -> bool:
    "Check if class has the auto-generated string assigned by @dataclass or `enum.Enum`."

    if typ.__doc__ is None:
        return False
    if is_dataclass_type(typ):
        return re.match(f"^{re.escape(typ.__name__)}[(].*[)]$", typ.__doc__) is not None
    if is_type_enum(typ):
        return typ.__doc__ == "An enumeration."
    return False


def parse_type(typ: type) -> Docstring:
    """
    Parse the docstring of a type into its components.

    :param typ: The type whose documentation string to parse.
    :returns: Components of the documentation string.
    :raises TypeError: A documented parameter is not a member of the data class.
    """

    if typ.__doc__ is None or has_default_docstring(typ):
        return Docstring()

    docstring = parse_text(typ.__doc__)
    if is_dataclass_type(typ):
        properties = dict(get_class_properties(typ))
        for name in docstring.params:
            if name not in properties:
                raise TypeError(f"doc-string parameter `{name}` is not a member of the data-class `{typ.__name__}`")
    return docstring
