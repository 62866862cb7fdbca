"""
Type aliases shared by the serialization layer and the numerical modules.
"""

from typing import Dict, List, Union

import numpy as np
import numpy.typing as npt

# a JSON type with possible `null` values
JsonType = Union[
    None,
    bool,
    int,
    float,
    str,
    Dict[str, "JsonType"],
    List["JsonType"],
]

# a meta-type that captures the object type in a JSON schema
Schema = Dict[str, JsonType]

# occupation words: bit p set means site p is occupied (site 0 is the least significant bit)
WordArray = npt.NDArray[np.int64]

RealArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
