import unittest
from typing import Annotated, List, Optional

from syk_nqs.auxiliary import positive_int
from syk_nqs.config import ExperimentConfig
from syk_nqs.harness import SweepAxis, Verdict
from syk_nqs.inspection import (
    enum_value_types,
    is_dataclass_type,
    is_type_enum,
    is_type_optional,
    unwrap_annotated_type,
    unwrap_optional_type,
)
from syk_nqs.models import Model
from syk_nqs.nqs import Activation
from syk_nqs.optimize import LossKind


class TestInspection(unittest.TestCase):
    def test_enum(self):
        for typ in (Model, Activation, LossKind, SweepAxis, Verdict):
            with self.subTest(typ=typ.__name__):
                self.assertTrue(is_type_enum(typ))
                self.assertTrue(is_type_enum(Annotated[typ, "metadata"]))
        self.assertEqual(enum_value_types(Model), [str])

        # generics and plain classes are not enumerations
        self.assertFalse(is_type_enum(int))
        self.assertFalse(is_type_enum(List[Model]))
        self.assertFalse(is_type_enum(Optional[Model]))
        self.assertFalse(is_type_enum(ExperimentConfig))

    def test_dataclass(self):
        self.assertTrue(is_dataclass_type(ExperimentConfig))
        self.assertFalse(is_dataclass_type(Model))
        self.assertFalse(is_dataclass_type(List[int]))

    def test_optional(self):
        self.assertTrue(is_type_optional(Optional[positive_int]))
        self.assertTrue(is_type_optional(Model | None))
        self.assertFalse(is_type_optional(Model))
        self.assertEqual(unwrap_optional_type(Optional[Model]), Model)
        self.assertEqual(unwrap_annotated_type(unwrap_optional_type(Optional[positive_int])), int)


if __name__ == "__main__":
    unittest.main()
