from enum import Enum
import typing as t

import numpy as np


class StrEnum(str, Enum):
    ...


ObjectType = t.Dict[str, t.Any]
Vector = t.Tuple[float, float]
FloatArray = np.ndarray
