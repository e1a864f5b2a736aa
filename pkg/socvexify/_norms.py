from enum import Enum

import numpy as np


class NormKind(Enum):
    """Norms supported in the conic constraint; values are the JSON spellings."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def order(self) -> float:
        """The order argument understood by numpy.linalg.norm."""
        return {NormKind.L1: 1, NormKind.L2: 2, NormKind.LINF: np.inf}[self]

    @property
    def lp_representable(self) -> bool:
        return self is not NormKind.L2

    def of(self, vector) -> float:
        """Evaluate the norm of a vector (0 for an empty vector)."""
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.size == 0:
            return 0.0
        return float(np.linalg.norm(vector, ord=self.order))
