"""Training cost functions and their comparison keys.

Three costs are supported, all over the confusion counts of a hypothesis
on the training examples plus its size (total atom count):

  mdl          single component fp + fn + size
  errorsize    lexicographic (fp + fn, size)
  lexfnsize    lexicographic (fn, fp, size)

Keys are tagged with the cost function that produced them; comparing keys
from different cost functions raises, because the orderings are unrelated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .evaluator import Confusion


class CostFunction(str, enum.Enum):
    MDL = "mdl"
    ERROR_SIZE = "errorsize"
    LEX_FN_SIZE = "lexfnsize"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CostKey:
    """A comparable training cost tagged with its cost function."""

    fn: CostFunction
    values: tuple

    def _check(self, other) -> "CostKey":
        if not isinstance(other, CostKey):
            raise TypeError("cannot compare CostKey with %r" % (other,))
        if other.fn is not self.fn:
            raise ValueError(
                "cannot compare costs from different cost functions "
                "(%s vs %s)" % (self.fn.value, other.fn.value)
            )
        return other

    def __lt__(self, other) -> bool:
        return self.values < self._check(other).values

    def __le__(self, other) -> bool:
        return self.values <= self._check(other).values

    def __gt__(self, other) -> bool:
        return self.values > self._check(other).values

    def __ge__(self, other) -> bool:
        return self.values >= self._check(other).values

    def __eq__(self, other) -> bool:
        if not isinstance(other, CostKey):
            return NotImplemented
        return self.values == self._check(other).values

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.fn, self.values))

    def __str__(self) -> str:
        return "%s:%s" % (self.fn.value, ",".join(str(v) for v in self.values))


def mdl_score(confusion: Confusion, size: int) -> int:
    """Description length surrogate: misclassified examples plus size."""
    return confusion.fp + confusion.fn + size


def cost_key(fn: CostFunction, confusion: Confusion, size: int) -> CostKey:
    if fn is CostFunction.MDL:
        return CostKey(fn, (mdl_score(confusion, size),))
    if fn is CostFunction.ERROR_SIZE:
        return CostKey(fn, (confusion.fp + confusion.fn, size))
    if fn is CostFunction.LEX_FN_SIZE:
        return CostKey(fn, (confusion.fn, confusion.fp, size))
    raise ValueError("unknown cost function: %r" % (fn,))


def coverage(confusion: Confusion) -> float:
    """Fraction of examples classified correctly, in [0, 1]."""
    if confusion.total == 0:
        raise ValueError("coverage is undefined on an empty example set")
    return (confusion.tp + confusion.tn) / confusion.total


def parse_cost_function(name: str) -> CostFunction:
    try:
        return CostFunction(name)
    except ValueError:
        valid = ", ".join(f.value for f in CostFunction)
        raise ValueError("unknown cost function %r (expected one of: %s)" % (name, valid))
