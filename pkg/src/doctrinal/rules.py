"""Decision rules: maps from contingency tables to accept (1) / reject (0).

Built-in rules, for ``n = 2m + 1``:

* ``IbyI`` (issue by issue, R1): each premise has its own majority.
* ``PbyP`` (path by path, R2): P∧Q voters outnumber the deniers of P and,
  separately, the deniers of Q.
* ``CbyC`` (case by case, R3): P∧Q voters are an outright majority.
* ``R0``: P∧Q beats each other cell separately.  Not admissible for n >= 5.

Any other rule is ``custom`` and stored as a bitmask over the lexicographic
table enumeration of :class:`~doctrinal.tables.TableSpace`.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .errors import CapabilityError, DomainError
from .tables import (
    ContingencyTable,
    canonical,
    check_committee_size,
    check_table,
    enumerate_tables,
    rank,
    successors,
    table_arrays,
    transpose,
    transposition_classes,
)

BUILTIN_KINDS = ("IbyI", "PbyP", "CbyC", "R0")

ALIASES = {
    "r1": "IbyI",
    "ibyi": "IbyI",
    "r2": "PbyP",
    "pbyp": "PbyP",
    "r3": "CbyC",
    "cbyc": "CbyC",
    "r0": "R0",
    "constant0": "constant0",
    "constant1": "constant1",
}

# Largest committee for which admissible rules are enumerated (38904 rules at n=7).
MAX_ENUMERATION_N = 7


def _ibyi(x, y, z, t, m):
    return x > m - min(y, z)


def _pbyp(x, y, z, t, m):
    return x > m - min(y, z) // 2


def _cbyc(x, y, z, t, m):
    return x > m


def _r0(x, y, z, t, m):
    return x > y and x > z and x > t


PREDICATES: dict[str, Callable[..., bool]] = {
    "IbyI": _ibyi,
    "PbyP": _pbyp,
    "CbyC": _cbyc,
    "R0": _r0,
}

# The defining inequalities, kept separately from the threshold forms above so
# that their equivalence can be checked table by table.
DEFINING_FORMS: dict[str, Callable[..., bool]] = {
    "IbyI": lambda x, y, z, t, m: x + y > z + t and x + z > y + t,
    "PbyP": lambda x, y, z, t, m: x > z + t and x > y + t,
    "CbyC": lambda x, y, z, t, m: x > y + z + t,
}

# Array versions of PREDICATES, used to build masks for large n.
VECTOR_FORMS: dict[str, Callable[..., np.ndarray]] = {
    "IbyI": lambda x, y, z, t, m: x > m - np.minimum(y, z),
    "PbyP": lambda x, y, z, t, m: x > m - np.minimum(y, z) // 2,
    "CbyC": lambda x, y, z, t, m: x > m,
    "R0": lambda x, y, z, t, m: (x > y) & (x > z) & (x > t),
}

RULE_NUMBERS = {"IbyI": "R1", "PbyP": "R2", "CbyC": "R3", "R0": "R0"}


@dataclass(frozen=True)
class DecisionRule:
    """A total rule on ``TableSpace(n)``.

    Two rules compare equal when they agree on every table, whatever their
    names; at n = 3 and 5, ``PbyP == CbyC``.
    """

    n: int
    mask: int
    kind: str = field(default="custom", compare=False)
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        check_committee_size(self.n)
        if self.mask < 0 or self.mask >> len(enumerate_tables(self.n)):
            raise DomainError("rule mask has bits outside the table space")

    @property
    def space(self):
        return enumerate_tables(self.n)

    def __call__(self, a) -> int:
        return apply_rule(self, a)

    def accepts(self) -> list[ContingencyTable]:
        space = self.space
        return [space[i] for i in np.flatnonzero(self.bits())]

    def bits(self) -> np.ndarray:
        """Boolean accept vector over the table enumeration."""
        size = len(self.space)
        raw = np.frombuffer(self.mask.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:size].astype(bool)

    def complement_count(self) -> int:
        return len(self.space) - bin(self.mask).count("1")

    def transposed(self) -> "DecisionRule":
        """The rule ``a -> self(transpose(a))``."""
        space = self.space
        # perm[i] is the index of the transpose of table i.
        perm = np.array([space.index(transpose(a)) for a in space])
        return DecisionRule(self.n, mask_from_bits(self.bits()[perm]), "custom",
                            f"transpose({self.name})")

    def to_json(self) -> dict:
        if self.kind in BUILTIN_KINDS:
            return {"n": self.n, "kind": self.kind}
        return {
            "n": self.n,
            "kind": "custom",
            "name": self.name,
            "accept": [a.to_json() for a in self.accepts()],
        }


def mask_from_bits(bits) -> int:
    """Pack a boolean vector (bit ``i`` = table ``i``) into an integer mask."""
    packed = np.packbits(np.asarray(bits, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _mask_from(n: int, kind: str) -> int:
    x, y, z, t = table_arrays(n).T
    return mask_from_bits(VECTOR_FORMS[kind](x, y, z, t, (n - 1) // 2))


@lru_cache(maxsize=None)
def builtin_rule(kind: str, n: int) -> DecisionRule:
    """Return a named rule (``IbyI``, ``PbyP``, ``CbyC``, ``R0``, ``R1``..., ``constant0/1``)."""
    check_committee_size(n)
    canonical_kind = ALIASES.get(kind.lower())
    if canonical_kind is None:
        raise DomainError(f"unknown rule {kind!r}; expected one of "
                          "IbyI, PbyP, CbyC, R0, R1, R2, R3, constant0, constant1")
    if canonical_kind == "constant0":
        return DecisionRule(n, 0, "custom", "constant0")
    if canonical_kind == "constant1":
        return DecisionRule(n, (1 << len(enumerate_tables(n))) - 1, "custom", "constant1")
    return DecisionRule(n, _mask_from(n, canonical_kind),
                        canonical_kind, canonical_kind)


def custom_rule(n: int, accept, name: str = "custom") -> DecisionRule:
    """Build a custom rule from an iterable of accepted tables."""
    space = enumerate_tables(n)
    bits = np.zeros(len(space), dtype=bool)
    for a in accept:
        bits[space.index(check_table(a, n))] = True
    return DecisionRule(n, mask_from_bits(bits), "custom", name)


def rule_from_predicate(n: int, predicate, name: str = "custom") -> DecisionRule:
    """Build a custom rule from ``predicate(table) -> bool``."""
    bits = [bool(predicate(a)) for a in enumerate_tables(n)]
    return DecisionRule(n, mask_from_bits(bits), "custom", name)


def apply_rule(rule: DecisionRule, a) -> int:
    """Decision of ``rule`` on table ``a``: 1 accepts P∧Q, 0 rejects."""
    a = check_table(a, rule.n)
    if rule.kind in PREDICATES:
        return int(PREDICATES[rule.kind](*a, a.m))
    return rule.mask >> rule.space.index(a) & 1


class ScoreKind(enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


def score(kind, a) -> int:
    """Integer score whose positivity reproduces R1, R2 or R3.

    ``S1 = x + min(y, z) - m``, ``S2 = x + floor(min(y, z) / 2) - m``,
    ``S3 = x - m``; hence ``S3 <= S2 <= S1`` on every table.
    """
    kind = ScoreKind(kind.value if isinstance(kind, ScoreKind) else kind)
    x, y, z, t = a = check_table(a)
    if a.n < 3 or a.n % 2 == 0:
        raise DomainError(f"table {tuple(a)} does not have an odd size >= 3")
    m = a.m
    if kind is ScoreKind.S1:
        return x + min(y, z) - m
    if kind is ScoreKind.S2:
        return x + min(y, z) // 2 - m
    return x - m


@dataclass(frozen=True)
class AdmissibilityResult:
    """Outcome of :func:`is_admissible`; truthy iff the rule is admissible."""

    admissible: bool
    condition: str | None = None
    witness: tuple[ContingencyTable, ContingencyTable] | None = None

    def __bool__(self) -> bool:
        return self.admissible


def is_admissible(rule: DecisionRule) -> AdmissibilityResult:
    """Check transposition symmetry and monotonicity along covering pairs.

    On failure the result names the broken condition (``"symmetry"`` or
    ``"monotonicity"``) and a witness pair ``(a, b)``: for symmetry ``b`` is the
    transpose of ``a``; for monotonicity ``b`` covers ``a`` while
    ``rule(a) = 1 > rule(b) = 0``.
    """
    space = rule.space
    bits = rule.bits().tolist()
    for i, a in enumerate(space):
        j = space.index(transpose(a))
        if bits[i] != bits[j]:
            return AdmissibilityResult(False, "symmetry", (a, space[j]))
    for i, a in enumerate(space):
        if not bits[i]:
            continue
        for b in successors(a):
            if not bits[space.index(b)]:
                return AdmissibilityResult(False, "monotonicity", (a, b))
    return AdmissibilityResult(True)


def disagreement_set(rule_a: DecisionRule, rule_b: DecisionRule) -> list[ContingencyTable]:
    """Tables on which the two rules decide differently, in enumeration order."""
    if rule_a.n != rule_b.n:
        raise DomainError(f"rules for different committee sizes: {rule_a.n} vs {rule_b.n}")
    space = rule_a.space
    return [space[i] for i in np.flatnonzero(rule_a.bits() != rule_b.bits())]


class _QuotientOrder:
    """Transposition classes of ``TableSpace(n)`` with up/down closures as bitmasks."""

    def __init__(self, n: int):
        self.classes = transposition_classes(n)
        index = {c: k for k, c in enumerate(self.classes)}
        self.table_masks = []
        space = enumerate_tables(n)
        for c in self.classes:
            self.table_masks.append((1 << space.index(c)) | (1 << space.index(transpose(c))))
        up = [set() for _ in self.classes]
        for k, c in enumerate(self.classes):
            for rep in {c, transpose(c)}:
                for b in successors(rep):
                    up[k].add(index[canonical(b)])
        size = len(self.classes)
        self.above = [0] * size
        for k in sorted(range(size), key=lambda k: -rank(self.classes[k])):
            closure = 1 << k
            for j in up[k]:
                closure |= self.above[j]
            self.above[k] = closure
        self.below = [0] * size
        for k in range(size):
            for j in range(size):
                if self.above[k] >> j & 1:
                    self.below[j] |= 1 << k
        self.full = (1 << size) - 1

    def count_upsets(self) -> int:
        @lru_cache(maxsize=None)
        def count(rem: int) -> int:
            if not rem:
                return 1
            e = (rem & -rem).bit_length() - 1
            return count(rem & ~self.above[e]) + count(rem & ~self.below[e])

        return count(self.full)

    def upsets(self) -> Iterator[int]:
        stack = [(self.full, 0)]
        while stack:
            rem, chosen = stack.pop()
            if not rem:
                yield chosen
                continue
            e = (rem & -rem).bit_length() - 1
            # Pushed second so the branch excluding e is explored first.
            stack.append((rem & ~self.above[e], chosen | (self.above[e] & rem)))
            stack.append((rem & ~self.below[e], chosen))

    def to_table_mask(self, upset: int) -> int:
        mask = 0
        k = 0
        while upset:
            if upset & 1:
                mask |= self.table_masks[k]
            upset >>= 1
            k += 1
        return mask


class AdmissibleRules:
    """All admissible rules for one committee size: ``count`` plus lazy iteration."""

    def __init__(self, n: int):
        self.n = n
        self._order = _QuotientOrder(n)
        self.count = self._order.count_upsets()

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[DecisionRule]:
        for k, upset in enumerate(self._order.upsets()):
            yield DecisionRule(self.n, self._order.to_table_mask(upset),
                               "custom", f"admissible[{k}]")


def enumerate_admissible(n: int) -> AdmissibleRules:
    """Every monotone, transposition-symmetric rule for ``n <= 7``.

    Rules are order ideals (up-sets) of the poset of transposition classes,
    generated by branching on the lowest undecided class: putting it in the
    up-set forces everything above it in, leaving it out forces everything
    below it out.
    """
    check_committee_size(n)
    if n > MAX_ENUMERATION_N:
        raise CapabilityError(
            f"admissible-rule enumeration is limited to n <= {MAX_ENUMERATION_N}; got n={n}")
    return AdmissibleRules(n)


def parse_rule(spec, n: int) -> DecisionRule:
    """Build a rule from a name, a JSON text, or an already decoded JSON object.

    Accepted shapes: ``"IbyI"``, ``{"kind": "IbyI"}``, and
    ``{"n": 7, "kind": "custom", "accept": [[7, 0, 0, 0], ...]}``.
    """
    if isinstance(spec, DecisionRule):
        if spec.n != n:
            raise DomainError(f"rule is for n={spec.n}, expected n={n}")
        return spec
    if isinstance(spec, str):
        text = spec.strip()
        if not text.startswith("{"):
            return builtin_rule(text, n)
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(
                f"rule spec parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("rule spec must be an object with a 'kind' field")
    if "n" in spec and spec["n"] != n:
        raise DomainError(f"rule spec is for n={spec['n']}, expected n={n}")
    kind = spec["kind"]
    if str(kind).lower() == "custom":
        if "accept" not in spec:
            raise DomainError("custom rule spec needs an 'accept' list of tables")
        tables = [ContingencyTable.from_json(a, n) for a in spec["accept"]]
        return custom_rule(n, tables, spec.get("name", "custom"))
    return builtin_rule(str(kind), n)
