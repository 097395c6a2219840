"""Length-based monotone sentence alignment (Gale-Church style) and map algebra.

Beads group ``m`` source segments with ``n`` target segments.  The aligner
searches the inventory ``(1,1) (1,0) (0,1) (2,1) (1,2) (2,2)``; maps built by
:func:`compose` may contain larger beads, since composing two alignments
merges every chain of overlapping groups into one unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .textproc import tokenize

BeadType = tuple[int, int]

BEAD_INVENTORY: tuple[BeadType, ...] = ((1, 1), (1, 0), (0, 1), (2, 1), (1, 2), (2, 2))
# exact-cost ties: (1,1) first, then lexicographic (m, n)
TIE_ORDER: tuple[BeadType, ...] = ((1, 1),) + tuple(sorted(b for b in BEAD_INVENTORY if b != (1, 1)))

# Gale & Church (1993) bead probabilities, each direction of a symmetric pair
# taking the published value, rescaled so the distribution sums to one.
_RAW_PRIORS = {(1, 1): 0.89, (1, 0): 0.0099, (0, 1): 0.0099, (2, 1): 0.089, (1, 2): 0.089, (2, 2): 0.011}
DEFAULT_PRIORS: dict[BeadType, float] = {k: v / sum(_RAW_PRIORS.values()) for k, v in _RAW_PRIORS.items()}

TAIL_FLOOR = 1e-12
LARGE_INPUT = 5000
LARGE_INPUT_BAND = 200
REFINE_CORRIDOR = 3


class AlignmentError(ValueError):
    """Invalid aligner input, parameters, or map."""


class ContractViolation(AlignmentError):
    pass


@dataclass(frozen=True)
class AlignerParams:
    bead_priors: dict = field(default_factory=lambda: dict(DEFAULT_PRIORS))
    length_ratio_mean: float = 1.0
    length_ratio_var: float = 6.8
    lexical_pass: bool = False
    lexical_weight: float = 0.5
    band_width: int | None = None

    def __post_init__(self):
        priors = {tuple(k): float(v) for k, v in self.bead_priors.items()}
        object.__setattr__(self, "bead_priors", priors)
        for bead, p in priors.items():
            if bead not in BEAD_INVENTORY:
                raise AlignmentError(f"bead type {bead} is not in the inventory {BEAD_INVENTORY}")
            if not p > 0:
                raise AlignmentError(f"prior for {bead} must be positive, got {p}")
        if not priors:
            raise AlignmentError("at least one bead type needs a prior")
        if sum(priors.values()) > 1 + 1e-9:
            raise AlignmentError(f"bead priors sum to {sum(priors.values())} > 1")
        if not self.length_ratio_var > 0:
            raise AlignmentError("length_ratio_var must be positive")
        if not self.length_ratio_mean > 0:
            raise AlignmentError("length_ratio_mean must be positive")
        if self.band_width is not None and self.band_width < 1:
            raise AlignmentError("band_width must be >= 1")
        if not 0.0 <= self.lexical_weight <= 1.0:
            raise AlignmentError(f"lexical_weight must lie in [0, 1], got {self.lexical_weight}")

    def replace(self, **changes) -> "AlignerParams":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return AlignerParams(**values)


@dataclass(frozen=True)
class Bead:
    src_span: tuple[int, int]
    tgt_span: tuple[int, int]
    cost: float = 0.0

    @property
    def bead_type(self) -> BeadType:
        return (self.src_span[1] - self.src_span[0], self.tgt_span[1] - self.tgt_span[0])

    def src_range(self) -> range:
        return range(*self.src_span)

    def tgt_range(self) -> range:
        return range(*self.tgt_span)


@dataclass(frozen=True)
class AlignmentMap:
    beads: tuple[Bead, ...]
    src_len: int
    tgt_len: int

    def __post_init__(self):
        object.__setattr__(self, "beads", tuple(self.beads))

    def __len__(self):
        return len(self.beads)

    def __iter__(self):
        return iter(self.beads)

    @property
    def total_cost(self) -> float:
        total = 0.0
        for bead in self.beads:
            total += bead.cost
        return total

    @property
    def bead_types(self) -> list[BeadType]:
        return [b.bead_type for b in self.beads]

    def spans(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return [(b.src_span, b.tgt_span) for b in self.beads]

    def validate(self, inventory: Iterable[BeadType] | None = None) -> "AlignmentMap":
        """Raise ContractViolation unless beads tile both sides monotonically."""
        s = t = 0
        allowed = set(inventory) if inventory is not None else None
        for k, bead in enumerate(self.beads):
            (s0, s1), (t0, t1) = bead.src_span, bead.tgt_span
            if s0 != s or t0 != t:
                raise ContractViolation(f"bead {k} starts at ({s0}, {t0}), expected ({s}, {t})")
            if s1 < s0 or t1 < t0:
                raise ContractViolation(f"bead {k} has a reversed span")
            if s1 == s0 and t1 == t0:
                raise ContractViolation(f"bead {k} is empty on both sides")
            if allowed is not None and bead.bead_type not in allowed:
                raise ContractViolation(f"bead {k} has type {bead.bead_type} outside the inventory")
            if not bead.cost >= 0 or math.isinf(bead.cost):
                raise ContractViolation(f"bead {k} has invalid cost {bead.cost}")
            s, t = s1, t1
        if s != self.src_len or t != self.tgt_len:
            raise ContractViolation(
                f"beads cover ({s}, {t}) but the map has lengths ({self.src_len}, {self.tgt_len})")
        return self

    def to_text(self) -> str:
        lines = [f"#src_len={self.src_len} tgt_len={self.tgt_len}"]
        for b in self.beads:
            lines.append(f"{b.src_span[0]}-{b.src_span[1]}\t{b.tgt_span[0]}-{b.tgt_span[1]}\t{b.cost!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "AlignmentMap":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise AlignmentError("alignment map text lacks the '#src_len=.. tgt_len=..' header")
        header = dict(part.split("=", 1) for part in lines[0][1:].split())
        try:
            src_len, tgt_len = int(header["src_len"]), int(header["tgt_len"])
        except (KeyError, ValueError) as exc:
            raise AlignmentError(f"bad alignment map header {lines[0]!r}") from exc
        beads = []
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                src, tgt, cost = line.split("\t")
                s0, s1 = map(int, src.split("-"))
                t0, t1 = map(int, tgt.split("-"))
                beads.append(Bead((s0, s1), (t0, t1), float(cost)))
            except ValueError as exc:
                raise AlignmentError(f"line {lineno}: cannot parse bead {line!r}") from exc
        return cls(tuple(beads), src_len, tgt_len).validate()


def _tail_probability(delta: float) -> float:
    # two-sided standard normal tail 2 * (1 - Phi(|delta|))
    return max(math.erfc(abs(delta) / math.sqrt(2.0)), TAIL_FLOOR)


def length_cost(src_chars: int, tgt_chars: int, bead_type: BeadType, params: AlignerParams | None = None) -> float:
    """Negative log probability of a bead given the character lengths of its two sides.

    ``delta = (tgt - src*c) / sqrt(l * s2)`` with ``l = (src + tgt/c) / 2``;
    a side with zero segments counts as one character.
    """
    params = params or AlignerParams()
    if src_chars < 0 or tgt_chars < 0:
        raise ContractViolation("character counts must be non-negative")
    if src_chars == 0 and tgt_chars == 0:
        raise ContractViolation("length_cost is undefined when both sides are empty")
    bead_type = tuple(bead_type)
    try:
        prior = params.bead_priors[bead_type]
    except KeyError:
        raise ContractViolation(f"no prior for bead type {bead_type}") from None
    m, n = bead_type
    ls = src_chars if m > 0 else 1
    lt = tgt_chars if n > 0 else 1
    c, s2 = params.length_ratio_mean, params.length_ratio_var
    mean = (ls + lt / c) / 2.0
    delta = (lt - ls * c) / math.sqrt(mean * s2)
    return -math.log(prior) - math.log(_tail_probability(delta))


def _check_segments(segments: Sequence[str], side: str):
    if len(segments) == 0:
        raise AlignmentError(f"{side} segment list is empty")
    for k, seg in enumerate(segments):
        if not isinstance(seg, str) or not seg:
            raise AlignmentError(f"{side} segment {k} is empty")


def _prefix(values):
    out = [0]
    for v in values:
        out.append(out[-1] + v)
    return out


CostFn = Callable[[int, int, int, int], float]


def _dp(n: int, m: int, bead_types: Sequence[BeadType], cost_fn: CostFn,
        rows: Sequence[tuple[int, int]] | None = None) -> AlignmentMap:
    """Minimum-cost monotone tiling of an n x m grid.

    ``cost_fn(i0, i1, j0, j1)`` scores the bead covering src[i0:i1] and
    tgt[j0:j1].  ``rows[i] = (lo, hi)`` restricts the reachable cells of row i.
    Candidates are scanned in ``bead_types`` order and replaced only on a
    strictly lower total, so earlier types win exact ties.
    """
    inf = math.inf
    total = [[inf] * (m + 1) for _ in range(n + 1)]
    back: list[list[tuple[int, int, float] | None]] = [[None] * (m + 1) for _ in range(n + 1)]
    total[0][0] = 0.0
    for i in range(n + 1):
        lo, hi = rows[i] if rows is not None else (0, m)
        row = total[i]
        for j in range(max(lo, 0), min(hi, m) + 1):
            if i == 0 and j == 0:
                continue
            best, choice = inf, None
            for a, b in bead_types:
                pi, pj = i - a, j - b
                if pi < 0 or pj < 0:
                    continue
                prev = total[pi][pj]
                if prev == inf:
                    continue
                cost = cost_fn(pi, i, pj, j)
                if prev + cost < best:
                    best, choice = prev + cost, (a, b, cost)
            row[j] = best
            back[i][j] = choice
    if total[n][m] == inf:
        raise AlignmentError("no monotone alignment reachable inside the search band")
    beads = []
    i, j = n, m
    while i or j:
        a, b, cost = back[i][j]
        beads.append(Bead((i - a, i), (j - b, j), cost))
        i, j = i - a, j - b
    return AlignmentMap(_deletions_first(beads[::-1]), n, m)


def _deletions_first(beads: list[Bead]) -> tuple[Bead, ...]:
    """Move deletions ahead of insertions that meet them at the same point.

    Both orders cost the same; fixing one keeps :func:`compose` identity laws exact.
    """
    beads = list(beads)
    swapped = True
    while swapped:
        swapped = False
        for k in range(len(beads) - 1):
            ins, dele = beads[k], beads[k + 1]
            if ins.bead_type[0] == 0 and dele.bead_type[1] == 0:
                (i, _), (j0, j1) = ins.src_span, ins.tgt_span
                (_, i1), _ = dele.src_span, dele.tgt_span
                beads[k] = Bead((i, i1), (j0, j0), dele.cost)
                beads[k + 1] = Bead((i1, i1), (j0, j1), ins.cost)
                swapped = True
    return tuple(beads)


def _band_rows(n: int, m: int, band: int) -> list[tuple[int, int]]:
    # cells with |j - i*m/n| <= band
    rows = []
    for i in range(n + 1):
        centre = i * m / n if n else 0
        rows.append((max(0, math.ceil(centre - band)), min(m, math.floor(centre + band))))
    return rows


def _bead_types(params: AlignerParams) -> list[BeadType]:
    return [b for b in TIE_ORDER if b in params.bead_priors]


def align(src: Sequence[str], tgt: Sequence[str], params: AlignerParams | None = None) -> AlignmentMap:
    """Align two segment sequences; runs :func:`lexical_refine` when ``params.lexical_pass``."""
    params = params or AlignerParams()
    _check_segments(src, "source")
    _check_segments(tgt, "target")
    n, m = len(src), len(tgt)
    src_cum = _prefix(len(s) for s in src)
    tgt_cum = _prefix(len(t) for t in tgt)

    def cost(i0, i1, j0, j1):
        return length_cost(src_cum[i1] - src_cum[i0], tgt_cum[j1] - tgt_cum[j0], (i1 - i0, j1 - j0), params)

    band = params.band_width
    if band is None and max(n, m) >= LARGE_INPUT:
        band = LARGE_INPUT_BAND
    rows = _band_rows(n, m, band) if band is not None else None
    result = _dp(n, m, _bead_types(params), cost, rows)
    if params.lexical_pass:
        result = lexical_refine(result, src, tgt, params)
    return result


def dice(a: set, b: set) -> float:
    """Sørensen-Dice coefficient; 0 when both sets are empty."""
    if not a and not b:
        return 0.0
    return 2.0 * len(a & b) / (len(a) + len(b))


def _corridor(path: AlignmentMap, width: int) -> list[tuple[int, int]]:
    n, m = path.src_len, path.tgt_len
    lo = [m + 1] * (n + 1)
    hi = [-1] * (n + 1)
    for bead in path.beads:
        (s0, s1), (t0, t1) = bead.src_span, bead.tgt_span
        for i in range(s0, s1 + 1):
            lo[i] = min(lo[i], t0)
            hi[i] = max(hi[i], t1)
    rows = []
    for i in range(n + 1):
        window = range(max(0, i - width), min(n, i + width) + 1)
        rows.append((max(0, min(lo[k] for k in window) - width), min(m, max(hi[k] for k in window) + width)))
    return rows


def lexical_refine(alignment: AlignmentMap, src: Sequence[str], tgt: Sequence[str],
                   params: AlignerParams | None = None) -> AlignmentMap:
    """Re-run the search near a first-pass path with token overlap mixed into the cost.

    Bead cost becomes ``(1 - w) * length_cost + w * (1 - dice)`` where dice is
    computed over the lowercased token sets of both sides and ``w`` is
    ``params.lexical_weight``.  The search is confined to ``params.band_width``
    cells (default 3) around the input path.
    """
    params = params or AlignerParams()
    weight = params.lexical_weight
    if not 0.0 <= weight <= 1.0:
        raise AlignmentError(f"lexical_weight must lie in [0, 1], got {weight}")
    if alignment.src_len != len(src) or alignment.tgt_len != len(tgt):
        raise ContractViolation("alignment map does not match the segment lists")
    alignment.validate()
    if weight == 0.0:
        return alignment
    _check_segments(src, "source")
    _check_segments(tgt, "target")
    src_tokens = [frozenset(t.lower() for t in tokenize(s)) for s in src]
    tgt_tokens = [frozenset(t.lower() for t in tokenize(s)) for s in tgt]
    src_cum = _prefix(len(s) for s in src)
    tgt_cum = _prefix(len(t) for t in tgt)

    def cost(i0, i1, j0, j1):
        length = length_cost(src_cum[i1] - src_cum[i0], tgt_cum[j1] - tgt_cum[j0], (i1 - i0, j1 - j0), params)
        overlap = dice(frozenset().union(*src_tokens[i0:i1]), frozenset().union(*tgt_tokens[j0:j1]))
        return (1.0 - weight) * length + weight * (1.0 - overlap)

    width = params.band_width if params.band_width is not None else REFINE_CORRIDOR
    return _dp(len(src), len(tgt), _bead_types(params), cost, _corridor(alignment, width))


def identity_map(k: int) -> AlignmentMap:
    if k < 0:
        raise ContractViolation("identity_map needs k >= 0")
    return AlignmentMap(tuple(Bead((i, i + 1), (i, i + 1), 0.0) for i in range(k)), k, k)


def invert(alignment: AlignmentMap) -> AlignmentMap:
    return AlignmentMap(tuple(Bead(b.tgt_span, b.src_span, b.cost) for b in alignment.beads),
                        alignment.tgt_len, alignment.src_len)


@dataclass(frozen=True)
class ComposedUnit:
    """One connected component of a chained pair of maps."""

    a_span: tuple[int, int]
    b_span: tuple[int, int]
    c_span: tuple[int, int]
    ab_beads: tuple[int, ...]
    bc_beads: tuple[int, ...]
    cost: float


def compose_units(ab: AlignmentMap, bc: AlignmentMap) -> list[ComposedUnit]:
    """Connected components of ``a-group <-> b-indices <-> c-group``.

    Beads that touch no middle index (``(m, 0)`` in ``ab`` or ``(0, n)`` in
    ``bc``) stay separate units unless they fall strictly inside a component,
    in which case they are absorbed to keep spans contiguous.
    """
    if ab.tgt_len != bc.src_len:
        raise ContractViolation(f"cannot compose: middle lengths differ ({ab.tgt_len} != {bc.src_len})")
    units: list[ComposedUnit] = []
    x, y = ab.beads, bc.beads
    i = j = 0
    a_pos = b_pos = c_pos = 0
    while i < len(x) or j < len(y):
        if i < len(x) and x[i].tgt_span[0] == x[i].tgt_span[1]:
            bead = x[i]
            units.append(ComposedUnit(bead.src_span, (b_pos, b_pos), (c_pos, c_pos), (i,), (), bead.cost))
            a_pos = bead.src_span[1]
            i += 1
            continue
        if j < len(y) and y[j].src_span[0] == y[j].src_span[1]:
            bead = y[j]
            units.append(ComposedUnit((a_pos, a_pos), (b_pos, b_pos), bead.tgt_span, (), (j,), bead.cost))
            c_pos = bead.tgt_span[1]
            j += 1
            continue
        # both heads start at b_pos with a non-empty middle span
        xs, ys = [i], [j]
        end_x, end_y = x[i].tgt_span[1], y[j].src_span[1]
        i, j = i + 1, j + 1
        while end_x != end_y:
            if end_x < end_y:
                xs.append(i)
                end_x = x[i].tgt_span[1]
                i += 1
            else:
                ys.append(j)
                end_y = y[j].src_span[1]
                j += 1
        cost = 0.0
        for k in xs:
            cost += x[k].cost
        for k in ys:
            cost += y[k].cost
        a_end, c_end = x[xs[-1]].src_span[1], y[ys[-1]].tgt_span[1]
        units.append(ComposedUnit((a_pos, a_end), (b_pos, end_x), (c_pos, c_end), tuple(xs), tuple(ys), cost))
        a_pos, b_pos, c_pos = a_end, end_x, c_end
    return units


def _merge_overlapping(items: list[list], side: int) -> bool:
    """Merge items whose hulls on ``side`` overlap; True if anything merged."""
    spans = sorted((it for it in items if it[side] is not None), key=lambda it: it[side][0])
    merged = False
    for prev, cur in zip(spans, spans[1:]):
        if cur[side][0] < prev[side][1]:
            for k in (0, 1):
                lo = [sp for sp in (prev[k], cur[k]) if sp is not None]
                cur[k] = (min(x[0] for x in lo), max(x[1] for x in lo)) if lo else None
            cur[2] += prev[2]
            prev[0] = prev[1] = None
            merged = True
    items[:] = [it for it in items if it[0] is not None or it[1] is not None]
    return merged


def compose(ab: AlignmentMap, bc: AlignmentMap) -> AlignmentMap:
    """Coarsest common refinement of two chained maps, as an a -> c map.

    Beads are the connected components of the chained relation projected on
    the outer sides.  Components nested inside another one's span are folded
    into it, and unlinked indices become deletion or insertion beads, with
    deletions first where the two meet.  Middle indices linked to neither
    outer side vanish.

    Associative whenever the inner maps of a chain have no null beads.  An
    inner insertion can be forced into a component on one grouping while
    staying unlinked on the other.
    """
    if ab.tgt_len != bc.src_len:
        raise ContractViolation(f"cannot compose: middle lengths differ ({ab.tgt_len} != {bc.src_len})")
    na, nb = ab.src_len, ab.tgt_len
    parent = list(range(na + nb + bc.tgt_len))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def link(nodes):
        root = find(nodes[0])
        for x in nodes[1:]:
            parent[find(x)] = root
        return nodes[0]

    owners = []
    for bead in ab.beads:
        nodes = list(bead.src_range()) + [na + j for j in bead.tgt_range()]
        owners.append((link(nodes), bead.cost))
    for bead in bc.beads:
        nodes = [na + j for j in bead.src_range()] + [na + nb + k for k in bead.tgt_range()]
        owners.append((link(nodes), bead.cost))

    comps: dict[int, list] = {}
    for x in range(len(parent)):
        if na <= x < na + nb:
            continue
        side, pos = (0, x) if x < na else (1, x - na - nb)
        item = comps.setdefault(find(x), [None, None, 0.0])
        lo, hi = item[side] or (pos, pos + 1)
        item[side] = (min(lo, pos), max(hi, pos + 1))
    for node, cost in owners:
        root = find(node)
        if root in comps:
            comps[root][2] += cost
    items = list(comps.values())
    while _merge_overlapping(items, 0) | _merge_overlapping(items, 1):
        pass

    deletions = sorted((it for it in items if it[1] is None), key=lambda it: it[0])
    insertions = sorted((it for it in items if it[0] is None), key=lambda it: it[1])
    pairs = sorted((it for it in items if it[0] is not None and it[1] is not None), key=lambda it: it[0])
    beads = []
    i = k = 0
    while deletions or insertions or pairs:
        dele = deletions and deletions[0][0][0] == i
        ins = insertions and insertions[0][1][0] == k
        if dele:
            span, _, cost = deletions.pop(0)
            beads.append(Bead(span, (k, k), cost))
            i = span[1]
        elif ins:
            _, span, cost = insertions.pop(0)
            beads.append(Bead((i, i), span, cost))
            k = span[1]
        elif pairs and pairs[0][0][0] == i and pairs[0][1][0] == k:
            a_span, c_span, cost = pairs.pop(0)
            beads.append(Bead(a_span, c_span, cost))
            i, k = a_span[1], c_span[1]
        else:
            raise ContractViolation(f"composed components cross at ({i}, {k})")
    return AlignmentMap(tuple(beads), ab.src_len, bc.tgt_len)
