"""Adversarial instance families and exact minimax solvers.

A family is a trie of items: instances share arrival prefixes and the
adversary decides where to stop (or which branch to reveal last).  The
deterministic solver runs backward induction over (trie node, knapsack
state) and returns the exact best worst-case ratio with a replayable
witness; the randomized solver handles chain families of large items in
closed form via ratio equalization; the advice solver enumerates covers of
the family by 2^b deterministic strategies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    GENERAL,
    HALF,
    Instance,
    Item,
    ONE,
    SIMPLE,
    ZERO,
    to_rational,
)
from .oracle import opt_exact

FAMILY_KINDS = ("det2", "three", "prefix", "advice_lb", "exact_lb", "general_values")


class FamilyError(ValueError):
    """Unknown family kind or parameters outside the construction's range."""


class SolverError(RuntimeError):
    """Minimax state space exceeds the configured limit."""


@dataclass(frozen=True)
class TrieNode:
    node_id: str
    item: Item
    terminal: bool
    children: tuple["TrieNode", ...] = ()


@dataclass(frozen=True)
class ChainFamily:
    """Trie of items with terminal markers; terminals are the instances."""

    kind: str
    params: Mapping[str, object]
    roots: tuple[TrieNode, ...]
    instance_kind: str = SIMPLE
    labels: tuple[str, ...] = ()

    def _walk(self):
        """Yield (node, items-along-path) for terminals, in DFS preorder.

        Iterative: chains can be far deeper than the recursion limit.
        """
        stack = [(root, ()) for root in reversed(self.roots)]
        while stack:
            node, prefix = stack.pop()
            path = prefix + (node.item,)
            if node.terminal:
                yield node, path
            for child in reversed(node.children):
                stack.append((child, path))

    def instances(self) -> tuple[Instance, ...]:
        out = []
        for i, (node, items) in enumerate(self._walk()):
            name = self.labels[i] if i < len(self.labels) else f"{self.kind}[{i}]"
            out.append(Instance(items, self.instance_kind, name))
        return tuple(out)

    def terminal_ids(self) -> tuple[str, ...]:
        return tuple(node.node_id for node, _ in self._walk())

    @property
    def is_chain(self) -> bool:
        node = self.roots[0] if len(self.roots) == 1 else None
        while node is not None:
            if len(node.children) > 1:
                return False
            node = node.children[0] if node.children else None
        return len(self.roots) == 1

    def chain_items(self) -> tuple[Item, ...]:
        if not self.is_chain:
            raise FamilyError("family is not a pure prefix chain")
        items = []
        node = self.roots[0]
        while True:
            items.append(node.item)
            if not node.terminal:
                raise FamilyError("chain solvers need every prefix to be an instance")
            if not node.children:
                return tuple(items)
            node = node.children[0]


def _simple_item(size: Fraction) -> Item:
    return Item(size, size)


def _chain(kind, params, sizes, labels, instance_kind=SIMPLE, values=None) -> ChainFamily:
    node = None
    n = len(sizes)
    for i in range(n - 1, -1, -1):
        item = Item(sizes[i], sizes[i] if values is None else values[i])
        node = TrieNode(
            node_id=str(i),
            item=item,
            terminal=True,
            children=(node,) if node is not None else (),
        )
    return ChainFamily(kind, params, (node,), instance_kind, tuple(labels))


def generate_family(kind: str, **params) -> ChainFamily:
    """Build one of the lower-bound families.

    det2(eps): (1/2+eps) and (1/2+eps, 1).
    three(eps): prefixes of (1/2+eps, 3/4, 1).
    prefix(n, eps): prefixes of (1/2+eps, 1/2+1/2n, ..., 1/2+n/2n).
    advice_lb(n, eps): I_k = (1/3+eps, ..., 1/3+eps^{k-1}, 2/3-eps^{k-1}).
    exact_lb(m): I_k = (1/m-1/m^3, 1-k/m+k/m^3) for k = 0..m.
    general_values(k): unit-size items with values 1, 2, ..., 2^{k-1}.

    For det2/three/prefix, eps = 0 selects the limit form of the family
    (first size exactly 1/2); only the chain solver, which enforces
    single-copy packing structurally, should consume those.
    """
    params = {k: (v if isinstance(v, int) else to_rational(v)) for k, v in params.items()}

    def need_eps(upper: Fraction, allow_zero: bool) -> Fraction:
        eps = params.get("eps")
        if eps is None:
            raise FamilyError(f"{kind} requires an eps parameter")
        eps = to_rational(eps)
        low_ok = eps >= 0 if allow_zero else eps > 0
        if not (low_ok and eps < upper):
            raise FamilyError(
                f"eps={eps} outside the valid range "
                f"{'[0' if allow_zero else '(0'}, {upper}) for {kind}"
            )
        return eps

    if kind == "det2":
        eps = need_eps(HALF, allow_zero=True)
        sizes = [HALF + eps, ONE]
        return _chain(kind, {"eps": eps}, sizes, ["det2[1]", "det2[2]"])

    if kind == "three":
        eps = need_eps(Fraction(1, 4), allow_zero=True)
        sizes = [HALF + eps, Fraction(3, 4), ONE]
        return _chain(kind, {"eps": eps}, sizes, [f"three[{i}]" for i in (1, 2, 3)])

    if kind == "prefix":
        n = int(params.get("n", 0))
        if n < 1:
            raise FamilyError("prefix requires n >= 1")
        eps = need_eps(Fraction(1, 2 * n), allow_zero=True)
        sizes = [HALF + eps] + [HALF + Fraction(k, 2 * n) for k in range(1, n + 1)]
        labels = [f"prefix[{k}]" for k in range(n + 1)]
        return _chain(kind, {"n": n, "eps": eps}, sizes, labels)

    if kind == "advice_lb":
        n = int(params.get("n", 0))
        if n < 2:
            raise FamilyError("advice_lb requires n >= 2")
        eps = need_eps(Fraction(1, 6), allow_zero=False)
        third = Fraction(1, 3)
        node = None  # built bottom-up; the deepest small has only its closer
        for j in range(n - 1, 0, -1):
            closer = TrieNode(
                node_id=f"close{j}",
                item=_simple_item(Fraction(2, 3) - eps**j),
                terminal=True,
            )
            children = (closer,) if node is None else (closer, node)
            node = TrieNode(
                node_id=f"small{j}",
                item=_simple_item(third + eps**j),
                terminal=False,
                children=children,
            )
        labels = tuple(f"advice_lb[{k}]" for k in range(2, n + 1))
        return ChainFamily(kind, {"n": n, "eps": eps}, (node,), SIMPLE, labels)

    if kind == "exact_lb":
        m = int(params.get("m", 0))
        if m < 2:
            raise FamilyError("exact_lb requires m >= 2")
        first = Fraction(1, m) - Fraction(1, m**3)
        children = tuple(
            TrieNode(
                node_id=f"close{k}",
                item=_simple_item(ONE - Fraction(k, m) + Fraction(k, m**3)),
                terminal=True,
            )
            for k in range(m + 1)
        )
        root = TrieNode(node_id="first", item=_simple_item(first), terminal=False,
                        children=children)
        labels = tuple(f"exact_lb[{k}]" for k in range(m + 1))
        return ChainFamily(kind, {"m": m}, (root,), SIMPLE, labels)

    if kind == "general_values":
        k = int(params.get("k", 0))
        if k < 1:
            raise FamilyError("general_values requires k >= 1")
        sizes = [ONE] * k
        values = [Fraction(2**i) for i in range(k)]
        labels = [f"general_values[{i}]" for i in range(1, k + 1)]
        return _chain(kind, {"k": k}, sizes, labels, GENERAL, values)

    raise FamilyError(f"unknown family kind {kind!r}; known: {', '.join(FAMILY_KINDS)}")


@dataclass(frozen=True)
class MinimaxResult:
    """ratio None means unbounded.  Deterministic results carry a witness
    mapping (node_id, fill, gain) -> count (for simple instances gain equals
    fill, so the fill state is complete); randomized ones carry the
    acceptance probabilities; advice results carry the instance grouping."""

    ratio: Fraction | None
    witness: Mapping[tuple[str, Fraction, Fraction], int] | None = None
    probabilities: tuple[Fraction, ...] | None = None
    groups: tuple[tuple[str, ...], ...] | None = None

    @property
    def unbounded(self) -> bool:
        return self.ratio is None


def _terminal_opts(family: ChainFamily, allowed=None) -> dict[str, Fraction]:
    opts = {}
    for (node, items), inst in zip(family._walk(), family.instances()):
        if allowed is not None and node.node_id not in allowed:
            continue
        opts[node.node_id] = opt_exact(inst).value
    return opts


def det_minimax(
    family: ChainFamily,
    *,
    allowed_terminals=None,
    max_states: int = 500_000,
) -> MinimaxResult:
    """Exact optimal deterministic ratio against the family.

    Backward induction: at each trie node the algorithm picks the count
    maximizing the minimum, over adversary stops reachable from here, of
    gain/opt.  The reciprocal of that game value is the ratio.
    """
    opts = _terminal_opts(family, allowed_terminals)
    if not opts:
        raise FamilyError("no terminals selected")
    memo: dict[tuple[str, Fraction, Fraction], Fraction | None] = {}
    choice: dict[tuple[str, Fraction, Fraction], int] = {}

    def best(node: TrieNode, fill: Fraction, gain: Fraction):
        """Largest achievable min of gain/opt over stops below node.

        Returns None when no selected terminal is reachable from here.
        """
        key = (node.node_id, fill, gain)
        if key in memo:
            return memo[key]
        if len(memo) > max_states:
            raise SolverError(f"state space exceeds configured limit {max_states}")
        top = int((ONE - fill) // node.item.size)
        best_val = None
        best_count = 0
        for count in range(top + 1):
            fill2 = fill + count * node.item.size
            gain2 = gain + count * node.item.value
            val = None
            if node.node_id in opts:
                opt = opts[node.node_id]
                here = gain2 / opt if opt > 0 else ONE
                val = here
            for child in node.children:
                sub = best(child, fill2, gain2)
                if sub is not None:
                    val = sub if val is None else min(val, sub)
            if val is not None and (best_val is None or val > best_val):
                best_val = val
                best_count = count
        memo[key] = best_val
        choice[key] = best_count
        return best_val

    value = None
    try:
        for root in family.roots:
            sub = best(root, ZERO, ZERO)
            if sub is not None:
                value = sub if value is None else min(value, sub)
    except RecursionError:
        raise SolverError("family too deep for backward induction") from None
    if value is None:
        raise FamilyError("family has no reachable terminal")
    if value == 0:
        return MinimaxResult(ratio=None, witness=dict(choice))
    return MinimaxResult(ratio=ONE / value, witness=dict(choice))


def replay_witness(family: ChainFamily, witness) -> dict[str, Fraction | None]:
    """Per-instance ratios of the witness strategy; None means unbounded."""
    opts = _terminal_opts(family)
    ratios: dict[str, Fraction | None] = {}

    def rec(node: TrieNode, fill: Fraction, gain: Fraction, label_idx: list[int]):
        count = witness.get((node.node_id, fill, gain), 0)
        fill2 = fill + count * node.item.size
        gain2 = gain + count * node.item.value
        if fill2 > 1:
            raise SolverError("witness overfills")
        if node.node_id in opts:
            i = label_idx[0]
            label_idx[0] += 1
            opt = opts[node.node_id]
            name = family.labels[i] if i < len(family.labels) else node.node_id
            if opt == 0:
                ratios[name] = Fraction(1)
            else:
                ratios[name] = opt / gain2 if gain2 > 0 else None
        for child in node.children:
            rec(child, fill2, gain2, label_idx)

    idx = [0]
    for root in family.roots:
        rec(root, ZERO, ZERO, idx)
    return ratios


def det_minimax_with_advice(family: ChainFamily, b: int, *, max_instances: int = 16) -> MinimaxResult:
    """Best worst-case ratio when an oracle picks one of 2^b deterministic
    strategies per instance.

    Equivalent to covering the instance set with at most 2^b groups and
    playing the optimal deterministic strategy per group; solved exactly by
    enumerating subset covers (the per-subset value is monotone).
    """
    if b < 0:
        raise ValueError("advice bits must be >= 0")
    terminals = family.terminal_ids()
    N = len(terminals)
    if N > max_instances:
        raise SolverError(f"{N} instances exceed the advice solver limit")

    sub_ratio: dict[int, Fraction | None] = {}
    for mask in range(1, 1 << N):
        allowed = {terminals[i] for i in range(N) if mask >> i & 1}
        sub_ratio[mask] = det_minimax(family, allowed_terminals=allowed).ratio

    full = (1 << N) - 1
    parts = min(1 << b, N)
    # cover[mask] = (best achievable max-ratio over groups so far, groups)
    cover: dict[int, tuple] = {0: (Fraction(0), ())}
    for _ in range(parts):
        nxt: dict[int, tuple] = dict(cover)
        for mask, (val, groups) in cover.items():
            rest = full & ~mask
            if rest == 0:
                continue
            sub = rest
            while sub:
                r = sub_ratio[sub]
                cand = None if (r is None or val is None) else max(val, r)
                new_mask = mask | sub
                cur = nxt.get(new_mask)
                better = (
                    cur is None
                    or (cur[0] is None and cand is not None)
                    or (cur[0] is not None and cand is not None and cand < cur[0])
                )
                if better:
                    nxt[new_mask] = (cand, groups + (sub,))
                sub = (sub - 1) & rest
        cover = nxt
    best_val, best_groups = cover.get(full, (None, ()))
    groups_labels = tuple(
        tuple(family.labels[i] for i in range(N) if g >> i & 1) for g in best_groups
    )
    return MinimaxResult(ratio=best_val, groups=groups_labels)


def chain_gains(family: ChainFamily) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """(per-step single-copy gains, per-prefix optima) for a chain family.

    Every item must have size >= 1/2; acceptance at step k packs exactly one
    copy (sizes strictly above 1/2 cannot repeat, and the eps -> 0 limit
    families are pinned to one copy structurally).
    """
    items = family.chain_items()
    gains = []
    opts = []
    best = ZERO
    for item in items:
        if item.size < HALF:
            raise FamilyError(f"chain solver needs sizes >= 1/2, got {item.size}")
        gains.append(item.size)
        best = max(best, item.size)
        opts.append(best)
    return tuple(gains), tuple(opts)


def chain_expected_ratios(
    family: ChainFamily, probs: Sequence[Fraction]
) -> tuple[Fraction | None, ...]:
    """Exact expected ratios per prefix for per-step acceptance mass probs.

    E[gain on I_k] = sum_{j<=k} p_j g_j; ratio None where the expectation
    vanishes (unbounded).
    """
    gains, opts = chain_gains(family)
    if len(probs) != len(gains):
        raise FamilyError(f"need {len(gains)} probabilities, got {len(probs)}")
    total = sum(probs, ZERO)
    if total > 1:
        raise FamilyError(f"probabilities sum to {total} > 1")
    ratios = []
    e = ZERO
    for g, opt, p in zip(gains, opts, probs):
        e += p * g
        ratios.append(opt / e if e > 0 else None)
    return tuple(ratios)


def rand_minimax_chain(family: ChainFamily, *, verify: bool = True) -> MinimaxResult:
    """Optimal randomized ratio on a chain family by ratio equalization.

    Equalizing all prefix ratios gives c = opt_0/g_0 + sum_k (opt_k -
    opt_{k-1})/g_k with acceptance mass p_k = (opt_k - opt_{k-1})/(c g_k);
    the masses sum to 1 by construction.  Shifting any mass between steps
    makes some prefix strictly worse, so c is optimal.
    """
    gains, opts = chain_gains(family)
    terms = []
    prev_opt = ZERO
    for g, opt in zip(gains, opts):
        terms.append((opt - prev_opt) / g)
        prev_opt = opt

    def dc_sum(lo: int, hi: int) -> Fraction:
        # balanced summation keeps the big-integer work near the leaves
        if hi - lo == 1:
            return terms[lo]
        mid = (lo + hi) // 2
        return dc_sum(lo, mid) + dc_sum(mid, hi)

    c = dc_sum(0, len(terms))
    inv_c = ONE / c
    probs = tuple(t * inv_c for t in terms)
    if verify and len(gains) <= 256:
        ratios = chain_expected_ratios(family, probs)
        if any(r != c for r in ratios):
            raise SolverError("equalization failed to produce equal ratios")
    return MinimaxResult(ratio=c, probabilities=probs)


@dataclass(frozen=True)
class DistinctDecisions:
    """Optimal first-item multiplicities across an exact_lb family."""

    count: int
    required_bits: int
    per_instance: Mapping[str, tuple[int, ...]]


def distinct_first_decisions(family: ChainFamily) -> DistinctDecisions:
    """Count the distinct first-item multiplicities that are optimal
    somewhere in the family and the advice bits they force.

    For each instance, every first-item count whose best completion reaches
    the optimum is recorded (checked via the oracle on the suffix).
    """
    if family.kind != "exact_lb":
        raise FamilyError("distinct_first_decisions expects an exact_lb family")
    per_instance: dict[str, tuple[int, ...]] = {}
    union: set[int] = set()
    for inst in family.instances():
        first = inst.items[0]
        suffix = Instance(inst.items[1:], inst.kind)
        opt_val = opt_exact(inst).value
        winners = []
        for count in range(first.max_copies + 1):
            rest = opt_exact(suffix, capacity=ONE - count * first.size).value
            if count * first.value + rest == opt_val:
                winners.append(count)
        per_instance[inst.name] = tuple(winners)
        union.update(winners)
    count = len(union)
    bits = max(0, (count - 1).bit_length()) if count else 0
    return DistinctDecisions(count=count, required_bits=bits, per_instance=per_instance)


def uniform_bit_worst_ratios(eps) -> dict[Fraction, Fraction | None]:
    """Worst exact expected ratio on det2(eps) for each acceptance
    probability available to one uniformly random bit (0, 1/2, 1).

    The second step gets the entire leftover mass, the kindest case for the
    algorithm; None marks an unbounded ratio.
    """
    family = generate_family("det2", eps=eps)
    out: dict[Fraction, Fraction | None] = {}
    for p in (ZERO, HALF, ONE):
        ratios = chain_expected_ratios(family, [p, ONE - p])
        worst: Fraction | None = ZERO
        for r in ratios:
            if r is None:
                worst = None
                break
            worst = max(worst, r)
        out[p] = worst
    return out
