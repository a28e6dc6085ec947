"""Deterministic in-memory storage cluster: n nodes hold RS symbols, one
node fails (fully or partially), a repair scheme runs, and every base-field
sub-symbol on the wire is accounted.

Partial erasure keeps some coordinates of the lost symbol relative to the
fixed polynomial storage basis; each surviving coordinate i is exactly one
trace Tr(nu_i * f(alpha*)) for the trace-dual basis element nu_i, which is
how it enters the repair engine as side information.

Helpers are simulated in process: the bandwidth metric counts field
sub-symbols, not packets, so a wire protocol would add noise without adding
fidelity.  Accounting is per repaired symbol (the same scheme serves every
stripe), which keeps event totals directly comparable to the bandwidth
lower bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bounds import lower_bound
from .fields import FieldElement, FieldError
from .linalg import span
from .repair import (
    RepairScheme,
    SideInfo,
    answers_from_symbols,
    bandwidth,
    execute_repair,
    query_plan,
)
from .rs import Codeword, CodeSpec, encode
from .schemes import (
    build_greedy_scheme,
    build_scheme,
    build_subfield_scheme,
    optimize_exhaustive,
)


@dataclass
class NodeState:
    status: str  # "healthy" | "erased" | "partial"
    symbols: list[FieldElement] | None
    surviving: tuple[int, ...] = ()
    surviving_values: list[tuple[int, ...]] = field(default_factory=list)


@dataclass(frozen=True)
class RepairOutcome:
    position: int
    s: int
    method: str
    per_helper: dict[int, int]
    total: int
    bound: int
    gap: int
    success: bool
    stripes: int

    def to_event_json(self) -> dict:
        return {
            "position": self.position,
            "s": self.s,
            "method": self.method,
            "per_helper": {str(j): b for j, b in sorted(self.per_helper.items())},
            "total": self.total,
            "bound": self.bound,
            "gap": self.gap,
        }


@dataclass
class ClusterState:
    spec: CodeSpec
    stripes: int
    nodes: dict[int, NodeState]
    rng_seed: int
    download_counter: dict[tuple[int, int], int] = field(default_factory=dict)
    events: list[RepairOutcome] = field(default_factory=list)
    # Original stripes, kept only to verify that repairs restore exactly.
    provisioned: list[Codeword] = field(default_factory=list)


def provision(
    spec: CodeSpec,
    seed: int = 0,
    count: int = 1,
    messages: list[list[FieldElement]] | None = None,
) -> ClusterState:
    """Encode ``count`` stripes (seeded random messages unless given) and
    place one symbol per node per stripe."""
    tower = spec.tower
    if messages is None:
        rng = random.Random(seed)
        messages = [
            [tower.element(rng.randrange(tower.order)) for _ in range(spec.k)]
            for _ in range(count)
        ]
    if len(messages) != count:
        raise FieldError("message count differs from stripe count")
    stripes = [encode(spec, msg) for msg in messages]
    nodes = {
        j: NodeState(status="healthy", symbols=[cw.symbols[j] for cw in stripes])
        for j in range(spec.n)
    }
    return ClusterState(
        spec=spec, stripes=count, nodes=nodes, rng_seed=seed, provisioned=stripes
    )


def storage_dual_basis(spec: CodeSpec) -> list[FieldElement]:
    """Trace-dual of the polynomial storage basis {1, x, ..., x^(ell-1)}:
    coordinate i of a stored symbol equals Tr(dual[i] * symbol)."""
    tower = spec.tower
    poly_basis = [tower.element(tower.q**i) for i in range(tower.ell)]
    return tower.dual_basis(poly_basis)


def fail_node(
    state: ClusterState, position: int, surviving: tuple[int, ...] | None = None
) -> SideInfo:
    """Erase a node; with ``surviving`` coordinate indices the erasure is
    partial and the kept sub-symbols become side information."""
    if position not in state.nodes:
        raise FieldError(f"no node at position {position}")
    node = state.nodes[position]
    if node.status != "healthy":
        raise FieldError(f"node {position} already failed")
    tower = state.spec.tower
    if not surviving:
        state.nodes[position] = NodeState(status="erased", symbols=None)
        return SideInfo.empty()
    surviving = tuple(sorted(set(surviving)))
    if any(i < 0 or i >= tower.ell for i in surviving):
        raise FieldError("surviving coordinate index out of range")
    dual = storage_dual_basis(state.spec)
    elements = tuple(dual[i] for i in surviving)
    values = []
    assert node.symbols is not None
    for sym in node.symbols:
        digits = tower.top_digits(sym.code)
        values.append(tuple(digits[i] for i in surviving))
    state.nodes[position] = NodeState(
        status="partial",
        symbols=None,
        surviving=surviving,
        surviving_values=values,
    )
    return SideInfo(elements=elements)


def _build_for_method(
    state: ClusterState,
    position: int,
    side: SideInfo,
    method: str,
    m: int | None,
    scheme: RepairScheme | None,
) -> RepairScheme:
    spec = state.spec
    tower = spec.tower
    s = side.s
    if method == "custom":
        if scheme is None:
            raise FieldError("custom method needs an explicit scheme")
        if scheme.star_index != position:
            raise FieldError("custom scheme repairs a different position")
        return scheme
    if s == tower.ell:
        # Side information is already a basis: degenerate zero-check scheme.
        zero_w = span(tower, [])
        return build_scheme(spec, position, side, zero_w, span(tower, []), method).scheme
    if m is None:
        raise FieldError(f"method {method!r} needs the subspace dimension m")
    if method == "subfield":
        return build_subfield_scheme(spec, position, side, m).scheme
    if method == "greedy":
        return build_greedy_scheme(spec, position, side, m).scheme
    if method == "exhaustive":
        best = optimize_exhaustive(spec, position, side, m)
        return build_scheme(
            spec, position, side, best.w_space, best.t_space, "exhaustive"
        ).scheme
    raise FieldError(f"unknown repair method {method!r}")


def run_repair(
    state: ClusterState,
    position: int,
    method: str = "subfield",
    m: int | None = None,
    scheme: RepairScheme | None = None,
) -> RepairOutcome:
    """Repair a failed node across all stripes and account the downloads."""
    node = state.nodes.get(position)
    if node is None:
        raise FieldError(f"no node at position {position}")
    if node.status == "healthy":
        raise FieldError(f"node {position} is healthy; nothing to repair")
    spec = state.spec
    tower = spec.tower

    if node.status == "partial":
        dual = storage_dual_basis(spec)
        side = SideInfo(elements=tuple(dual[i] for i in node.surviving))
        side_values_per_stripe = node.surviving_values
    else:
        side = SideInfo.empty()
        side_values_per_stripe = [() for _ in range(state.stripes)]

    chosen = _build_for_method(state, position, side, method, m, scheme)
    plan = query_plan(chosen)
    report = bandwidth(chosen)

    restored: list[FieldElement] = []
    for stripe in range(state.stripes):
        symbols = {}
        for j in chosen.helper_indices():
            helper = state.nodes[j]
            if helper.status != "healthy" or helper.symbols is None:
                raise FieldError(f"helper {j} unavailable; multi-failure repair unsupported")
            symbols[j] = helper.symbols[stripe]
        answers = answers_from_symbols(plan, symbols)
        restored.append(
            execute_repair(
                chosen, answers, side_values=side_values_per_stripe[stripe], plan=plan
            )
        )

    event_index = len(state.events)
    for j, b in report.per_helper.items():
        state.download_counter[(j, event_index)] = b

    truth = [cw.symbols[position] for cw in state.provisioned]
    success = restored == truth
    state.nodes[position] = NodeState(status="healthy", symbols=restored)
    bnd = lower_bound(tower.q, tower.ell, side.s, spec.n, spec.k).bound
    outcome = RepairOutcome(
        position=position,
        s=side.s,
        method=method,
        per_helper=dict(report.per_helper),
        total=report.total,
        bound=bnd,
        gap=report.total - bnd,
        success=success,
        stripes=state.stripes,
    )
    state.events.append(outcome)
    return outcome


def report(state: ClusterState) -> dict:
    """JSON-ready run report; totals per event match the scheme bandwidth."""
    return {
        "seed": state.rng_seed,
        "stripes": state.stripes,
        "events": [ev.to_event_json() for ev in state.events],
    }
