"""Equational proofs with the multi-hypersubstitution rule, and bounded search.

Proofs are numbered step lists.  Each step names its rule and the earlier
steps it uses; :func:`check_proof` re-derives every conclusion.  The search
engine saturates forward, one generation at a time, and reconstructs a proof
object from recorded provenance, so anything it returns passes the checker.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import (
    FiniteAlgebra,
    find_falsifying_valuation,
    find_multi_hyper_counterexample,
    fixed_by,
)
from .colored import ColoredTerm, parse_colored, recolor, render_colored, strip
from .hypersub import Hypersubstitution, Monoid
from .multihyp import MultiHypersubstitution, apply_mhs, assignment_images
from .terms import (
    Identity,
    MhtkError,
    Position,
    PositionError,
    Signature,
    Term,
    Var,
    depth,
    iter_positions,
    max_var,
    parse_position,
    parse_term,
    render_position,
    render_term,
    replace_at,
    substitute,
    subterm_at,
    subterms,
    variables,
)

# ---------------------------------------------------------------- rules


@dataclass(frozen=True)
class Axiom:
    tag = "axiom"
    premises = ()


@dataclass(frozen=True)
class Refl:
    tag = "refl"
    premises = ()


@dataclass(frozen=True)
class Sym:
    premise: int
    tag = "sym"

    @property
    def premises(self):
        return (self.premise,)


@dataclass(frozen=True)
class Trans:
    first: int
    second: int
    tag = "trans"

    @property
    def premises(self):
        return (self.first, self.second)


@dataclass(frozen=True)
class VarSubst:
    """From t ≈ s infer t(x←r) ≈ s(x←r)."""

    premise: int
    var: int
    term: Term
    tag = "subst"

    @property
    def premises(self):
        return (self.premise,)


@dataclass(frozen=True)
class Replace:
    """From t' ≈ s' and a context r with r|p = t', infer r(p;s') ≈ r."""

    premise: int
    context: Term
    position: Position
    tag = "replace"

    @property
    def premises(self):
        return (self.premise,)


@dataclass(frozen=True)
class MhRule:
    """From t ≈ s infer ρ̄[⟨t,α_t⟩] ≈ ρ̄[⟨s,α_s⟩]; the colored sources carry the colorations."""

    premise: int
    rho: MultiHypersubstitution
    lhs: ColoredTerm
    rhs: ColoredTerm
    tag = "mh"

    @property
    def premises(self):
        return (self.premise,)


Rule = Axiom | Refl | Sym | Trans | VarSubst | Replace | MhRule


@dataclass(frozen=True)
class ProofStep:
    conclusion: Identity
    rule: Rule


@dataclass(frozen=True)
class Proof:
    steps: tuple
    goal: Identity

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps or self.steps[-1].conclusion != self.goal:
            raise ValueError("the last step of a proof must conclude the goal")

    def __len__(self):
        return len(self.steps)

    def render(self) -> str:
        return render_proof(self)


class ProofRejected(MhtkError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step + 1}: {reason}")
        self.step = step
        self.reason = reason


# ---------------------------------------------------------------- checking


def _rho_in(m: Monoid, rho: MultiHypersubstitution) -> Hypersubstitution | None:
    for sigma in list(rho.table.values()) + [rho.default]:
        if sigma not in m:
            return sigma
    return None


def check_step(sigma: set, steps: Sequence[ProofStep], k: int, m: Monoid) -> None:
    step = steps[k]
    rule, c = step.rule, step.conclusion
    for i in rule.premises:
        if not 0 <= i < k:
            raise ProofRejected(k, f"premise {i + 1} does not precede the step")
    prem = [steps[i].conclusion for i in rule.premises]
    try:
        m.sig.check(c.lhs)
        m.sig.check(c.rhs)
    except MhtkError as exc:
        raise ProofRejected(k, str(exc)) from None

    def need(ok: bool, reason: str):
        if not ok:
            raise ProofRejected(k, reason)

    if isinstance(rule, Axiom):
        need(c in sigma, "not an axiom")
    elif isinstance(rule, Refl):
        need(c.lhs == c.rhs, "reflexivity needs identical sides")
    elif isinstance(rule, Sym):
        need(c == prem[0].swapped(), "not the mirror of its premise")
    elif isinstance(rule, Trans):
        a, b = prem
        need(a.rhs == b.lhs, "middle terms differ")
        need(c == Identity(a.lhs, b.rhs), "conclusion does not chain the premises")
    elif isinstance(rule, VarSubst):
        p = prem[0]
        need(rule.var in variables(p.lhs) | variables(p.rhs), f"x{rule.var} occurs in neither side")
        images = {rule.var: rule.term}
        need(
            c == Identity(substitute(p.lhs, images), substitute(p.rhs, images)),
            "conclusion is not the substitution instance",
        )
    elif isinstance(rule, Replace):
        p = prem[0]
        try:
            found = subterm_at(rule.context, rule.position)
        except PositionError as exc:
            raise ProofRejected(k, str(exc)) from None
        need(found == p.lhs, "context does not contain the premise's left side at that position")
        need(
            c == Identity(replace_at(rule.context, rule.position, p.rhs), rule.context),
            "conclusion is not the replacement",
        )
    elif isinstance(rule, MhRule):
        p = prem[0]
        need(strip(rule.lhs) == p.lhs and strip(rule.rhs) == p.rhs, "colored sources do not match the premise")
        outside = _rho_in(m, rule.rho)
        need(outside is None, f"ρ uses {outside.short() if outside else ''} outside the monoid")
        need(
            c == Identity(strip(apply_mhs(rule.rho, rule.lhs)), strip(apply_mhs(rule.rho, rule.rhs))),
            "conclusion is not the ρ-image of the premise",
        )
    else:
        raise ProofRejected(k, f"unknown rule {rule!r}")


def check_proof(sigma: Iterable[Identity], proof: Proof, m: Monoid) -> None:
    """Raise :class:`ProofRejected` at the first invalid step."""
    sigma = set(sigma)
    for k in range(len(proof.steps)):
        check_step(sigma, proof.steps, k, m)
    if proof.steps[-1].conclusion != proof.goal:
        raise ProofRejected(len(proof.steps) - 1, "last step does not conclude the goal")


def proof_ok(sigma, proof, m) -> bool:
    try:
        check_proof(sigma, proof, m)
    except ProofRejected:
        return False
    return True


# ---------------------------------------------------------------- text form


def _render_rho(rho: MultiHypersubstitution) -> str:
    def maps(s):
        return "; ".join(f"{f}->{render_term(s.mapping[f])}" for f in s.sig.symbols)

    parts = [f"{q}: {maps(s)}" for q, s in rho.table.items()]
    parts.append(f"default: {maps(rho.default)}")
    return "[" + " | ".join(parts) + "]"


def _parse_rho(text: str, m: Monoid) -> MultiHypersubstitution:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise MhtkError(f"malformed ρ: {text!r}")
    table, default = {}, None
    for part in body[1:-1].split("|"):
        key, _, maps = part.partition(":")
        mapping = {}
        for item in maps.split(";"):
            f, _, t = item.partition("->")
            mapping[f.strip()] = parse_term(t.strip(), m.sig)
        sigma = Hypersubstitution(m.sig, mapping)
        if key.strip() == "default":
            default = sigma
        else:
            table[int(key)] = sigma
    if default is None:
        raise MhtkError("ρ without a default entry")
    return MultiHypersubstitution(table, default, m)


def render_rule(rule: Rule) -> str:
    ps = " ".join(str(i + 1) for i in rule.premises)
    if isinstance(rule, VarSubst):
        return f"subst {ps} x{rule.var} := {render_term(rule.term)}"
    if isinstance(rule, Replace):
        return f"replace {ps} ctx={render_term(rule.context)} pos={render_position(rule.position)}"
    if isinstance(rule, MhRule):
        return (
            f"mh {ps} lhs={render_colored(rule.lhs)} rhs={render_colored(rule.rhs)} rho={_render_rho(rule.rho)}"
        )
    return f"{rule.tag} {ps}".strip()


def render_proof(proof: Proof) -> str:
    lines = [f"{k}. {step.conclusion}  [{render_rule(step.rule)}]" for k, step in enumerate(proof.steps, 1)]
    return "\n".join(lines) + "\n"


_STEP_RE = re.compile(r"^\s*(\d+)\.\s+(.*?)\s+\[(.*)\]\s*$")


def parse_proof(text: str, m: Monoid) -> Proof:
    sig = m.sig
    steps = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        match = _STEP_RE.match(line)
        if not match:
            raise MhtkError(f"malformed proof line: {line!r}")
        lhs, _, rhs = match.group(2).partition(" = ")
        concl = Identity(parse_term(lhs, sig), parse_term(rhs, sig))
        tag, _, rest = match.group(3).partition(" ")
        rest = rest.strip()
        if tag == "axiom":
            rule = Axiom()
        elif tag == "refl":
            rule = Refl()
        elif tag == "sym":
            rule = Sym(int(rest) - 1)
        elif tag == "trans":
            a, b = rest.split()
            rule = Trans(int(a) - 1, int(b) - 1)
        elif tag == "subst":
            mm = re.fullmatch(r"(\d+)\s+x(\d+)\s*:=\s*(.+)", rest)
            if not mm:
                raise MhtkError(f"malformed subst rule: {rest!r}")
            rule = VarSubst(int(mm.group(1)) - 1, int(mm.group(2)), parse_term(mm.group(3), sig))
        elif tag == "replace":
            mm = re.fullmatch(r"(\d+)\s+ctx=(\S+)\s+pos=(\S*)", rest)
            if not mm:
                raise MhtkError(f"malformed replace rule: {rest!r}")
            rule = Replace(int(mm.group(1)) - 1, parse_term(mm.group(2), sig), parse_position(mm.group(3)))
        elif tag == "mh":
            mm = re.fullmatch(r"(\d+)\s+lhs=(\S+)\s+rhs=(\S+)\s+rho=(\[.*\])", rest)
            if not mm:
                raise MhtkError(f"malformed mh rule: {rest!r}")
            rule = MhRule(
                int(mm.group(1)) - 1,
                _parse_rho(mm.group(4), m),
                parse_colored(mm.group(2), sig),
                parse_colored(mm.group(3), sig),
            )
        else:
            raise MhtkError(f"unknown rule tag {tag!r}")
        steps.append(ProofStep(concl, rule))
    if not steps:
        raise MhtkError("empty proof")
    return Proof(tuple(steps), steps[-1].conclusion)


# ---------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchBudget:
    max_term_depth: int = 3
    max_identity_count: int = 2000
    max_steps: int = 4
    color_palette: tuple = (1, 2, 3)

    def __post_init__(self):
        palette = tuple(sorted(set(self.color_palette)))
        object.__setattr__(self, "color_palette", palette)
        if self.max_term_depth < 1 or self.max_identity_count < 1 or self.max_steps < 1:
            raise ValueError("budget bounds must be positive")
        if not palette or palette[0] < 1:
            raise ValueError("color palette must be a nonempty set of positive colors")

    @classmethod
    def parse(cls, text: str) -> SearchBudget:
        """``depth=3,count=2000,steps=4,palette=3`` (palette=k means colors 1..k)."""
        names = {"depth": "max_term_depth", "count": "max_identity_count", "steps": "max_steps"}
        kwargs = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            key, _, value = item.partition("=")
            key = key.strip()
            if not value.strip().isdigit():
                raise ValueError(f"budget entry {item!r} needs a natural number")
            if key == "palette":
                kwargs["color_palette"] = tuple(range(1, int(value) + 1))
            elif key in names:
                kwargs[names[key]] = int(value)
            else:
                raise ValueError(f"unknown budget key {key!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found", "saturated" or "exhausted"
    proof: Proof | None = None
    rounds: int = 0
    derived: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


@dataclass(frozen=True)
class Closure:
    identities: frozenset
    exhausted: bool
    rounds: int
    ordered: tuple = field(default=(), compare=False, repr=False)

    def __contains__(self, e):
        return e in self.identities

    def __len__(self):
        return len(self.identities)


class _BudgetHit(Exception):
    pass


class _Saturator:
    """Generation-synchronized forward closure with provenance.

    Provenance entries are (rule name, premise identities, extra data); proof
    indices are assigned only when a proof is reconstructed.
    """

    def __init__(self, sigma: Sequence[Identity], m: Monoid, budget: SearchBudget, goal: Identity | None):
        m.require_explicit()
        self.sigma = list(dict.fromkeys(sigma))
        self.m = m
        self.budget = budget
        self.goal = goal
        self.known: dict[Identity, tuple] = {}
        self.by_lhs = defaultdict(list)
        self.by_rhs = defaultdict(list)
        self.pool = self._term_pool()
        self.occurrences = defaultdict(list)
        for ctx in self.pool:
            for p, u in iter_positions(ctx):
                self.occurrences[u].append((ctx, p))
        self.mh_plans = self._mh_plans()

    def _term_pool(self) -> list[Term]:
        sides = [t for e in self.sigma for t in (e.lhs, e.rhs)]
        if self.goal is not None:
            sides += [self.goal.lhs, self.goal.rhs]
        found = set()
        for t in sides:
            found |= subterms(t)
        # one spare variable lets two variables trade places through substitutions
        k = max(max_var(*sides) if sides else 0, 1) + 1
        found |= {Var(i) for i in range(1, k + 1)}
        D = self.budget.max_term_depth
        return sorted((t for t in found if depth(t) <= D), key=lambda t: (depth(t), render_term(t)))

    def _mh_plans(self):
        palette = self.budget.color_palette
        elements = self.m.elements
        if len(elements) == 1 and elements[0].is_identity():
            return []
        k = min(len(palette), len(elements))
        default = self.m.default_element()
        plans = []
        for subset in combinations(elements, k):
            sub = Monoid.explicit(subset)
            rho = MultiHypersubstitution({palette[j]: s for j, s in enumerate(subset)}, default, self.m)
            plans.append((sub, rho, {j + 1: palette[j] for j in range(k)}))
        return plans

    def add(self, e: Identity, how: tuple) -> bool:
        if e in self.known or e.depth > self.budget.max_term_depth:
            return False
        if len(self.known) >= self.budget.max_identity_count:
            raise _BudgetHit
        self.known[e] = how
        self.by_lhs[e.lhs].append(e)
        self.by_rhs[e.rhs].append(e)
        return True

    def consequences(self, e: Identity):
        yield e.swapped(), ("sym", (e,))
        for e2 in list(self.by_lhs.get(e.rhs, ())):
            yield Identity(e.lhs, e2.rhs), ("trans", (e, e2))
        for e0 in list(self.by_rhs.get(e.lhs, ())):
            yield Identity(e0.lhs, e.rhs), ("trans", (e0, e))
        for x in sorted(variables(e.lhs) | variables(e.rhs)):
            for r in self.pool:
                if r == Var(x):
                    continue
                images = {x: r}
                yield (
                    Identity(substitute(e.lhs, images), substitute(e.rhs, images)),
                    ("subst", (e,), (x, r)),
                )
        for ctx, p in self.occurrences.get(e.lhs, ()):
            yield Identity(replace_at(ctx, p, e.rhs), ctx), ("replace", (e,), (ctx, p))
        D = self.budget.max_term_depth
        for sub, rho, colors in self.mh_plans:
            lhs = assignment_images(sub, e.lhs, max_depth=D)
            rhs = assignment_images(sub, e.rhs, max_depth=D)
            for l_img, l_src in lhs.items():
                if depth(l_img) > D:
                    continue
                for r_img, r_src in rhs.items():
                    if depth(r_img) > D:
                        continue
                    yield (
                        Identity(l_img, r_img),
                        ("mh", (e,), (rho, recolor(l_src, colors), recolor(r_src, colors))),
                    )

    def run(self) -> tuple[str, int]:
        """Saturate; returns (status, rounds)."""
        frontier = []
        try:
            for e in self.sigma:
                if self.add(e, ("axiom", ())):
                    frontier.append(e)
            for t in self.pool:
                e = Identity(t, t)
                if self.add(e, ("refl", ())):
                    frontier.append(e)
            if self.goal is not None and self.goal in self.known:
                return "found", 0
            for rnd in range(1, self.budget.max_steps + 1):
                candidates = [c for e in frontier for c in self.consequences(e)]
                new = []
                for e, how in candidates:
                    if self.add(e, how):
                        new.append(e)
                        if e == self.goal:
                            return "found", rnd
                if not new:
                    return "saturated", rnd
                frontier = new
            return "exhausted", self.budget.max_steps
        except _BudgetHit:
            return "exhausted", -1

    def proof_of(self, goal: Identity) -> Proof:
        index: dict[Identity, int] = {}
        steps: list[ProofStep] = []
        stack = [(goal, False)]
        while stack:
            e, expanded = stack.pop()
            if e in index:
                continue
            how = self.known[e]
            if not expanded:
                stack.append((e, True))
                for p in reversed(how[1]):
                    if p not in index:
                        stack.append((p, False))
                continue
            name, prem = how[0], [index[p] for p in how[1]]
            if name == "axiom":
                rule = Axiom()
            elif name == "refl":
                rule = Refl()
            elif name == "sym":
                rule = Sym(prem[0])
            elif name == "trans":
                rule = Trans(prem[0], prem[1])
            elif name == "subst":
                rule = VarSubst(prem[0], *how[2])
            elif name == "replace":
                rule = Replace(prem[0], *how[2])
            else:
                rule = MhRule(prem[0], *how[2])
            index[e] = len(steps)
            steps.append(ProofStep(e, rule))
        return Proof(tuple(steps), goal)


def prove(sigma: Iterable[Identity], goal: Identity, m: Monoid, budget: SearchBudget | None = None) -> SearchResult:
    """Bounded forward search for a derivation of ``goal``.

    A non-found result is not a refutation: "saturated" means the bounded
    rule set produced nothing new, "exhausted" means a bound was hit first.
    """
    budget = budget or SearchBudget()
    engine = _Saturator(list(sigma), m, budget, goal)
    status, rounds = engine.run()
    proof = engine.proof_of(goal) if status == "found" else None
    return SearchResult(status, proof, rounds, len(engine.known))


def mh_closure_bounded(sigma: Iterable[Identity], m: Monoid, budget: SearchBudget | None = None) -> Closure:
    """Everything the bounded search derives from ``sigma``.  A sound under-approximation."""
    budget = budget or SearchBudget()
    engine = _Saturator(list(sigma), m, budget, None)
    status, rounds = engine.run()
    ordered = tuple(engine.known)
    return Closure(frozenset(ordered), status == "exhausted", rounds, ordered)


def d_closure_bounded(sigma: Iterable[Identity], sig: Signature, budget: SearchBudget | None = None) -> Closure:
    return mh_closure_bounded(sigma, Monoid.explicit([Hypersubstitution.identity(sig)]), budget)


# ---------------------------------------------------------------- auditing


@dataclass(frozen=True)
class AuditReport:
    status: str  # "ok", "premise-failed" or "violation"
    algebra: int | None = None
    identity: Identity | None = None
    valuation: dict | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def soundness_audit(
    sigma: Iterable[Identity],
    derived: Iterable[Identity],
    algebras: Sequence[FiniteAlgebra],
    m: Monoid,
) -> AuditReport:
    """Check derived identities in algebras that satisfy the whole Mh-closure of ``sigma``.

    The premise is checked first and the audit refuses to run when it fails.
    Each axiom must be an M-multi-hyperidentity of the algebra, and every σ in
    the monoid must leave the algebra's operations unchanged; the second
    condition is what reflexivity plus the multi-hypersubstitution rule
    demand, and the first alone does not imply it.
    """
    sigma = list(sigma)
    for k, A in enumerate(algebras):
        for e in sigma:
            cex = find_multi_hyper_counterexample(A, e, m)
            if cex is not None:
                return AuditReport(
                    "premise-failed", k, e, cex.valuation, f"not a multi-hyperidentity: image {cex.image} fails"
                )
        if not fixed_by(A, m):
            return AuditReport("premise-failed", k, reason="some monoid element changes the algebra's operations")
    for e in derived:
        for k, A in enumerate(algebras):
            v = find_falsifying_valuation(A, e)
            if v is not None:
                return AuditReport("violation", k, e, v, "derived identity fails")
    return AuditReport("ok")
