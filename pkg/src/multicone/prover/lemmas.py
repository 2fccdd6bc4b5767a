"""Instance suites for the five entropy lemmas, the cut-set specialization and the column-11 chain.

Set-valued statements are checked by finite instantiation: every triple of
subsets of a ground set of at most ``max_ground`` variables that meets the
hypothesis, taken once per relabelling of the ground variables and of the
three sets.
"""

from __future__ import annotations

import zlib

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Sequence

import numpy as np

from ..model import ROW11, cut_collection, floor_op, label, table1_rows
from .expr import EntropyVector, H, I, h_masks, i_masks, parse_expression, zero
from .numeric import Distribution, add_channel, add_function, pair, random_joint, random_product
from .shannon import ConstraintSet, ProofCertificate, Unproven, functional, independent, prove

LEMMAS = ("7.1", "7.2", "7.3", "7.4", "7.5")

STATEMENTS = {
    "7.1": "containment and H(W|Xi)=0 for i=1,2,3 imply I(X1;X2;X3) >= H(W)",
    "7.2": "H(A)+H(B)+H(C) = H(A,B,C) + I(A,B;A,C;B,C) + I(A;B;C)",
    "7.3": "independent ground variables and empty X1^X2^X3 imply H(Y|X1)+H(Y|X2)+H(Y|X3) >= H(Y)",
    "7.4": "containment implies I(X1;X2;X3|W) >= 0",
    "7.5": "H(Z|X)=0 and H(Z|Y)=0 imply I(X;Y|W) >= H(Z|W)",
}


class UnknownLemma(KeyError):
    pass


Sampler = Callable[[np.random.Generator], Distribution]


@dataclass(frozen=True)
class Instance:
    lemma: str
    label: str
    target: EntropyVector
    constraints: ConstraintSet
    sampler: Sampler | None = None
    max_vars: int = 6


@dataclass
class InstanceResult:
    instance: Instance
    result: ProofCertificate | Unproven
    numeric_min: float | None = None

    @property
    def proved(self) -> bool:
        return isinstance(self.result, ProofCertificate) and self.result.verify()

    @property
    def ok(self) -> bool:
        return self.proved and (self.numeric_min is None or self.numeric_min >= -1e-9)

    def to_dict(self) -> dict:
        out = {"instance": self.instance.label, "proved": self.proved, "result": self.result.to_dict()}
        if self.numeric_min is not None:
            out["numeric_min"] = self.numeric_min
        return out


@dataclass
class LemmaReport:
    name: str
    statement: str
    results: list[InstanceResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.ok for r in self.results)

    def to_dict(self) -> dict:
        return {
            "lemma": self.name,
            "statement": self.statement,
            "instances": len(self.results),
            "proved": sum(r.proved for r in self.results),
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }


# ---------------------------------------------------------------------------
# enumeration up to symmetry


def containment(a: int, b: int, c: int) -> bool:
    return not (a & ~(b | c)) or not (b & ~(a | c)) or not (c & ~(a | b))


def empty_triple(a: int, b: int, c: int) -> bool:
    return not (a & b & c)


def _relabel(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for i, j in enumerate(perm):
        if mask >> i & 1:
            out |= 1 << j
    return out


def set_triples(hypothesis: Callable[[int, int, int], bool], max_ground: int = 4) -> list[tuple[int, int, int]]:
    """Representatives of hypothesis-satisfying triples, compacted onto the low bits."""
    perms = [[_relabel(m, p) for m in range(1 << max_ground)] for p in permutations(range(max_ground))]
    seen = set()
    for triple in product(range(1 << max_ground), repeat=3):
        if not hypothesis(*triple):
            continue
        key = min(tuple(sorted(t[m] for m in triple)) for t in perms)
        seen.add(key)
    out = []
    for key in sorted(seen):
        used = [i for i in range(max_ground) if (key[0] | key[1] | key[2]) >> i & 1]
        out.append(tuple(_compact(m, used) for m in key))
    return sorted(set(out), key=lambda t: (bin(t[0] | t[1] | t[2]).count("1"), t))


def _compact(mask: int, used: list[int]) -> int:
    return sum(1 << k for k, b in enumerate(used) if mask >> b & 1)


def _ground(triple: tuple[int, int, int]) -> int:
    return (triple[0] | triple[1] | triple[2]).bit_length()


def _set_text(mask: int) -> str:
    return "{" + ",".join(f"U{i + 1}" for i in range(mask.bit_length()) if mask >> i & 1) + "}"


def _triple_label(triple) -> str:
    return " ".join(f"X{k + 1}={_set_text(m)}" for k, m in enumerate(triple))


def _cols(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


# ---------------------------------------------------------------------------
# per-lemma instances


def instance_71(triple: tuple[int, int, int]) -> Instance:
    g = _ground(triple)
    names = tuple(f"U{i + 1}" for i in range(g)) + ("W",)
    w = 1 << g
    target = i_masks(names, list(triple)) - h_masks(names, w)
    cons = ConstraintSet(tuple(h_masks(names, w, m) for m in triple))
    common = _cols(triple[0] & triple[1] & triple[2])

    def sampler(rng):
        return add_function(random_joint(rng, g), rng, common)

    return Instance("7.1", _triple_label(triple), target, cons, sampler)


def instance_73(triple: tuple[int, int, int]) -> Instance:
    g = _ground(triple)
    names = tuple(f"U{i + 1}" for i in range(g)) + ("Y",)
    y = 1 << g
    target = zero(names)
    for m in triple:
        target = target + h_masks(names, y, m)
    target = target - h_masks(names, y)
    cons = ConstraintSet((independent(names, names[:g]),) if g > 1 else ())

    def sampler(rng):
        return add_channel(random_product(rng, g), rng)

    return Instance("7.3", _triple_label(triple), target, cons, sampler)


def instance_74(triple: tuple[int, int, int]) -> Instance:
    g = _ground(triple)
    names = tuple(f"U{i + 1}" for i in range(g)) + ("W",)
    target = i_masks(names, list(triple), 1 << g)

    def sampler(rng):
        return random_joint(rng, g + 1)

    return Instance("7.4", _triple_label(triple), target, ConstraintSet(), sampler)


def instance_72() -> Instance:
    names = ("A", "B", "C")
    target = parse_expression("H(A)+H(B)+H(C) - H(A,B,C) - I(A,B;A,C;B,C) - I(A;B;C)", names)
    return Instance("7.2", "A,B,C", target, ConstraintSet(), lambda rng: random_joint(rng, 3))


def instance_75() -> Instance:
    names = ("X", "Y", "Z", "W")
    target = parse_expression("I(X;Y|W) - H(Z|W)", names)
    cons = ConstraintSet((parse_expression("H(Z|X)", names), parse_expression("H(Z|Y)", names)))

    def sampler(rng):
        # columns z, x', y', w; X = (Z, x') and Y = (Z, y') so Z is a function of each
        base = random_joint(rng, 4)
        v = base.values
        values = np.column_stack([pair(base, 0, 1), pair(base, 0, 2), v[:, 0], v[:, 3]])
        return Distribution(base.p, values)

    return Instance("7.5", "X,Y,Z,W", target, cons, sampler)


def lemma_instances(name: str, *, max_ground: int = 4) -> list[Instance]:
    if name == "7.1":
        return [instance_71(t) for t in set_triples(containment, max_ground)]
    if name == "7.3":
        return [instance_73(t) for t in set_triples(empty_triple, max_ground)]
    if name == "7.4":
        return [instance_74(t) for t in set_triples(containment, max_ground)]
    if name == "7.2":
        return [instance_72()]
    if name == "7.5":
        return [instance_75()]
    raise UnknownLemma(name)


def run_instance(inst: Instance, *, numeric_trials: int = 0, seed: int = 0, both_directions: bool = False) -> InstanceResult:
    result = prove(inst.target, inst.constraints, max_vars=inst.max_vars)
    if both_directions and isinstance(result, ProofCertificate):
        reverse = prove(-inst.target, inst.constraints, max_vars=inst.max_vars)
        if not isinstance(reverse, ProofCertificate):
            result = reverse
    numeric_min = None
    if numeric_trials and inst.sampler is not None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, zlib.crc32(inst.label.encode())])))
        vals = []
        for _ in range(numeric_trials):
            d = inst.sampler(rng)
            vals.append(d.evaluate(inst.target))
        numeric_min = min(vals)
    return InstanceResult(inst, result, numeric_min)


def verify_lemma(name: str, *, max_ground: int = 4, numeric_trials: int = 0, seed: int = 0) -> LemmaReport:
    if name not in LEMMAS:
        raise UnknownLemma(name)
    report = LemmaReport(name, STATEMENTS[name])
    for inst in lemma_instances(name, max_ground=max_ground):
        res = run_instance(inst, numeric_trials=numeric_trials, seed=seed, both_directions=name == "7.2")
        if name == "7.2" and not inst.target.is_zero():
            res.result = Unproven(inst.target, inst.constraints)
        report.results.append(res)
    return report


# ---------------------------------------------------------------------------
# converse instances


def _link(mask: int) -> str:
    return "X" + label(mask)


def cutset_instance(a1) -> Instance:
    """Single-collection case: the inputs on ``a1`` determine every message in ``floor(a1)``."""
    a1 = cut_collection(a1)
    links = sorted(a1, key=lambda m: (bin(m).count("1"), m))
    decoded = sorted(floor_op(a1), key=lambda m: (bin(m).count("1"), m))
    names = tuple(_link(m) for m in links) + ("V",)
    xs = names[:-1]
    target = zero(names)
    for x in xs:
        target = target + H(names, [x])
    target = target - H(names, ["V"])
    cons = ConstraintSet((functional(names, ["V"], xs),))
    text = "{" + ",".join(label(m) for m in links) + "}"
    msgs = "(" + ",".join("W" + label(m) for m in decoded) + ")"

    def sampler(rng):
        return add_function(random_joint(rng, len(xs)), rng, list(range(len(xs))), arity=4)

    return Instance("cutset", f"A1={text}, V={msgs}", target, cons, sampler)


def cutset_instances(max_links: int = 5) -> list[Instance]:
    """One instance per Table 1 row with empty second and third collections."""
    out = []
    for a1, a2, a3 in table1_rows():
        if not a2 and not a3 and len(a1) <= max_links:
            out.append(cutset_instance(a1))
    return out


def column11_chain() -> list[Instance]:
    """Entropy steps of the separate bound for the row-11 collections.

    Messages sharing the same receivers are grouped (``W12`` with ``W123``),
    which keeps the independence step at six groups plus ``Y``.
    """
    a1, a2, a3 = ROW11
    a3_top = a3 | {7}
    steps: list[Instance] = []

    def xs_of(coll):
        return tuple(_link(m) for m in sorted(coll, key=lambda m: (bin(m).count("1"), m)))

    # subadditivity of the link inputs, one per collection
    for k, coll in enumerate((a1, a2, a3), 1):
        names = xs_of(coll)
        target = zero(names)
        for x in names:
            target = target + H(names, [x])
        target = target - H(names, names)
        steps.append(Instance("chain", f"step2.A{k}: sum H(X_I) >= H(X_A{k})", target, ConstraintSet(),
                              lambda rng, n=len(names): random_joint(rng, n)))

    names = xs_of(a3_top)
    rest = tuple(x for x in names if x != "X123")
    target = H(names, rest) - H(names, names) + H(names, ["X123"])
    steps.append(Instance("chain", "step3: H(X_A3) >= H(X_A3, X123) - H(X123)", target, ConstraintSet(),
                          lambda rng, n=len(names): random_joint(rng, n)))

    # decodability and monotonicity per receiver
    for k, coll in enumerate((a1, a2, a3_top), 1):
        xs = xs_of(coll)
        names = xs + (f"V{k}",)
        v = [f"V{k}"]
        cons = ConstraintSet((functional(names, v, xs),))

        def sampler(rng, n=len(xs)):
            return add_function(random_joint(rng, n), rng, list(range(n)), arity=4)

        fano = H(names, xs) - H(names, xs, v) - H(names, v)
        steps.append(Instance("chain", f"step4.R{k}: H(X_A{k}) >= H(X_A{k}|V{k}) + H(V{k})", fano, cons, sampler))
        mono = H(names, xs, v) - H(names, ["X123"], v)
        steps.append(Instance("chain", f"step5.R{k}: H(X_A{k}|V{k}) >= H(X123|V{k})", mono, ConstraintSet(),
                              lambda rng, n=len(names): random_joint(rng, n)))

    groups = ("G1", "G2", "G3", "G12", "G13", "G23")
    v_sets = (["G1", "G12", "G13"], ["G2", "G12", "G23"], ["G3", "G13", "G23"])
    names = groups + ("Y",)
    target = zero(names)
    for vs in v_sets:
        target = target + H(names, ["Y"], vs)
    target = target - H(names, ["Y"])
    steps.append(Instance("chain", "step6: sum_k H(X123|V_k) >= H(X123), messages independent", target,
                          ConstraintSet((independent(names, groups),)),
                          lambda rng: add_channel(random_product(rng, 6), rng), max_vars=7))

    names = groups
    target = zero(names)
    for vs in v_sets:
        target = target + H(names, vs)
    for g, mult in zip(groups, (1, 1, 1, 2, 2, 2)):
        target = target - H(names, [g]).scale(mult)
    steps.append(Instance("chain", "step7: H(V1)+H(V2)+H(V3) = sum of message entropies with multiplicity", target,
                          ConstraintSet((independent(names, groups),)), lambda rng: random_product(rng, 6)))
    return steps


def verify_chain(*, numeric_trials: int = 0, seed: int = 0) -> LemmaReport:
    report = LemmaReport("column-11 chain", "entropy steps of the row-11 bound")
    for inst in column11_chain():
        both = inst.label.startswith(("step4", "step7"))
        report.results.append(run_instance(inst, numeric_trials=numeric_trials, seed=seed, both_directions=both))
    return report


def verify_cutsets(*, numeric_trials: int = 0, seed: int = 0) -> LemmaReport:
    report = LemmaReport("cut-set", "single-collection instances reduce to the plain cut-set bound")
    for inst in cutset_instances():
        report.results.append(run_instance(inst, numeric_trials=numeric_trials, seed=seed))
    return report
