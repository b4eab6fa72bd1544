import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_case
from ptrans.errors import UnsortedVariable
from ptrans.foctl import constraint as C
from ptrans.foctl.formula import TRUE, free_vars
from ptrans.graph import SEQ, Cfg, TCfg
from ptrans.minillvm.ast import INT, Br, Const, Local, MetaVar, PtrType
from ptrans.minillvm.parser import parse_instruction, parse_program
from ptrans.solver import Domain, all_models, extract_domain, get_models
from ptrans.syntax import parse_formula

N = MetaVar("n", "node")
M = MetaVar("m", "node")
T = MetaVar("t", "thread")


def nodes_domain(*nodes):
    return Domain({"node": tuple(nodes), "thread": (1,), "label": ("seq",), "expr": (),
                   "type": (), "instr": (), "op": ()})


def test_models_of_a_disjunction():
    d = nodes_domain(1, 2, 3)
    assert all_models(C.disj(C.eq(N, 1), C.eq(N, 2)), d) == [{"n": 1}, {"n": 2}]


def test_true_has_one_empty_model():
    assert all_models(C.CTRUE, nodes_domain(1)) == [{}]


def test_contradiction_has_no_models():
    assert C.conj(C.eq(N, 1), C.eq(N, 2)) is C.CFALSE
    assert all_models(C.conj(C.eq(N, 1), C.eq(N, 2)), nodes_domain(1, 2)) == []


def test_hash_consing_and_simplification():
    a = C.conj(C.eq(N, 1), C.eq(M, 2))
    assert a is C.conj(C.eq(N, 1), C.eq(M, 2))
    assert C.neg(C.neg(a)) is a
    assert all_models(C.conj(a, C.neg(a)), nodes_domain(1, 2)) == []
    assert C.disj(a, C.CTRUE) is C.CTRUE


def test_exists_one_point_rule_and_decision():
    d = nodes_domain(1, 2)
    body = C.conj(C.eq(N, 1), C.eq(M, 2))
    assert C.exists(N, body, d) is C.eq(M, 2)
    assert C.exists(N, C.neg(C.eq(N, 1)), d) is C.CTRUE
    assert C.exists(N, C.conj(C.neg(C.eq(N, 1)), C.neg(C.eq(N, 2))), d) is C.CFALSE


def test_variables_are_enumerated_even_when_unconstrained():
    d = nodes_domain(1, 2)
    assert all_models(C.CTRUE, d, variables=[N]) == [{"n": 1}, {"n": 2}]


def test_tau_restricts_and_is_kept():
    d = nodes_domain(1, 2, 3)
    c = C.disj(C.eq(N, 1), C.eq(N, 2))
    assert all_models(c, d, {"n": 2}) == [{"n": 2}]
    assert all_models(c, d, {"n": 3}) == []
    assert all_models(c, d, {"other": 5}) == [{"n": 1, "other": 5}, {"n": 2, "other": 5}]


def test_unsorted_variable():
    with pytest.raises(UnsortedVariable):
        all_models(C.eq(MetaVar("z", "colour"), 1), nodes_domain(1))


def test_extract_domain_of_a_single_store():
    g = parse_program("thread 1 { start 1; exit 1; node 1: store int 0, int* %x }", check=False)
    d = extract_domain(g)
    assert set(d.pool("expr")) == {Local("x"), Const(0)}
    assert set(d.pool("type")) == {INT, PtrType(INT)}
    assert d.pool("instr") == (parse_instruction("store int 0, int* %x"),)
    assert set(d.pool("label")) == {"seq", "true", "false"}


def test_extract_domain_single_node():
    g = TCfg.of({1: Cfg.build([1], [], 1, 1, {1: Br()})})
    assert extract_domain(g).pool("node") == (1,)


def test_extract_domain_is_deterministic(racy):
    a, b = extract_domain(racy), extract_domain(racy)
    assert a.pools == b.pools


def test_get_models_true_returns_tau(g1):
    assert get_models({}, g1, TRUE) == [{}]
    assert get_models({"n": 4}, g1, TRUE) == [{"n": 4}]


def test_get_models_on_a_chain():
    g = TCfg.of({1: Cfg.build([1, 2], [(1, 2, SEQ)], 1, 2, {1: Br(), 2: Br()})})
    phi = parse_formula("EF node(t, n)")
    assert get_models({}, g, phi) == [{"n": 1, "t": 1}, {"n": 2, "t": 1}]


def test_get_models_respects_tau(racy):
    phi = parse_formula("EF node(t, n)")
    everything = get_models({}, racy, phi)
    for tau in ({"t": 2}, {"n": 13}, {"t": 1, "n": 13}):
        expected = [m for m in everything if all(m[k] == v for k, v in tau.items())]
        assert get_models(tau, racy, phi) == expected


# -- random constraints ---------------------------------------------------------

def random_constraint(rng, variables, pool, depth, domain):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return rng.choice([C.CTRUE, C.CFALSE])
        return C.eq(rng.choice(variables), rng.choice(pool))
    kind = rng.randrange(4)
    sub = lambda: random_constraint(rng, variables, pool, depth - 1, domain)  # noqa: E731
    if kind == 0:
        return C.conj(sub(), sub())
    if kind == 1:
        return C.disj(sub(), sub(), sub())
    if kind == 2:
        return C.neg(sub())
    return C.exists(rng.choice(variables), sub(), domain)


def evaluate(c, env, domain):
    k = c.kind
    if k == C.TRUE_K:
        return True
    if k == C.FALSE_K:
        return False
    if k == C.EQ_K:
        return env[c.args[0]] == c.args[1]
    if k == C.AND_K:
        return all(evaluate(d, env, domain) for d in c.args)
    if k == C.OR_K:
        return any(evaluate(d, env, domain) for d in c.args)
    if k == C.NOT_K:
        return not evaluate(c.args[0], env, domain)
    var, body = c.args
    return any(evaluate(body, {**env, var: o}, domain) for o in domain.pool(var.sort))


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9))
def test_all_models_matches_direct_evaluation(seed):
    rng = random.Random(seed)
    pool = tuple(range(1, rng.randint(1, 8) + 1))
    d = nodes_domain(*pool)
    variables = [N, M, MetaVar("k", "node")]
    c = random_constraint(rng, variables, list(pool) + [99], 4, d)
    free = sorted(c.free)
    expected = []
    for combo in itertools.product(pool, repeat=len(free)):
        env = dict(zip(free, combo))
        if evaluate(c, env, d):
            expected.append({v.name: o for v, o in env.items()})
    assert all_models(c, d) == expected
    # the complement, over the same assignment space
    complement = all_models(C.neg(c), d, variables=free)
    everything = [{v.name: o for v, o in zip(free, combo)}
                  for combo in itertools.product(pool, repeat=len(free))]
    assert sorted(map(lambda m: tuple(sorted(m.items())), complement + expected)) == \
        sorted(map(lambda m: tuple(sorted(m.items())), everything))
    # pool order does not change the model set
    shuffled = list(pool)
    rng.shuffle(shuffled)
    d2 = nodes_domain(*shuffled)
    as_set = lambda ms: {tuple(sorted(m.items())) for m in ms}  # noqa: E731
    assert as_set(all_models(c, d2)) == as_set(expected)


@pytest.mark.parametrize("seed", range(40))
def test_get_models_agrees_with_tau_filtering(seed):
    g, phi = random_case(seed, max_nodes=4, depth=2)
    everything = get_models({}, g, phi)
    variables = sorted(free_vars(phi))
    if not variables or not everything:
        return
    var = variables[0]
    obj = everything[len(everything) // 2][var.name]
    expected = [m for m in everything if m[var.name] == obj]
    assert get_models({var.name: obj}, g, phi) == expected
