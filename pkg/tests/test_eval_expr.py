"""eval_expr against hand-computed values and a local tree-walking oracle.

The oracle below was written before the engine's evaluator and is kept
deliberately tiny: a direct recursive interpretation of the expression
nodes over plain dicts, used to freeze expected values for compound
expressions.
"""

import random

import pytest

from genspec import _ExprGen
from polyrv.errors import EvalTypeError
from polyrv.monitor.engine import eval_expr
from polyrv.speclang import nodes as n
from polyrv.speclang import parse_expr


def _oracle(e, env, args, kinds):
    """Independent mini-evaluator (no coercion subtleties beyond what the
    language defines; raises ValueError where the engine raises
    EvalTypeError)."""
    def as_int(v):
        if isinstance(v, bool):
            raise ValueError
        if isinstance(v, str):
            if not (v[1:] if v[:1] == "-" else v).isdigit():
                raise ValueError
            return int(v)
        return v

    def as_bool(v):
        if isinstance(v, bool):
            return v
        if v in ("true", "false"):
            return v == "true"
        raise ValueError

    match e:
        case n.Lit(value=v):
            return v
        case n.Name(ident=i):
            return args[i] if i in args else env[i]
        case n.MapGet(map=m, key=k):
            kv = _oracle(k, env, args, kinds)
            key = ("true" if kv else "false") if isinstance(kv, bool) \
                else str(kv) if isinstance(kv, int) else kv
            default = n.KIND_DEFAULT[n.MAP_ELEMENT[kinds[m]]]
            return env[m].get(key, default)
        case n.Not(operand=x):
            return not as_bool(_oracle(x, env, args, kinds))
        case n.BinOp(op="&&", left=l, right=r):
            return as_bool(_oracle(l, env, args, kinds)) and \
                as_bool(_oracle(r, env, args, kinds))
        case n.BinOp(op="||", left=l, right=r):
            return as_bool(_oracle(l, env, args, kinds)) or \
                as_bool(_oracle(r, env, args, kinds))
        case n.BinOp(op=op, left=l, right=r):
            lv, rv = _oracle(l, env, args, kinds), _oracle(r, env, args, kinds)
            if op in ("==", "!="):
                if isinstance(lv, bool) or isinstance(rv, bool):
                    eq = as_bool(lv) == as_bool(rv)
                elif isinstance(lv, int) or isinstance(rv, int):
                    eq = as_int(lv) == as_int(rv)
                else:
                    eq = lv == rv
                return eq if op == "==" else not eq
            li, ri = as_int(lv), as_int(rv)
            return {"<": li < ri, ">": li > ri,
                    "<=": li <= ri, ">=": li >= ri}[op]
        case n.Assign(target=t, value=v):
            value = _oracle(v, env, args, kinds)
            if kinds[t] == n.KIND_INT:
                value = as_int(value)
            elif kinds[t] == n.KIND_BOOL:
                value = as_bool(value)
            env[t] = value
            return value
        case n.MapPut(map=m, key=k, value=v):
            kv = _oracle(k, env, args, kinds)
            key = ("true" if kv else "false") if isinstance(kv, bool) \
                else str(kv) if isinstance(kv, int) else kv
            value = _oracle(v, env, args, kinds)
            element = n.MAP_ELEMENT[kinds[m]]
            if element == n.KIND_INT:
                value = as_int(value)
            elif element == n.KIND_BOOL:
                value = as_bool(value)
            env[m][key] = value
            return value
        case n.Seq(first=f, second=s):
            _oracle(f, env, args, kinds)
            return _oracle(s, env, args, kinds)
    raise AssertionError(e)


def test_absent_map_key_defaults():
    kinds = {"registeredCards": n.KIND_MAP_BOOL, "counts": n.KIND_MAP_INT,
             "names": n.KIND_MAP_STRING}
    env = {"registeredCards": {}, "counts": {}, "names": {}}
    assert eval_expr(parse_expr('registeredCards["cardA"]'), env, {}, kinds) is False
    assert eval_expr(parse_expr('counts["cardA"]'), env, {}, kinds) == 0
    assert eval_expr(parse_expr('names["cardA"]'), env, {}, kinds) == ""


def test_program4_count_comparison():
    kinds = {"java_mailCount": n.KIND_INT}
    env = {"java_mailCount": 250}
    body = parse_expr("java_mailCount != c_mailCount")
    assert eval_expr(body, env, {"c_mailCount": "250"}, kinds) is False
    assert eval_expr(body, env, {"c_mailCount": "249"}, kinds) is True
    assert env == {"java_mailCount": 250}  # conditions leave env unchanged


def test_assign_then_read_map():
    # expected value computed with the oracle above, then frozen
    kinds = {"registeredCards": n.KIND_MAP_BOOL}
    expr = parse_expr('registeredCards["A"] := true; registeredCards["A"]')
    oracle_env = {"registeredCards": {}}
    assert _oracle(expr, oracle_env, {}, kinds) is True

    env = {"registeredCards": {}}
    assert eval_expr(expr, env, {}, kinds) is True
    assert env == {"registeredCards": {"A": True}}


def test_wire_coercions():
    kinds = {"n": n.KIND_INT, "b": n.KIND_BOOL, "s": n.KIND_STRING}
    env = {"n": 0, "b": False, "s": ""}
    assert eval_expr(parse_expr("n := x"), env, {"x": "42"}, kinds) == 42
    assert eval_expr(parse_expr("b := x"), env, {"x": "true"}, kinds) is True
    assert eval_expr(parse_expr("s := x"), env, {"x": "hi"}, kinds) == "hi"
    assert env == {"n": 42, "b": True, "s": "hi"}
    assert eval_expr(parse_expr("x < 7"), env, {"x": "-3"}, kinds) is True


@pytest.mark.parametrize("expr,args", [
    ("n := x", {"x": "forty-two"}),
    ("x < 7", {"x": "many"}),
    ("b && true", {}),
    ("!x", {"x": "maybe"}),
])
def test_type_errors(expr, args):
    kinds = {"n": n.KIND_INT, "b": n.KIND_INT}
    env = {"n": 0, "b": 0}
    with pytest.raises(EvalTypeError):
        eval_expr(parse_expr(expr), env, args, kinds)


def test_map_key_coercion():
    kinds = {"m": n.KIND_MAP_INT}
    env = {"m": {}}
    eval_expr(parse_expr("m[3] := 9"), env, {}, kinds)
    eval_expr(parse_expr("m[true] := 8"), env, {}, kinds)
    assert env["m"] == {"3": 9, "true": 8}
    assert eval_expr(parse_expr("m[3]"), env, {}, kinds) == 9


def test_random_exprs_match_oracle():
    state = {"n": n.KIND_INT, "b": n.KIND_BOOL, "mb": n.KIND_MAP_BOOL,
             "mi": n.KIND_MAP_INT}
    kinds = dict(state)
    for seed in range(400):
        rng = random.Random(seed)
        gen = _ExprGen(rng, state, ("x", "y"))
        expr = gen.boolean() if seed % 2 else (gen.action_body() or gen.boolean())
        args = {"x": rng.choice(["0", "2", "true", "a"]),
                "y": rng.choice(["1", "false", "b"])}
        env1 = {"n": rng.randrange(3), "b": rng.random() < 0.5, "mb": {}, "mi": {}}
        env2 = {"n": env1["n"], "b": env1["b"], "mb": {}, "mi": {}}
        try:
            expected = _oracle(expr, env1, args, kinds)
            failed = False
        except ValueError:
            failed = True
        if failed:
            with pytest.raises(EvalTypeError):
                eval_expr(expr, env2, args, kinds)
        else:
            assert eval_expr(expr, env2, args, kinds) == expected, f"seed {seed}"
            assert env1 == env2, f"seed {seed} env divergence"
