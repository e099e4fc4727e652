import json
import math

import numpy as np
import pytest

from condsage import problems
from condsage.problemfile import ProblemFileError, from_dict, load, loads
from condsage.sets import SignSymmetricDomain

COSH = {
    "kind": "signomial", "n": 1,
    "objective": [{"c": 1, "a": [1]}, {"c": 1, "a": [-1]}],
    "domain": {"type": "box", "lower": [-1], "upper": [None]},
}


def _doc(**changes):
    d = json.loads(json.dumps(COSH))
    d.update(changes)
    return d


@pytest.mark.parametrize("case", [problems.ex1(0), problems.ex2(), problems.ex3(),
                                  problems.ex4("aggressive"), problems.ex10()[0],
                                  problems.ex12(True), problems.random_quartic(5, 3)],
                         ids=lambda c: c.id)
def test_roundtrip(case):
    pf = case.problem
    back = loads(pf.dumps())
    assert back == pf
    assert back.dumps() == pf.dumps()


def test_defaults():
    pf = from_dict(COSH)
    assert pf.ineqs == [] and pf.eqs == [] and not pf.geometric
    assert pf.level.p == 0 and pf.level.q == 1
    X = pf.domain_set()
    assert X.contains(np.array([5.0])) and not X.contains(np.array([-2.0]))


def test_load_from_path(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(COSH))
    assert load(path) == from_dict(COSH)


def test_malformed_json_reports_byte_offset():
    text = '{"kind": "signomial",\n "n": 1,, }'
    with pytest.raises(ProblemFileError) as e:
        loads(text)
    assert e.value.offset == text.index(",,") + 1
    assert "byte offset" in str(e.value)


def test_byte_offset_counts_utf8_bytes():
    text = '{"kind": "sïgnomial", ]'
    with pytest.raises(ProblemFileError) as e:
        loads(text.encode("utf-8"))
    assert e.value.offset == len(text[:text.index("]")].encode("utf-8"))


def test_invalid_utf8():
    with pytest.raises(ProblemFileError) as e:
        loads(b'{"kind": "\xff"}')
    assert e.value.offset == 10


@pytest.mark.parametrize("changes, where", [
    ({"kind": "rational"}, "$.kind"),
    ({"n": 0}, "$.n"),
    ({"bogus": 1}, "$.bogus"),
    ({"objective": [{"c": 1, "a": [1, 2]}]}, "$.objective[0].a"),
    ({"objective": [{"c": "x", "a": [1]}]}, "$.objective[0].c"),
    ({"domain": {"type": "log_box", "a": 1}}, "$.domain.type"),
    ({"domain": {"type": "box", "lower": [0], "upper": [1], "extra": 1}}, "$.domain.extra"),
    ({"recovery": {"eps_ineq": -1}}, "$.recovery.eps_ineq"),
    ({"recovery": {"nope": 1}}, "$.recovery.nope"),
    ({"geometric": "yes"}, "$.geometric"),
    ({"level": [0, 1]}, "$.level"),
])
def test_validation_errors(changes, where):
    with pytest.raises(ProblemFileError) as e:
        from_dict(_doc(**changes))
    assert e.value.location.startswith(where)


def test_polynomial_exponents_must_be_natural():
    d = _doc(kind="polynomial", objective=[{"c": 1, "a": [-1]}],
             domain={"type": "sign_symmetric"})
    with pytest.raises(ProblemFileError):
        from_dict(d)
    d["objective"] = [{"c": 1, "a": [0.5]}]
    with pytest.raises(ProblemFileError):
        from_dict(d)


def test_partition_indices_checked():
    d = _doc(ineqs=[[{"c": 1, "a": [0]}]],
             domain={"type": "box", "lower": [-1], "upper": [1],
                     "partition": {"domain": [3], "lagrangian": []}})
    with pytest.raises(ProblemFileError):
        from_dict(d)


def test_partition_folds_into_domain():
    g = [{"c": 2, "a": [0]}, {"c": -1, "a": [1]}]  # e^x <= 2
    d = _doc(ineqs=[g], domain={"type": "box", "lower": [-1], "upper": [1],
                                "partition": {"domain": [0], "lagrangian": []}})
    pf = from_dict(d)
    spec = pf.to_spec()
    assert spec.g == [] and len(pf.checked_spec().g) == 1
    assert spec.X.contains(np.array([0.6])) and not spec.X.contains(np.array([0.75]))


def test_polynomial_domains():
    base = _doc(kind="polynomial", objective=[{"c": 1, "a": [2, 0]}, {"c": -1, "a": [1, 1]}], n=2)
    for dom in ({"type": "sign_symmetric"}, {"type": "orthant"},
                {"type": "log_box", "a": [1.0, 2.0]}, {"type": "log_ball", "a": 1.0},
                {"type": "log_annulus", "lower": [0.1, 0.1], "upper": [1, 1]}):
        pf = from_dict(dict(base, domain=dom))
        assert isinstance(pf.domain_set(), SignSymmetricDomain)


def test_recovery_settings_override():
    pf = from_dict(_doc(recovery={"eps_ineq": 1e-3}))
    assert pf.settings().eps_ineq == 1e-3
    assert pf.settings(eps_ineq=5.0).eps_ineq == 5.0


def test_quartic_generator_is_deterministic():
    a = problems.random_quartic(8, 11).problem.dumps()
    b = problems.random_quartic(8, 11).problem.dumps()
    c = problems.random_quartic(8, 12).problem.dumps()
    assert a == b and a != c


def test_quartic_term_count_statistic():
    n, draws = 10, 200
    counts = np.array([problems.sample_quartic_terms(n, s)[1].size for s in range(draws)])
    mean = n * math.log(n)
    p = mean / n ** 4
    sigma = math.sqrt(n ** 4 * p * (1 - p) / draws)
    assert abs(counts.mean() - mean) <= 3 * sigma


def test_quartic_exponents_have_degree_four():
    alpha, c = problems.sample_quartic_terms(6, 0)
    assert alpha.shape[0] == c.size > 0
    assert np.all(alpha.sum(axis=1) == 4)
