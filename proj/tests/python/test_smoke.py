import math
import os
import subprocess

import pytest

import genuslab


def test_class_group_minus_23():
    g = genuslab.ClassGroup(-23)
    assert g.h == 3
    assert g.genera == 1
    assert g.forms == [(1, 1, 6), (2, 1, 3), (2, -1, 3)]
    assert g.invariants == [3]
    x = g.class_of((2, 1, 3))
    assert g.compose(x, g.inverse(x)) == 0
    assert g.order(x) == 3


def test_reduce_and_compose():
    assert genuslab.reduce(6, 1, 1) == (1, 1, 6)
    assert genuslab.compose((2, 1, 3), (2, 1, 3)) == (2, -1, 3)
    with pytest.raises(ValueError):
        genuslab.reduce(-1, 0, -1)


def test_classes_representing():
    g = genuslab.ClassGroup(-23)
    assert g.classes_representing(1) == [0]
    assert sorted(g.classes_representing(6)) == [0, 1, 2]
    assert genuslab.genus_represents_local(5, (1, 0, 1))
    assert not genuslab.genus_represents_local(3, (1, 0, 1))


def test_theorem1():
    r = genuslab.theorem1([2], [1])
    assert r["alternative"] == "SUMS_ALL"
    r = genuslab.theorem1([2, 32], [2, 6, 10, 16, 18])
    assert r["alternative"] == "SUBGROUP"
    assert r["index"] == 2
    assert r["verified"]


def test_census_and_constants():
    rep = genuslab.census("primes-by-class", -4, 100)
    assert rep["schema"] == 1
    assert rep["rows"][0]["observed"] == 12
    assert genuslab.u_f((1, 0, 1), 10) == 7
    c = genuslab.constants(-4, 1, 100000)
    assert abs(c["theta"] - 0.2256197852) < 1e-8
    assert abs(genuslab.li(1e6) - 78626.504) < 1e-2


def test_threads_do_not_change_reports():
    a = genuslab.census("exceptional", -23, 300000, threads=1)
    b = genuslab.census("exceptional", -23, 300000, threads=4, segmented=True)
    assert a["rows"] == b["rows"]


def test_resource_error():
    with pytest.raises(genuslab.ResourceError):
        genuslab.census("exceptional", -23, 300_000_000)


@pytest.mark.skipif("GENUSLAB_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module():
    out = subprocess.run(
        [os.environ["GENUSLAB_CLI"], "classgroup", "-D", "-84", "--format", "json"],
        check=True, capture_output=True, text=True,
    ).stdout
    assert genuslab.class_group_json(-84)["h"] == 4
    assert '"h": 4' in out or '"h":4' in out
