"""Runs every acceptance criterion once and prints one pass/fail line per criterion.

``pytest tests/test_acceptance.py -s`` shows the lines; the table with
timings is printed at the end of the module.
"""

from __future__ import annotations

import dataclasses
import json

import pytest

from brodylab import acceptance

_RESULTS: dict[int, acceptance.CriterionResult] = {}


@pytest.fixture(scope="module", autouse=True)
def summary():
    yield
    if _RESULTS:
        print("\n" + acceptance.table([_RESULTS[k] for k in sorted(_RESULTS)]))


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    (res,) = acceptance.run([number])
    _RESULTS[number] = res
    line = f"criterion {number:>2} {'PASS' if res.passed else 'FAIL'}  {res.title}  [{res.target}]"
    print("\n" + line)
    assert res.passed, json.dumps(res.measured, default=str)[:2000]


def test_corrupted_amplitude_fails_normalization(monkeypatch):
    real = acceptance.solve_constants

    def patched(*args, **kwargs):
        c = real(*args, **kwargs)
        return dataclasses.replace(c, a=c.a * 1.001)

    monkeypatch.setattr(acceptance, "solve_constants", patched)
    (res,) = acceptance.run([8])
    assert not res.passed


def test_records_carry_no_timing():
    (res,) = acceptance.run([1])
    rec = json.loads(res.record())
    assert "runtime" not in json.dumps(rec)
