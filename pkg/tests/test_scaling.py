"""Gadget scaling at sizes beyond the acceptance grid."""

from __future__ import annotations

import math

import pytest

from eulermix.graph import GOLDEN
from eulermix.sensitivity import sensitivity_experiment


@pytest.mark.slow
def test_local_exponents_at_large_n():
    rep = sensitivity_experiment([256, 512, 1024], (GOLDEN, 0.5), eps=0.25)
    by = {(r.alpha, r.n): r.t_mix for r in rep.rows}
    local = {a: math.log(by[(a, 1024)] / by[(a, 256)]) / math.log(4) for a in (GOLDEN, 0.5)}
    assert 1.35 <= local[GOLDEN] <= 1.65
    assert 1.85 <= local[0.5] <= 2.15
    assert all(r.t_mix <= r.t_unif for r in rep.rows)
