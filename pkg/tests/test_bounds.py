import math

import numpy as np

from entloss import channels, checks, qcore
from entloss.bounds import BoundCheckRecord, exact, skipped, tally


def test_pass_iff_slack_within_tolerance():
    assert exact("x", 1.0, 1.0 - 5e-8, 1e-7).status == "pass"
    assert exact("x", 1.0, 1.0 - 2e-7, 1e-7).status == "fail"
    assert exact("x", 0.2, 0.9, 1e-7).slack == 0.9 - 0.2


def test_brackets_turn_estimated_violation_into_conditional():
    # the estimates violate the inequality, but the true rhs may reach 2
    rec = BoundCheckRecord("x", 1.0, 0.5, 1e-7, rhs_lo=0.5, rhs_hi=2.0, lhs_lo=1.0, lhs_hi=1.0)
    assert rec.status == "conditional"
    rec = BoundCheckRecord("x", 1.0, 0.5, 1e-7, rhs_lo=0.5, rhs_hi=0.7, lhs_lo=0.9, lhs_hi=1.0)
    assert rec.status == "fail"
    assert BoundCheckRecord("x", 1.0, 0.5, 1e-7).status == "conditional"


def test_certified_needs_brackets():
    assert exact("x", 0.1, 0.2, 1e-9).certified
    rec = BoundCheckRecord("x", 0.1, 0.2, 1e-9, lhs_lo=0.1, lhs_hi=0.5, rhs_lo=0.2, rhs_hi=0.2)
    assert rec.status == "pass" and not rec.certified


def test_skipped_records():
    rec = skipped("final_a", "inst", "outside the domain")
    assert rec.status == "skipped"
    assert rec.to_dict()["lhs"] is None
    assert rec.to_full_dict()["note"] == "outside the domain"


def test_tally_counts_every_status():
    recs = [exact("a", 0, 1, 1e-9), exact("a", 1, 0, 1e-9), skipped("a"),
            BoundCheckRecord("b", 1.0, 0.0, 1e-9)]
    assert tally(recs) == {"a": {"pass": 1, "fail": 1, "skipped": 1, "conditional": 0},
                           "b": {"pass": 0, "fail": 0, "skipped": 0, "conditional": 1}}


def test_converse_records_keep_the_worst_applicable_recovery():
    recs = checks.converse_records(0.1, [0.95, 0.9, 0.3], 2, "i")
    assert len(recs) == 1
    rec = recs[0]
    x = 0.05
    assert math.isclose(rec.rhs, 4 * x * math.log2(2 / x))
    assert "1 outside" in rec.note
    assert checks.converse_records(0.1, [0.2, 0.3], 2)[0].status == "skipped"


def test_thm1_records_on_unitary_channel():
    rng = np.random.default_rng(0)
    rho = channels.random_state(3, seed=rng)
    ch = channels.unitary(qcore.haar_unitary(3, rng))
    recs, summary = checks.thm1(rho, ch)
    by_name = {r.name: r for r in recs}
    assert set(by_name) == {"thm1_direct", "thm1_converse", "miao", "miao2"}
    assert all(r.status == "pass" for r in recs)
    assert abs(by_name["thm1_direct"].slack) <= 1e-9
    assert summary["delta_c"] == 0.0


def test_thm2_records_on_noiseless_channel_are_tight():
    rho = qcore.maximally_mixed(2)
    recs, extra = checks.thm2(rho, channels.identity(2), 1.0, 0.0)
    by_name = {r.name: r for r in recs}
    assert by_name["thm2_direct2"].status == "pass"
    assert abs(by_name["thm2_direct2"].lhs - 1.0) <= 1e-3
    assert by_name["thm2_direct1"].status == "skipped"
    assert extra["full_eof"]


def test_swap_exchanges_marginals():
    tau = channels.random_state((2, 3), seed=1)
    sw = checks.swap(tau)
    assert sw.dims == (3, 2)
    assert np.allclose(qcore.partial_trace(sw, [0]).mat, qcore.partial_trace(tau, [1]).mat)
