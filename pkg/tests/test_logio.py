"""Sample-log and trace-file round trips and failure diagnostics."""

import json

import numpy as np
import pytest

from mfinfer.coin import CoinModel
from mfinfer.sampling.logio import (
    LogParseError,
    header_comment,
    make_header,
    open_log_sink,
    read_nu_trace_csv,
    read_sample_log,
    sample_to_record,
    write_nu_trace_csv,
    write_sample_log,
    write_summary_csv,
)
from mfinfer.sampling.runner import ConstantMean, run_mf_sampler, run_sampler
from mfinfer.sampling.mlaws import PoissonLaw
from mfinfer.sampling.types import SimulationOutput, StopRule


def run_coin(n=30, seed=4):
    model = CoinModel()
    prior = model.prior()
    omega = model.weighting()
    return run_mf_sampler(
        prior,
        prior,
        model,
        omega,
        omega,
        model.g_fn,
        mean_fn=ConstantMean(1.0),
        m_law=PoissonLaw(),
        stop=StopRule(max_iterations=n),
        seed=seed,
    )


def test_header_fields():
    header = make_header(seed=12, config_hash="abcd", kind="multifidelity")
    assert header["seed"] == 12
    assert header["config_hash"] == "abcd"
    assert header["kind"] == "multifidelity"
    assert header["tool"] == "mf-infer"
    comment = header_comment(header)
    assert comment.startswith("# mf-infer ")
    assert "config_hash=abcd" in comment and "seed=12" in comment


def test_sample_log_round_trip(tmp_path):
    result = run_coin()
    header = make_header(seed=4, config_hash="x", kind="multifidelity")
    path = tmp_path / "samples.jsonl"
    write_sample_log(path, header, result)
    read_header, records = read_sample_log(path)
    assert read_header == header
    assert len(records) == len(result.samples)
    for rec, sample in zip(records, result.samples):
        assert rec.i == sample.index
        assert rec.w == pytest.approx(sample.weight)
        assert rec.g == pytest.approx(sample.g_value)
        assert rec.m == sample.record.m
        assert rec.mu == pytest.approx(sample.record.mu)
        assert rec.omega_lo == pytest.approx(sample.record.omega_lo)
        assert rec.omega_hi_list == pytest.approx(sample.record.omega_hi_list)
        assert rec.total_cost == pytest.approx(sample.total_cost)
        assert rec.theta == pytest.approx(np.asarray(sample.draw.theta))


def test_single_fidelity_records_have_null_mu(tmp_path):
    def simulator(theta, streams):
        return SimulationOutput(y=np.array([0.0]), cost=2.5)

    class Unit:
        def sample(self, rng):
            return np.array([0.5])

        def pdf(self, theta):
            return 1.0

    result = run_sampler(
        Unit(),
        Unit(),
        simulator,
        lambda theta, batch: 0.7,
        lambda theta: 1.0,
        stop=StopRule(max_iterations=3),
        seed=0,
    )
    doc = sample_to_record(result.samples[0])
    assert doc["m"] == 0 and doc["mu"] is None
    assert doc["cost_lo"] == pytest.approx(2.5)
    assert doc["omega_lo"] == pytest.approx(0.7)
    assert doc["omega_hi_list"] == []

    path = tmp_path / "sf.jsonl"
    write_sample_log(path, make_header(0, "h", "single"), result)
    _, records = read_sample_log(path)
    assert all(r.m == 0 and r.mu is None for r in records)
    assert all(r.cost_hi_total == 0.0 for r in records)


def test_streaming_sink_matches_batch_write(tmp_path):
    result = run_coin(n=10, seed=1)
    header = make_header(seed=1, config_hash="x", kind="multifidelity")
    batch_path = tmp_path / "batch.jsonl"
    stream_path = tmp_path / "stream.jsonl"
    write_sample_log(batch_path, header, result)
    sink, close = open_log_sink(stream_path, header)
    for s in result.samples:
        sink(s)
    close()
    assert batch_path.read_bytes() == stream_path.read_bytes()


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    header = json.dumps({"header": make_header(0, "h", "single")})
    path.write_text(header + "\n{not json\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_sample_log(path)
    assert err.value.line_no == 2
    assert str(path) in str(err.value)


def test_missing_field_reports_bad_record(tmp_path):
    path = tmp_path / "bad.jsonl"
    header = json.dumps({"header": make_header(0, "h", "single")})
    record = json.dumps({"i": 1, "theta": [0.5]})  # missing most fields
    path.write_text(header + "\n" + record + "\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_sample_log(path)
    assert err.value.line_no == 2
    assert "bad record" in str(err.value)


def test_first_line_must_be_header(tmp_path):
    path = tmp_path / "noheader.jsonl"
    path.write_text(json.dumps({"i": 1}) + "\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_sample_log(path)
    assert err.value.line_no == 1


def test_empty_log_raises(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_sample_log(path)
    assert err.value.line_no == 0


def test_summary_csv(tmp_path):
    from mfinfer.sampling.estimators import summarize

    result = run_coin(n=40, seed=2)
    report = summarize(result)
    header = make_header(seed=2, config_hash="h", kind="multifidelity")
    path = tmp_path / "summary.csv"
    write_summary_csv(path, header, report)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == header_comment(header)
    assert lines[1] == "n,g_hat,mse_hat,j_hat,total_cost"
    values = lines[2].split(",")
    assert int(values[0]) == report.n
    assert float(values[1]) == report.g_hat
    assert float(values[2]) == report.variance_estimate
    assert float(values[3]) == report.j_coefficient
    assert float(values[4]) == report.total_cost


def test_nu_trace_round_trip(tmp_path):
    trace = [(100, [0.5, 1.25, 2.0]), (200, [0.625, 1.5, 1.75])]
    header = make_header(seed=0, config_hash="h", kind="adaptive")
    path = tmp_path / "trace.csv"
    write_nu_trace_csv(path, header, trace)
    rows = read_nu_trace_csv(path)
    assert len(rows) == 2
    for (i_in, nu_in), (i_out, nu_out) in zip(trace, rows):
        assert i_out == i_in
        assert nu_out == pytest.approx(nu_in, rel=0, abs=0)  # repr round trip


def test_nu_trace_out_of_order_cell(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("i,k,nu_k\n100,1,0.5\n100,3,0.7\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_nu_trace_csv(path)
    assert "cell 3 out of order" in str(err.value)


def test_nu_trace_empty(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("i,k,nu_k\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_nu_trace_csv(path)
    assert err.value.line_no == 0


def test_nu_trace_bad_row(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("i,k,nu_k\n100,one,0.5\n", encoding="utf-8")
    with pytest.raises(LogParseError) as err:
        read_nu_trace_csv(path)
    assert err.value.line_no == 2
