import json

import numpy as np
import pytest

from dyncorr.distributions import RngStream
from dyncorr.exceptions import SchemaMismatchError
from dyncorr.model import ModelParams, simulate
from dyncorr.output import (
    config_to_dict,
    dumps_json,
    format_float,
    make_provenance,
    read_json,
    read_traces,
    summary_from_dict,
    summary_to_dict,
    write_json,
    write_traces,
    SUMMARY_KEYS,
)
from dyncorr.posterior import summarize_record
from dyncorr.sampler import SamplerConfig, run_chain


class TestFloatFormatting:
    def test_round_trip_exact(self, np_rng):
        for _ in range(2000):
            x = float(np_rng.standard_normal() * 10.0 ** np_rng.integers(-20, 20))
            assert float(format_float(x)) == x

    def test_17_significant_digits(self):
        assert format_float(1.0 / 3.0) == "0.33333333333333331"
        assert format_float(0.1) == "0.10000000000000001"

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            format_float(float("inf"))
        with pytest.raises(ValueError):
            format_float(float("nan"))


class TestJsonEmitter:
    def test_parses_back(self):
        doc = {
            "a": [1.5, 2, True, None, "text"],
            "nested": {"x": np.array([0.25, 0.5]), "empty": [], "eo": {}},
            "i": np.int64(7),
            "f": np.float64(1.0 / 7.0),
        }
        parsed = json.loads(dumps_json(doc))
        assert parsed["a"] == [1.5, 2, True, None, "text"]
        assert parsed["nested"]["x"] == [0.25, 0.5]
        assert parsed["i"] == 7
        assert parsed["f"] == 1.0 / 7.0

    def test_string_escaping(self):
        doc = {"weird": 'quo"te\\slash\nnewline\tTab é'}
        parsed = json.loads(dumps_json(doc))
        assert parsed == doc

    def test_deterministic(self):
        doc = {"b": [1.0, 2.0], "a": {"c": 0.3}}
        assert dumps_json(doc) == dumps_json(doc)

    def test_write_read(self, tmp_path):
        path = tmp_path / "x.json"
        doc = {"v": [1.0 / 3.0, 2.0 / 3.0]}
        write_json(path, doc)
        assert read_json(path) == {"v": [1.0 / 3.0, 2.0 / 3.0]}


def _record_and_summary(seed=23, K=4, n_iters=30):
    y = simulate(RngStream(seed), ModelParams(nu=5.0, d=0.8, m=2), K).y_seq
    cfg = SamplerConfig(K=K, m=2, n_iters=n_iters, burn_in_states=0,
                        burn_in_params=0, thin_states=1, thin_params=1, seed=seed)
    rec = run_chain(y, cfg)
    return rec, summarize_record(rec)


class TestSummaryDocument:
    def test_top_level_keys(self):
        rec, summary = _record_and_summary()
        doc = summary_to_dict(summary, config_to_dict(rec.config),
                              make_provenance("fit", rec.config.seed))
        assert tuple(doc.keys()) == SUMMARY_KEYS

    def test_round_trip(self, tmp_path):
        rec, summary = _record_and_summary()
        doc = summary_to_dict(summary, config_to_dict(rec.config),
                              make_provenance("fit", rec.config.seed))
        path = tmp_path / "summary.json"
        write_json(path, doc)
        back = summary_from_dict(read_json(path))
        np.testing.assert_array_equal(back.corr_percentiles, summary.corr_percentiles)
        np.testing.assert_array_equal(back.nu_samples, summary.nu_samples)
        np.testing.assert_array_equal(back.d_samples, summary.d_samples)
        np.testing.assert_array_equal(back.nu_hist.edges, summary.nu_hist.edges)
        np.testing.assert_array_equal(back.d_hist.densities, summary.d_hist.densities)
        np.testing.assert_array_equal(back.acceptance["q"], summary.acceptance["q"])
        assert back.pairs == summary.pairs
        assert back.probs == summary.probs
        assert back.sample_counts == summary.sample_counts

    def test_missing_key_rejected(self):
        with pytest.raises(SchemaMismatchError):
            summary_from_dict({"config": {}})


class TestTraces:
    def test_round_trip(self, tmp_path):
        rec, _ = _record_and_summary()
        prefix = str(tmp_path / "run")
        write_traces(prefix, rec, make_provenance("fit", rec.config.seed))
        config_doc, acc_doc, nu, d, sweeps, states = read_traces(prefix)
        assert config_doc == config_to_dict(rec.config)
        np.testing.assert_array_equal(nu, rec.nu_trace)
        np.testing.assert_array_equal(d, rec.d_trace)
        np.testing.assert_array_equal(sweeps, rec.state_sweep_indices)
        np.testing.assert_array_equal(states, rec.q_inv_states)
        np.testing.assert_array_equal(acc_doc["accept_q"], rec.accept_q)
        assert acc_doc["proposals_nu"] == rec.proposals_nu

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaMismatchError):
            read_traces(str(tmp_path / "absent"))

    def test_malformed_header(self, tmp_path):
        prefix = str(tmp_path / "bad")
        with open(f"{prefix}_params_trace.csv", "w") as fh:
            fh.write("wrong,header\n1,2\n")
        with open(f"{prefix}_states_trace.csv", "w") as fh:
            fh.write("sweep,k,q_0_0\n")
        with pytest.raises(SchemaMismatchError):
            read_traces(prefix)

    def test_malformed_cells(self, tmp_path):
        rec, _ = _record_and_summary()
        prefix = str(tmp_path / "run")
        write_traces(prefix, rec, make_provenance("fit", rec.config.seed))
        path = f"{prefix}_params_trace.csv"
        text = open(path).read().replace("sweep,nu,d\n0,", "sweep,nu,d\n0,oops", 1)
        open(path, "w").write(text)
        with pytest.raises(SchemaMismatchError):
            read_traces(prefix)
