"""Serialization of results: summary JSON, trace CSVs, plot-ready CSVs.

All floating-point values are written with 17 significant digits, which is
enough to round-trip IEEE doubles exactly; the stdlib json encoder cannot be
configured for that, so a small emitter lives here (strings are escaped via
json.dumps, parsing uses json.loads). No timestamps are embedded anywhere:
rerunning a command with the same seed reproduces outputs byte for byte.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__
from .exceptions import SchemaMismatchError
from .posterior import Histogram, PosteriorSummary

SUMMARY_KEYS = (
    "config",
    "percentiles",
    "nu_samples",
    "d_samples",
    "nu_hist",
    "d_hist",
    "acceptance",
    "provenance",
)


def format_float(x):
    """17-significant-digit decimal form of a finite float."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(float(x), ".17g")


def dumps_json(obj, indent=2):
    """Serialize nested dict/list/scalar data to JSON text."""
    out = []
    _emit(obj, out, indent, 0)
    out.append("\n")
    return "".join(out)


def _emit(obj, out, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(pad_in)
            out.append(json.dumps(key))
            out.append(": ")
            _emit(value, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        # scalar-only lists stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            out.append("[" + ", ".join(_scalar(v) for v in items) + "]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(pad_in)
            _emit(value, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(value):
    if value is None or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json(obj))


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def make_provenance(command, seed, **extra):
    prov = {"tool": "dyncorr", "version": __version__, "command": command, "seed": seed}
    prov.update(extra)
    return prov


def config_to_dict(config):
    return {
        "K": config.K,
        "m": config.m,
        "n_iters": config.n_iters,
        "alpha_nu": config.alpha_nu,
        "beta_nu": config.beta_nu,
        "nu_var": config.nu_var,
        "a_f": config.a_f,
        "nu_init": config.nu_init,
        "d_init": config.d_init,
        "burn_in_states": config.burn_in_states,
        "burn_in_params": config.burn_in_params,
        "thin_states": config.thin_states,
        "thin_params": config.thin_params,
        "seed": config.seed,
    }


def summary_to_dict(summary, config_dict, provenance):
    """Summary JSON document (fixed top-level key set SUMMARY_KEYS)."""
    return {
        "config": config_dict,
        "percentiles": {
            "probs": list(summary.probs),
            "pairs": [list(p) for p in summary.pairs],
            "values": summary.corr_percentiles,
            "n_samples": summary.sample_counts["states"],
        },
        "nu_samples": summary.nu_samples,
        "d_samples": summary.d_samples,
        "nu_hist": _hist_to_dict(summary.nu_hist),
        "d_hist": _hist_to_dict(summary.d_hist),
        "acceptance": {
            "q": summary.acceptance["q"],
            "q_mean": summary.acceptance["q_mean"],
            "nu": summary.acceptance["nu"],
            "d": summary.acceptance["d"],
            "n_samples": summary.sample_counts["params"],
        },
        "provenance": provenance,
    }


def _hist_to_dict(hist):
    return {
        "edges": hist.edges,
        "densities": hist.densities,
        "n_samples": hist.n_samples,
        "n_clipped": hist.n_clipped,
    }


def summary_from_dict(doc):
    """Rebuild a PosteriorSummary from a parsed summary JSON document."""
    missing = [k for k in SUMMARY_KEYS if k not in doc]
    if missing:
        raise SchemaMismatchError(f"summary document missing keys: {missing}")
    pct = doc["percentiles"]
    acc = doc["acceptance"]
    return PosteriorSummary(
        probs=tuple(pct["probs"]),
        pairs=[tuple(p) for p in pct["pairs"]],
        corr_percentiles=np.asarray(pct["values"], dtype=np.float64),
        nu_samples=np.asarray(doc["nu_samples"], dtype=np.float64),
        d_samples=np.asarray(doc["d_samples"], dtype=np.float64),
        nu_hist=_hist_from_dict(doc["nu_hist"]),
        d_hist=_hist_from_dict(doc["d_hist"]),
        acceptance={
            "q": np.asarray(acc["q"], dtype=np.float64),
            "q_mean": acc["q_mean"],
            "nu": acc["nu"],
            "d": acc["d"],
        },
        sample_counts={"states": pct["n_samples"], "params": acc["n_samples"]},
    )


def _hist_from_dict(doc):
    return Histogram(
        edges=np.asarray(doc["edges"], dtype=np.float64),
        densities=np.asarray(doc["densities"], dtype=np.float64),
        n_samples=int(doc["n_samples"]),
        n_clipped=int(doc["n_clipped"]),
    )


# ---------------------------------------------------------------------------
# CSV outputs. Our own CSVs start with '#'-prefixed provenance lines; the
# loader in dyncorr.data skips those, so simulated observations remain
# readable by `fit`.
# ---------------------------------------------------------------------------


def _provenance_lines(provenance):
    return [f"# {key}={value}" for key, value in provenance.items()]


def write_matrix_csv(path, matrix, header, provenance=None):
    """Numeric matrix as CSV with optional '#' provenance lines and header."""
    matrix = np.asarray(matrix, dtype=np.float64)
    lines = []
    if provenance:
        lines.extend(_provenance_lines(provenance))
    if header is not None:
        lines.append(",".join(header))
    for row in matrix:
        lines.append(",".join(format_float(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def params_trace_path(prefix):
    return f"{prefix}_params_trace.csv"


def states_trace_path(prefix):
    return f"{prefix}_states_trace.csv"


def write_traces(prefix, record, provenance):
    """Full-length parameter traces plus recorded latent states.

    Parameters are one row per sweep so any burn-in/thinning can be
    re-applied later; latent states are one row per (recorded sweep, k) with
    the upper triangle of Q_k^-1, tagged with their sweep index. Acceptance
    counters ride along as a comment line so re-summarization can echo them.
    """
    config_json = json.dumps(config_to_dict(record.config), sort_keys=True)
    acceptance_json = json.dumps(
        {
            "accept_q": record.accept_q.tolist(),
            "accept_nu": int(record.accept_nu),
            "accept_d": int(record.accept_d),
            "proposals_q": record.proposals_q.tolist(),
            "proposals_nu": int(record.proposals_nu),
            "proposals_d": int(record.proposals_d),
        },
        sort_keys=True,
    )
    m = record.config.m
    tri = [(i, j) for i in range(m) for j in range(i, m)]

    lines = _provenance_lines(provenance)
    lines.append(f"# config={config_json}")
    lines.append(f"# acceptance={acceptance_json}")
    lines.append("sweep,nu,d")
    for i in range(len(record.nu_trace)):
        lines.append(
            f"{i},{format_float(record.nu_trace[i])},{format_float(record.d_trace[i])}"
        )
    with open(params_trace_path(prefix), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    lines = _provenance_lines(provenance)
    lines.append(f"# config={config_json}")
    lines.append("sweep,k," + ",".join(f"q_{i}_{j}" for i, j in tri))
    for s, sweep in enumerate(record.state_sweep_indices):
        for k in range(record.config.K):
            entries = ",".join(
                format_float(record.q_inv_states[s, k, i, j]) for i, j in tri
            )
            lines.append(f"{int(sweep)},{k},{entries}")
    with open(states_trace_path(prefix), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_traces(prefix):
    """Read back what write_traces wrote.

    Returns (config_dict, acceptance_dict, nu_trace, d_trace,
    state_sweep_indices, q_inv_states). Raises SchemaMismatchError on
    malformed files.
    """
    config_doc = None
    acceptance_doc = None

    def _read_rows(path, expected_prefix_cols):
        nonlocal config_doc, acceptance_doc
        try:
            fh = open(path, "r", encoding="utf-8")
        except OSError as exc:
            raise SchemaMismatchError(f"cannot open trace file {path}: {exc}") from exc
        with fh:
            header = None
            rows = []
            for line in fh:
                line = line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                if line.startswith("#"):
                    if line.startswith("# config="):
                        doc = json.loads(line[len("# config=") :])
                        if config_doc is not None and doc != config_doc:
                            raise SchemaMismatchError(
                                "trace files carry inconsistent configs"
                            )
                        config_doc = doc
                    elif line.startswith("# acceptance="):
                        acceptance_doc = json.loads(line[len("# acceptance=") :])
                    continue
                if header is None:
                    header = line.split(",")
                    if header[: len(expected_prefix_cols)] != expected_prefix_cols:
                        raise SchemaMismatchError(
                            f"{path}: unexpected header {header!r}"
                        )
                    continue
                rows.append(line.split(","))
            if header is None:
                raise SchemaMismatchError(f"{path}: missing header row")
            return header, rows

    header, rows = _read_rows(params_trace_path(prefix), ["sweep", "nu", "d"])
    try:
        nu_trace = np.array([float(r[1]) for r in rows])
        d_trace = np.array([float(r[2]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise SchemaMismatchError(f"malformed parameter trace row: {exc}") from exc
    if config_doc is None:
        raise SchemaMismatchError("trace files carry no config line")
    if acceptance_doc is None:
        raise SchemaMismatchError("trace files carry no acceptance line")

    m = int(config_doc["m"])
    K = int(config_doc["K"])
    tri = [(i, j) for i in range(m) for j in range(i, m)]
    header, rows = _read_rows(states_trace_path(prefix), ["sweep", "k"])
    if len(header) != 2 + len(tri):
        raise SchemaMismatchError(
            f"states trace has {len(header)} columns, expected {2 + len(tri)}"
        )
    if len(rows) % K != 0:
        raise SchemaMismatchError(
            f"states trace row count {len(rows)} is not a multiple of K={K}"
        )
    n_rec = len(rows) // K
    sweeps = np.empty(n_rec, dtype=np.int64)
    states = np.empty((n_rec, K, m, m))
    try:
        for s in range(n_rec):
            for k in range(K):
                r = rows[s * K + k]
                if int(r[1]) != k:
                    raise SchemaMismatchError(
                        f"states trace out of order at block {s}, row {k}"
                    )
                if k == 0:
                    sweeps[s] = int(r[0])
                elif int(r[0]) != sweeps[s]:
                    raise SchemaMismatchError(
                        f"states trace sweep index changes inside block {s}"
                    )
                for c, (i, j) in enumerate(tri):
                    value = float(r[2 + c])
                    states[s, k, i, j] = value
                    states[s, k, j, i] = value
    except (ValueError, IndexError) as exc:
        raise SchemaMismatchError(f"malformed states trace row: {exc}") from exc
    return config_doc, acceptance_doc, nu_trace, d_trace, sweeps, states


def write_percentiles_csv(path, summary, provenance=None):
    """Plot-ready long-format percentiles: one row per (k, pair)."""
    lines = []
    if provenance:
        lines.extend(_provenance_lines(provenance))
    prob_cols = ",".join(f"p{p:g}" for p in summary.probs)
    lines.append(f"k,pair,{prob_cols}")
    n_probs, K, n_pairs = summary.corr_percentiles.shape
    for k in range(K):
        for p, (i, j) in enumerate(summary.pairs):
            vals = ",".join(
                format_float(summary.corr_percentiles[q, k, p]) for q in range(n_probs)
            )
            lines.append(f"{k},{i}-{j},{vals}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_hist_csv(path, hist, provenance=None):
    """Plot-ready histogram: bin_left, bin_right, density."""
    lines = []
    if provenance:
        lines.extend(_provenance_lines(provenance))
    lines.append("bin_left,bin_right,density")
    for b in range(len(hist.densities)):
        lines.append(
            f"{format_float(hist.edges[b])},{format_float(hist.edges[b + 1])},"
            f"{format_float(hist.densities[b])}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
