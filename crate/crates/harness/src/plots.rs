//! Generated matplotlib scripts. Runs write these next to the CSV files so
//! the figures can be produced offline with a stock Python installation.

/// Log-scale relative invariant drifts versus time, from `invariants.csv`.
pub fn invariants_script() -> String {
    r#"#!/usr/bin/env python3
"""Plot relative invariant drifts from invariants.csv (same directory)."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
t, rm, re_, rh = [], [], [], []
with open(os.path.join(here, "invariants.csv")) as f:
    for row in csv.DictReader(f):
        t.append(float(row["t"]))
        rm.append(float(row["RM"]))
        re_.append(float(row["RE"]))
        rh.append(float(row["RH"]))

eps = 1e-18  # keep exact zeros plottable on the log axis
fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogy(t, [max(v, eps) for v in rm], label="mass")
ax.semilogy(t, [max(v, eps) for v in re_], label="modified energy")
ax.semilogy(t, [max(v, eps) for v in rh], label="Hamiltonian energy")
ax.set_xlabel("t")
ax.set_ylabel("relative drift")
ax.legend()
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
out = os.path.join(here, "invariants.png")
fig.savefig(out, dpi=150)
print(out)
"#
    .to_string()
}

/// Log-log error versus step size with a reference slope, from
/// `convergence.csv`.
pub fn convergence_script(order: usize) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot the temporal convergence ladder from convergence.csv (same directory)."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
tau, err = [], []
with open(os.path.join(here, "convergence.csv")) as f:
    for row in csv.DictReader(f):
        tau.append(float(row["tau"]))
        err.append(float(row["linf_error"]))

order = {order}
fig, ax = plt.subplots(figsize=(5, 4))
ax.loglog(tau, err, "o-", label="max-norm error")
ref = [err[0] * (t / tau[0]) ** order for t in tau]
ax.loglog(tau, ref, "k--", alpha=0.5, label=f"slope {{order}}")
ax.set_xlabel("tau")
ax.set_ylabel("error at t_final")
ax.legend()
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
out = os.path.join(here, "convergence.png")
fig.savefig(out, dpi=150)
print(out)
"#
    )
}
