//! Matplotlib scripts for the generated CSV files.

const PRELUDE: &str = r##"import sys
from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def load(name):
    lines = [l for l in (HERE / name).read_text().splitlines() if not l.startswith("#")]
    return np.genfromtxt(lines, delimiter=",", names=True, dtype=None, encoding="utf-8")

"##;

pub fn spectrum_script(csv: &str, png: &str) -> String {
    format!(
        r##"{PRELUDE}
data = load("{csv}")
tracks = [n for n in data.dtype.names if n.startswith("abs_lambda_")]
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
for n in tracks:
    ax1.plot(data["s"], data[n], lw=1)
ax1.set_ylabel("|lambda_j|")
ax1.set_yscale("symlog", linthresh=1e-6)
ax2.semilogy(data["s"], data["gap"], label="gap")
ax2.semilogy(data["s"], np.maximum(data["semisimple_defect"], 1e-18), label="semisimple defect")
ax2.set_xlabel("s")
ax2.legend()
fig.tight_layout()
fig.savefig(HERE / "{png}", dpi=150)
if "--show" in sys.argv:
    plt.show()
"##
    )
}

pub fn sweep_script(csv: &str, fit_json: &str, png: &str) -> String {
    format!(
        r##"{PRELUDE}import json

data = load("{csv}")
fit = json.loads((HERE / "{fit_json}").read_text()).get("fit")
ok = data["flagged"] == 0
fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(data["t"][ok], data["error"][ok], "o", label="error")
if fit:
    t = np.geomspace(fit["window"][0], min(fit["window"][1], data["t"].max()), 50)
    ax.loglog(t, fit["prefactor"] / t ** fit["exponent"], "-",
              label="%.3g / T^%.3f" % (fit["prefactor"], fit["exponent"]))
ax.set_xlabel("T")
ax.set_ylabel("error at s = 1")
ax.legend()
fig.tight_layout()
fig.savefig(HERE / "{png}", dpi=150)
if "--show" in sys.argv:
    plt.show()
"##
    )
}

pub fn bound_script(csv: &str, png: &str) -> String {
    format!(
        r##"{PRELUDE}
data = load("{csv}")
fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(data["t"], data["error"], "o", label="error")
ax.loglog(data["t"], data["threshold"], "--", label="safety * C / T")
ax.set_xlabel("T")
ax.legend()
fig.tight_layout()
fig.savefig(HERE / "{png}", dpi=150)
if "--show" in sys.argv:
    plt.show()
"##
    )
}
