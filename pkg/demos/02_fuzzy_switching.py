# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Replacing sign with fuzzy inference
#
# Each sign function is swapped for a Mamdani system: triangular sets on
# [-1, 1], identity rules, min/max composition and a centroid output.
# psi1 uses five labels, psi2 and psi3 use seven.

# %%
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from smobs import build_standard_psi, sign_switch
from smobs.config import preset_scenario
from smobs.simulate import run_comparison

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(OUT, exist_ok=True)

# %% [markdown]
# ## Transfer curves

# %%
xs = np.linspace(-1.2, 1.2, 481)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(xs, [sign_switch(x) for x in xs], "k--", lw=1, label="sign")
for index in (1, 2):
    psi = build_standard_psi(index)
    ax.plot(xs, [psi(x) for x in xs], label=f"psi{index}")
ax.set_xlabel("error")
ax.legend()
fig.savefig(os.path.join(OUT, "02_psi_curves.png"), dpi=120)

# %% [markdown]
# Near zero the fuzzy output is a continuous, roughly linear function of
# the error, so the correction no longer flips between +1 and -1 each step.
#
# ## Sign against fuzzy on the augmented plant
#
# Both observers share one ground-truth rollout; the fourth channel is the
# unknown input d = 0.1 sin t.

# %%
results = run_comparison([preset_scenario("fig3-sign-1e3"), preset_scenario("fig3-fuzzy-1e3")])
for trace, rep in results:
    print(f"{trace.name:16s} CI(zhat4) = {rep.chattering[3]:7.3f}   rmse(zhat4) = {rep.rmse[3]:.4f}")

# %%
fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
for ax, (trace, _) in zip(axes, results):
    ax.plot(trace.t, trace.z[:, 3], color="tab:blue", lw=1, label="d")
    ax.plot(trace.t, trace.z_hat[:, 3], color="tab:red", lw=0.6, label="estimate")
    ax.set_title(trace.name)
    ax.legend(loc="upper right")
axes[-1].set_xlabel("t [s]")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "02_sign_vs_fuzzy.png"), dpi=120)

# %% [markdown]
# At this step size the sign observer's input estimate swings by several
# units around d, while the fuzzy estimate stays within a few hundredths
# once the gates have opened.
