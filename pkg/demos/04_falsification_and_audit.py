# %% [markdown]
# # A falsification certificate and the corollary audit
#
# f(x) = 1/(x+1) solves the equation exactly, so mu = 0 satisfies the
# premise and Psi = 0. Yet 2^n f(2^n x) = 2^n / (2^n + 1) tends to 0
# 2-adically, so |f(1) - g(1)| = |1/2|_2 = 2.

# %%
from reciprocal_stability import ValuationSpec
from reciprocal_stability.harness import audit_corollaries, load_config, run_experiment

config = load_config({
    "valuation": "2", "function": "reciprocal:a=1,c=1", "mu": "constant:eps=0",
    "samples": 1, "sample_strategy": {"kind": "explicit", "values": ["1"]},
    "n_max": 64, "M": 30, "W": 8, "seed": 0,
})
report = run_experiment(config, write=False)
rec = report.records[0]
print(rec["status"], rec["f_minus_g_norm"], rec["psi"]["value"], "exit", report.exit_status)

# %% [markdown]
# Psi against the bounds printed with the three corollaries.

# %%
for row in audit_corollaries(ValuationSpec.padic(2), xs=("1", "1/2")):
    print(f"{row['family']} {row['params']:<24} x={row['x']:<4} Psi={row['psi']:<6} "
          f"printed={row['printed']:<6} {row['consistent']}")
