# Gravity equation for bilateral trade, fitted by PPML with dyadic-robust
# standard errors.
#
# Needs the "Log of Gravity" data of Santos Silva and Tenreyro (not shipped
# here). Pass either their Stata file or a CSV with columns
# exporter, importer, trade, lyex, lyim, ldist:
#
#     python demos/04_gravity.py path/to/log_of_gravity.dta
#
# Reading .dta needs pandas. The script writes a CSV next to the input that
# the command line tool can also consume:
#
#     dyadreg fit --dyads gravity.csv --outcome trade --regressors lyex,lyim,ldist \
#         --ego exporter --alter importer

import sys
from pathlib import Path

import numpy as np

from dyadreg import assemble_vcov, fit_poisson_pml, sym_scores
from dyadreg.fit import FitOptions
from dyadreg.io import load_dyads_csv

if len(sys.argv) < 2:
    sys.exit(__doc__ or "usage: python demos/04_gravity.py DATA")

src = Path(sys.argv[1])
if src.suffix.lower() == ".dta":
    import pandas as pd

    raw = pd.read_stata(src)
    # country identifiers: s1_im / s2_ex in the original file
    ego = "s2_ex" if "s2_ex" in raw else "exporter"
    alter = "s1_im" if "s1_im" in raw else "importer"
    out = raw[[ego, alter, "trade", "lyex", "lyim", "ldist"]].rename(columns={ego: "exporter", alter: "importer"})
    csv_path = src.with_suffix(".csv")
    out.to_csv(csv_path, index=False, float_format="%.17g")
    print(f"wrote {csv_path}")
else:
    csv_path = src

ds = load_dyads_csv(csv_path, "trade", ["lyex", "lyim", "ldist"], "exporter", "importer", intercept=True)
print(f"{ds.n_nodes} countries, {ds.n_dyads} directed trade flows")

# Trade flows are large numbers, so the absolute score tolerance is scaled to
# the outcome level.
tol = max(1e-10, 1e-12 * float(np.mean(ds.y)) * float(np.abs(ds.X).max()))
fit = fit_poisson_pml(ds, FitOptions(gradient_tolerance=tol))
vc = assemble_vcov(fit, sym_scores(ds, fit.theta_hat))

print(f"\n{'':10s}{'estimate':>10s}{'dyad SE':>10s}{'FG SE':>10s}")
for k, name in enumerate(ds.regressor_names):
    print(f"{name:10s}{fit.theta_hat[k]:10.4f}{vc.se_dyad[k]:10.4f}{vc.se_fg[k]:10.4f}")
