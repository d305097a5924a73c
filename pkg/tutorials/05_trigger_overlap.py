"""Loading a trigger table and measuring how often triggers fire together.

Run with ``python tutorials/05_trigger_overlap.py``.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from celime import ingest

rng = np.random.default_rng(0)
n = 500
pt = rng.exponential(20.0, n)
eta = rng.uniform(-2.5, 2.5, n)
muon = rng.random(n) < 0.3
electron = rng.random(n) < 0.25
triggers = {
    "HLT_Mu17": muon & (pt > 17),
    "HLT_Mu8": muon & (pt > 8),
    "HLT_Ele27": electron & (pt > 27),
    "HLT_Ele23": electron & (pt > 23),
    "HLT_PFJet40": pt > 40,
}

# %% write a CSV with a bad row, plus its schema, then load it back
tmp = Path(tempfile.mkdtemp())
lines = ["pt,eta," + ",".join(triggers)]
for i in range(n):
    lines.append(f"{float(pt[i])!r},{float(eta[i])!r}," + ",".join(str(int(t[i])) for t in triggers.values()))
lines.append("oops,0.1,1,0,0,0,0")
(tmp / "events.csv").write_text("\n".join(lines) + "\n")
schema = {"pt": "feature", "eta": "feature", **{t: "trigger" for t in triggers}}
ds = ingest.load_csv(tmp / "events.csv", schema)
print("load report", ds.report.to_dict())

# %% pairwise Jaccard overlap |A & B| / |A | B|
m = ingest.overlap_matrix(ds.trigger_outcomes, ds.trigger_names)
print(m.to_csv_text())

# %% conditional overlap |A & B| / |A|: every Mu17 event also fires Mu8
cond = ingest.overlap_matrix(ds.trigger_outcomes, ds.trigger_names, mode="conditional")
print("P(Mu8 | Mu17) =", cond.values[0, 1], " P(Mu17 | Mu8) =", round(cond.values[1, 0], 3))

# %% collapse triggers into categories by keyword
assignment, _, cats = ingest.group_categories(ds.trigger_names, ds.trigger_outcomes,
                                              {"Mu": "muon", "Ele": "electron"})
print(assignment)
print(cats.to_csv_text())
