"""
From monthly aggregates to observational scales
===============================================

The bundled 1996 monthly table is parsed with Brazilian number formatting,
checked for internal consistency, turned into pairwise Minkowski
dissimilarities and finally into the scale factors u0, v0, w0 that feed the
model, either as constants or as a month-by-month schedule.
"""
import numpy as np

from labordyn import (IntegrationConfig, ModelParams, build_matrix, integrate, load_caged_1996, observational_scales,
                      parse_dataset, series_from_records, validate_balances)
from labordyn.errors import ParseError

data = load_caged_1996()
for rec in data.records[:3]:
    print(rec.period, rec.balance, rec.workers, rec.employers)

# The balance column should be the month-over-month change in worker stock
print("balance discrepancies:", validate_balances(data))

# Reading the same bytes as plain decimals would shrink values 1000-fold; it is refused
try:
    parse_dataset("01/1996;-12.626;23.743.110;336.946", locale="plain")
except ParseError as exc:
    print("plain locale:", exc)

# Raw distances are dominated by the worker stock; normalized ones weigh features equally
raw = build_matrix(data, r=2)
scaled = build_matrix(data, r=2, normalize=True)
print("Jan-Feb distance, raw:", round(raw.values[0, 1], 1), " normalized:", round(scaled.values[0, 1], 4))
print("most dissimilar pair (normalized):", np.unravel_index(np.argmax(scaled.values), scaled.values.shape))

workers = series_from_records(data, "workers", lag=1)
print("worker dissimilarity stream:", workers.values.astype(int))

# Constant scales (series means) and a monthly schedule normalized around 1
print("mean scales:", observational_scales(data, normalize=False))
schedule = observational_scales(data, mode="streamed", period=1.0)

config = IntegrationConfig(0.0, 11.0, 0.01, record_every=100)
plain_run = integrate(ModelParams(), (1.0, 1.0, 1.0), config)
streamed_run = integrate(ModelParams(), (1.0, 1.0, 1.0), config, scales=schedule)
print("final state, unit scales:   ", np.round(plain_run.final, 4))
print("final state, monthly scales:", np.round(streamed_run.final, 4))
