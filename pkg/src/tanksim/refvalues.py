"""Bundled benchmark values for the two reference tanks.

Provenance: published shake-table / detailed-FE benchmark study of these
two scale-model tanks (slender 1:4 anchored steel tank, broad 1:18
unanchored stainless tank); the "en" column is the EN 1998-4 Annex A
formula evaluation reported alongside.  Periods in seconds, lengths in
metres.  Shipped as constants so `report` can print deviations without
network access.
"""

# Modal periods: {case: {"fe": detailed-FE column, "en": code-formula column}}
MODAL_PERIODS = {
    "slender": {
        "fe": {"impulsive": 0.061, "convective": (1.478, 0.867, 0.679)},
        "en": {"impulsive": 0.069, "convective": (1.479, 0.869, 0.687)},
    },
    "broad": {
        "fe": {"impulsive": 0.013, "convective": (2.100, 1.068, 0.895)},
        "en": {"impulsive": 0.016, "convective": (2.100, 1.068, 0.841)},
    },
}

# Peak responses of the broad tank under three scaled records
# (detailed-FE / spring-mass / shake-table benchmark columns).
PEAK_RESPONSES = {
    "broad": {
        "wave_height": {        # m, at the wall
            "chi_chi": {"fe": 0.081, "spring_mass": 0.074, "test": 0.086},
        },
        "uplift": {             # m, base edge
            "northridge": {"fe": 0.020, "spring_mass": 0.016, "test": 0.021},
        },
    },
}

# Total filled masses of the bundled specs, kg.
TOTAL_MASSES = {"slender": 16.4e3, "broad": 5.6e3}
