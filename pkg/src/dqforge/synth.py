"""Synthetic auction-equipment table used by the benchmark harness.

The layout mimics a public heavy-equipment auction dataset with 53 columns:
sale and machine identifiers, a product hierarchy (group -> class -> base
model -> model), per-model configuration columns, a handful of numeric
measurements and a long tail of sparsely filled option columns.

Properties the harness relies on:

* Configuration columns are functions of the product hierarchy, so every
  planted relation is exact (confidence 1). Unrelated columns are only
  loosely associated, far below the 99% rule threshold.
* ``SalesID`` alone repeats for about 8% of rows, always with a different
  ``ModelID``, so the pair is the natural key.
* Numeric columns are bounded near-Gaussian bulks; the two heavy-tailed ones
  owe their tail to a dense group of legitimate high values rather than to
  sparse extremes.
* With ``numeric_gaps=True`` a few columns get random holes in the
  proportions of the original data, so that only twelve columns stay below
  5% missing.
"""

from __future__ import annotations

import datetime as _dt
import string
from dataclasses import dataclass, field

import numpy as np

from .table import Table

STATES = [
    "Alabama", "Arizona", "Arkansas", "Colorado", "Connecticut", "Delaware", "Georgia",
    "Hawaii", "Idaho", "Illinois", "Indiana", "Kentucky", "Louisiana", "Maine", "Maryland",
    "Massachusetts", "Michigan", "Minnesota", "Mississippi", "Missouri", "Montana",
    "Nebraska", "New Hampshire", "New Jersey", "North Carolina", "Oregon", "Pennsylvania",
    "Rhode Island", "Tennessee", "Texas", "Vermont", "Virginia", "Washington", "Wisconsin",
    "Wyoming",
]

# code, description, share of rows
GROUPS = [
    ("TEX", "Track Excavators", 0.30),
    ("TTT", "Track Type Tractors", 0.20),
    ("WL", "Wheel Loader", 0.18),
    ("BL", "Backhoe Loaders", 0.16),
    ("MG", "Motor Graders", 0.08),
    ("SSL", "Skid Steer Loaders", 0.08),
]

ENCLOSURES = ["EROPS w AC", "OROPS", "None or Unspecified", "Canopy Cab", "Open Frame",
              "Sealed Cabin"]
HYDRAULICS = ["2 Valve", "3 Valve", "4 Valve", "Auxiliary 1", "Base + 1 Function",
              "Base + 3 Function"]

# column -> (values, groups where the column is filled)
GROUP_CONFIG = {
    "Drive_System": (["Two Wheel Drive", "Four Wheel Drive", "All Wheel Drive", "No",
                      "Six Wheel Drive"], {"WL", "BL", "SSL"}),
    "Pad_Type": (["None or Unspecified", "Reversible", "Street", "Grouser",
                  "Triple Grouser"], {"TEX"}),
    "Ripper": (["None or Unspecified", "Yes", "Multi Shank", "Single Shank",
                "Parallelogram"], {"TTT", "MG"}),
    "Transmission": (["Standard", "Powershift", "Hydrostatic", "Direct Drive", "Autoshift",
                      "Powershuttle"], {"TTT", "WL", "MG"}),
    "ProductSize": (["Mini", "Small", "Medium", "Large", "Compact"], {"TEX", "BL"}),
    "Hydraulics": (HYDRAULICS, {"TEX", "WL", "BL", "MG", "SSL"}),
}

# sparsely filled option columns: (values, groups where filled)
SPARSE_OPTIONS = {
    "Forks": (["None or Unspecified", "Yes"], {"SSL"}),
    "Ride_Control": (["None or Unspecified", "Yes", "No"], {"WL"}),
    "Stick": (["Standard", "Extended"], {"TEX"}),
    "Turbocharged": (["None or Unspecified", "Yes"], {"TEX"}),
    "Blade_Extension": (["None or Unspecified", "Yes"], {"MG"}),
    "Blade_Width": (["12'", "13'", "14'", "16'"], {"MG"}),
    "Enclosure_Type": (["None or Unspecified", "Low Profile", "High Profile"], {"MG"}),
    "Engine_Horsepower": (["No", "Variable"], {"MG"}),
    "Pushblock": (["None or Unspecified", "Yes"], {"MG"}),
    "Scarifier": (["None or Unspecified", "Yes"], {"MG"}),
    "Tip_Control": (["None or Unspecified", "Sideshift & Tip", "Tip"], {"MG"}),
    "Tire_Size": (['17.5"', '20.5"', '23.5"', '26.5"'], {"WL"}),
    "Coupler": (["None or Unspecified", "Manual", "Hydraulic"], {"TEX"}),
    "Coupler_System": (["None or Unspecified", "Yes"], {"SSL"}),
    "Grouser_Tracks": (["None or Unspecified", "Yes"], {"SSL"}),
    "Hydraulics_Flow": (["Standard", "High Flow"], {"SSL"}),
    "Track_Type": (["Steel", "Rubber"], {"TEX"}),
    "Undercarriage_Pad_Width": (["24 inch", "28 inch", "32 inch"], {"TEX"}),
    "Stick_Length": (["10' 6\"", "11' 0\"", "12' 10\""], {"TEX"}),
    "Thumb": (["None or Unspecified", "Manual", "Hydraulic"], {"TEX"}),
    "Pattern_Changer": (["None or Unspecified", "Yes", "No"], {"BL"}),
    "Grouser_Type": (["Double", "Triple", "Single"], {"TTT"}),
    "Backhoe_Mounting": (["None or Unspecified", "Yes"], set()),  # a few bases only
    "Blade_Type": (["PAT", "Straight", "Semi U", "VPAT"], {"TTT"}),
    "Travel_Controls": (["None or Unspecified", "Differential Steer", "Lever"], {"TTT"}),
    "Differential_Type": (["Standard", "Limited Slip"], {"WL"}),
    "Steering_Controls": (["Conventional", "Command Control"], {"WL"}),
}

COLUMNS = [
    "SalesID", "SalePrice", "MachineID", "ModelID", "datasource", "auctioneerID",
    "YearMade", "MachineHoursCurrentMeter", "UsageBand", "saledate", "fiModelDesc",
    "fiBaseModel", "fiSecondaryDesc", "fiModelSeries", "fiModelDescriptor", "ProductSize",
    "fiProductClassDesc", "state", "ProductGroup", "ProductGroupDesc", "Drive_System",
    "Enclosure", "Forks", "Pad_Type", "Ride_Control", "Stick", "Transmission",
    "Turbocharged", "Blade_Extension", "Blade_Width", "Enclosure_Type", "Engine_Horsepower",
    "Hydraulics", "Pushblock", "Ripper", "Scarifier", "Tip_Control", "Tire_Size", "Coupler",
    "Coupler_System", "Grouser_Tracks", "Hydraulics_Flow", "Track_Type",
    "Undercarriage_Pad_Width", "Stick_Length", "Thumb", "Pattern_Changer", "Grouser_Type",
    "Backhoe_Mounting", "Blade_Type", "Travel_Controls", "Differential_Type",
    "Steering_Controls",
]

KEY_COLUMNS = ("SalesID", "ModelID")
NUMERIC_COLUMNS = ("SalesID", "SalePrice", "MachineID", "ModelID", "datasource",
                   "auctioneerID", "YearMade", "MachineHoursCurrentMeter")
F1_COLUMNS = ("YearMade",)
F2_COLUMNS = ("SalePrice", "MachineHoursCurrentMeter")
TYPO_COLUMNS = ("state", "Enclosure", "ProductGroupDesc")
LOGIC_COLUMNS = ("Enclosure", "Ripper", "fiBaseModel", "Drive_System", "state",
                 "Transmission", "ProductGroupDesc", "fiProductClassDesc", "Pad_Type",
                 "fiSecondaryDesc", "saledate", "ProductSize", "Hydraulics", "fiModelDesc")

# missing rates applied with numeric_gaps=True
GAP_RATES = {"SalesID": 0.00047, "MachineID": 0.08, "SalePrice": 0.06,
             "MachineHoursCurrentMeter": 0.30, "Enclosure": 0.00025}


@dataclass
class Hierarchy:
    group: list[int]          # per model
    cls: list[int]            # per model
    base: list[int]           # per model
    class_desc: list[str]     # per class
    class_group: list[int]    # per class
    base_name: list[str]      # per base
    base_class: list[int]     # per base
    model_desc: list[str]
    secondary: list[str | None]
    series: list[str | None]
    descriptor: list[str | None]
    model_weight: np.ndarray  # probability per model
    base_config: dict[str, list[str | None]] = field(default_factory=dict)


def _code(rng, letters, digits):
    return ("".join(rng.choice(list(string.ascii_uppercase), letters))
            + "".join(rng.choice(list(string.digits), digits)))


def _spread(rng, n_items, n_bins):
    """Assign n_items to n_bins with every bin non-empty, returned sorted."""
    out = list(range(n_bins)) + list(rng.integers(0, n_bins, n_items - n_bins))
    out.sort()
    return out


def build_hierarchy(rng: np.random.Generator, classes_per_group: int = 3,
                    n_bases: int = 60, n_models: int = 150) -> Hierarchy:
    """Product hierarchy with near-uniform row weight per model.

    Groups differ in size through their number of models, not through the
    weight of individual models: any set of models matching some item then
    contributes rows roughly in proportion to its size, which keeps loose
    associations well away from the 99% rule threshold.
    """
    shares = np.array([g[2] for g in GROUPS])
    bases_per_group = np.maximum(classes_per_group, np.round(shares * n_bases)).astype(int)
    models_per_group = np.maximum(bases_per_group, np.round(shares * n_models)).astype(int)

    class_desc, class_group = [], []
    base_class: list[int] = []
    model_base: list[int] = []
    for gi, (_, desc, _) in enumerate(GROUPS):
        lo = 50.0
        first_class = len(class_desc)
        for _ in range(classes_per_group):
            hi = lo + float(rng.integers(2, 8)) * 10.0
            class_desc.append(f"{desc} - {lo:.1f} to {hi:.1f} Horsepower")
            class_group.append(gi)
            lo = hi
        first_base = len(base_class)
        base_class += [first_class + c for c in _spread(rng, int(bases_per_group[gi]),
                                                         classes_per_group)]
        model_base += [first_base + b for b in _spread(rng, int(models_per_group[gi]),
                                                        int(bases_per_group[gi]))]
    n_bases = len(base_class)
    n_models = len(model_base)

    names: set[str] = set()
    base_name = []
    for _ in base_class:
        while True:
            name = _code(rng, int(rng.integers(1, 3)), int(rng.integers(2, 4)))
            if name not in names:
                names.add(name)
                base_name.append(name)
                break

    suffixes = ["LC", "B", "XL", "II", "LGP", "K", "M", "E", "H", "XW", "ZTS", "L"]
    model_desc, model_cls, model_group, secondary = [], [], [], []
    series, descriptor = [], []
    used: dict[int, set] = {}
    for b in model_base:
        taken = used.setdefault(b, set())
        # first model of a base has no secondary descriptor
        if not taken:
            sec = None
        else:
            sec = next(str(s) for s in rng.permutation(suffixes) if s not in taken)
        taken.add(sec)
        secondary.append(sec)
        model_desc.append(base_name[b] + (sec or ""))
        model_cls.append(base_class[b])
        model_group.append(class_group[base_class[b]])
        series.append(str(rng.choice(["II", "III", "IV", "-6E", "-2C", "-3L"])) if rng.random() < 0.15
                      else None)
        descriptor.append(str(rng.choice(["LC", "L", "XLT", "LT", "XT"])) if rng.random() < 0.15
                          else None)

    model_w = rng.uniform(0.5, 1.5, n_models)

    h = Hierarchy(model_group, model_cls, model_base, class_desc, class_group, base_name,
                  base_class, model_desc, secondary, series, descriptor, model_w / model_w.sum())

    group_codes = [g[0] for g in GROUPS]
    for col, (values, allowed) in {**GROUP_CONFIG, **SPARSE_OPTIONS}.items():
        per_base = []
        for b in range(n_bases):
            g = group_codes[class_group[base_class[b]]]
            filled = g in allowed
            if col == "Backhoe_Mounting":
                filled = g == "BL" and b % 7 == 0
            per_base.append(values[int(rng.integers(len(values)))] if filled else None)
        h.base_config[col] = per_base
    h.base_config["Enclosure"] = [ENCLOSURES[int(rng.integers(len(ENCLOSURES)))]
                                  for _ in range(n_bases)]
    return h


def _irwin_hall(rng, k, size):
    return rng.random((size, k)).sum(axis=1)


def _heavy_column(rng, n, bulk_mean, bulk_sd, cluster_at, cluster_share, cluster_sd):
    """Bounded bulk plus a dense group of legitimate high values."""
    bulk = bulk_mean + (_irwin_hall(rng, 3, n) - 1.5) / 0.5 * bulk_sd
    high = rng.random(n) < cluster_share
    # uniform so the group has no thin edges for an isolation test to pick off
    cluster = bulk_mean + cluster_at * bulk_sd + rng.uniform(-1.0, 1.0, n) * cluster_sd
    return np.where(high, cluster, bulk)


@dataclass
class SyntheticData:
    table: Table
    hierarchy: Hierarchy
    seed: int
    numeric_gaps: bool


def bulldozers_like(n_rows: int = 10_000, seed: int = 0, numeric_gaps: bool = False,
                    sales_id_collision_rate: float = 0.08) -> SyntheticData:
    rng = np.random.default_rng(seed)
    h = build_hierarchy(rng)
    n = n_rows
    model = rng.choice(len(h.model_desc), size=n, p=h.model_weight)
    base = np.asarray(h.base)[model]
    cls = np.asarray(h.cls)[model]
    group = np.asarray(h.group)[model]

    # machines: a pool per model, each machine sold a few times
    machine = np.empty(n, dtype=np.int64)
    next_id = 1000000
    for m in np.unique(model):
        rows = np.flatnonzero(model == m)
        pool = next_id + np.arange(max(1, int(len(rows) / 1.5)))
        next_id += pool.size + int(rng.integers(1, 50))
        machine[rows] = rng.choice(pool, size=rows.size)

    sales = 1139246 + np.cumsum(rng.integers(1, 40, size=n))
    # SalesID collisions: a row re-uses the id (and machine) of a partner row
    # with another model, so SalesID repeats while (SalesID, ModelID) stays unique
    n_coll = int(round(sales_id_collision_rate * n))
    order = rng.permutation(n)
    victims, partners = [], []
    pool = list(order)
    used = set()
    i = 0
    while len(victims) < n_coll and i + 1 < len(pool):
        v, p = pool[i], pool[i + 1]
        i += 2
        if model[v] == model[p] or v in used or p in used:
            continue
        used.update((v, p))
        victims.append(v)
        partners.append(p)
    sales[victims] = sales[partners]
    machine[victims] = machine[partners]

    # triangular bulk: stays inside 2.5 standard deviations
    year = 1980.0 + np.round(_irwin_hall(rng, 2, n) * 10.0)
    # half a rounding step wider, so the end price levels are as full as the rest
    price = _heavy_column(rng, n, 30000.0, 8000.0, 14.0, 0.01, 1625.0)
    price = np.round(price / 250.0) * 250.0
    hours = _heavy_column(rng, n, 4000.0, 1200.0, 14.0, 0.01, 200.0)
    hours = np.round(np.clip(hours, 0.0, None), 1)

    start = _dt.date(2000, 1, 3)
    dates = [start + _dt.timedelta(days=int(d)) for d in rng.integers(0, 4000, size=n)]
    saledate = [f"{d.month}/{d.day}/{d.year} 0:00" for d in dates]

    groups_code = [GROUPS[g][0] for g in group]
    product_group = [c if rng.random() > 0.78 else None for c in groups_code]

    cols: dict[str, list] = {c: [None] * n for c in COLUMNS}
    cols["SalesID"] = sales.astype(float).tolist()
    cols["SalePrice"] = price.tolist()
    cols["MachineID"] = machine.astype(float).tolist()
    cols["ModelID"] = (3000.0 + model * 7).tolist()
    cols["datasource"] = rng.choice([121.0, 132.0, 136.0, 149.0, 172.0], size=n).tolist()
    cols["auctioneerID"] = rng.integers(1, 31, size=n).astype(float).tolist()
    cols["YearMade"] = year.tolist()
    cols["MachineHoursCurrentMeter"] = hours.tolist()
    cols["UsageBand"] = [str(rng.choice(["Low", "Medium", "High"])) if rng.random() < 0.18 else None
                         for _ in range(n)]
    cols["saledate"] = saledate
    cols["fiModelDesc"] = [h.model_desc[m] for m in model]
    cols["fiBaseModel"] = [h.base_name[b] for b in base]
    cols["fiSecondaryDesc"] = [h.secondary[m] for m in model]
    cols["fiModelSeries"] = [h.series[m] for m in model]
    cols["fiModelDescriptor"] = [h.descriptor[m] for m in model]
    cols["fiProductClassDesc"] = [h.class_desc[c] for c in cls]
    cols["state"] = [STATES[i] for i in rng.integers(0, len(STATES), size=n)]
    cols["ProductGroup"] = product_group
    cols["ProductGroupDesc"] = [GROUPS[g][1] for g in group]
    for col, per_base in h.base_config.items():
        cols[col] = [per_base[b] for b in base]

    if numeric_gaps:
        for col, rate in GAP_RATES.items():
            k = max(1, int(round(rate * n)))
            for pos in rng.choice(n, size=k, replace=False):
                cols[col][pos] = None

    return SyntheticData(Table(cols), h, seed, numeric_gaps)
