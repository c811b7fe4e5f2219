#!/usr/bin/env python3
# Copyright 2026 The unifair Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Capital-to-capital geodesic distances from geographiclib (Karney).

Writes tests/fixtures/geodesic_pairs.csv with distances in km, frozen so
the C++ tests do not need Python at run time.

    python3 tests/oracle/geodesic_oracle.py
"""

import csv
import pathlib

from geographiclib.geodesic import Geodesic

ROOT = pathlib.Path(__file__).resolve().parents[2]

PAIRS = [
    ("United Kingdom", "France"),
    ("New Zealand", "Spain"),
    ("Nigeria", "United States"),
    ("Nigeria", "United Kingdom"),
    ("India", "United States"),
    ("China", "Australia"),
    ("Brazil", "Japan"),
    ("Kenya", "Germany"),
    ("Canada", "South Africa"),
    ("Argentina", "Russia"),
    ("Ghana", "Nigeria"),
    ("Indonesia", "Mexico"),
    ("Pakistan", "Egypt"),
    ("Chile", "South Korea"),
]


def main():
    with open(ROOT / "core" / "assets" / "capitals.csv", newline="") as f:
        caps = {r["country"]: (float(r["lat"]), float(r["lon"])) for r in csv.DictReader(f)}
    out = ROOT / "tests" / "fixtures" / "geodesic_pairs.csv"
    with open(out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["from", "to", "lat1", "lon1", "lat2", "lon2", "km"])
        for a, b in PAIRS:
            (lat1, lon1), (lat2, lon2) = caps[a], caps[b]
            s12 = Geodesic.WGS84.Inverse(lat1, lon1, lat2, lon2)["s12"]
            w.writerow([a, b, lat1, lon1, lat2, lon2, f"{s12 / 1000.0:.9f}"])
    print(f"wrote {len(PAIRS)} pairs to {out}")


if __name__ == "__main__":
    main()
