"""Deterministic synthetic crash-data generator.

Stands in for the non-public source database: given a seed and target
marginals it emits crash/person CSVs plus a tribal-boundary GeoJSON whose
statistics converge to the requested mixes. All randomness flows from
numpy's PCG64 bit generator in a fixed draw order, so identical specs
reproduce byte-identical files on any platform.
"""

from __future__ import annotations

import bisect
import csv
import datetime
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

SEVERITY_CODES = ("K", "A", "B", "C", "O")
ROAD_COMBOS = ("rural_highway", "rural_non_highway", "urban_highway", "urban_non_highway")

# Published Wisconsin 2017-2021 marginals behind the calibrated default
# spec: tribal severity counts 20/88/357/309/2622 of 3396; statewide KAB
# 77516 and KA 16450 of 672363; road-type rows as (total, kab, ka).
_TRIBAL_SEVERITY_COUNTS = {"K": 20, "A": 88, "B": 357, "C": 309, "O": 2622}
_ROAD_ROWS_TRIBAL = {
    "rural_highway": (543, 87, 27),
    "rural_non_highway": (1040, 153, 51),
    "urban_highway": (817, 98, 10),
    "urban_non_highway": (996, 127, 20),
}
_ROAD_ROWS_STATEWIDE = {
    "rural_highway": (138268, 17061, 4460),
    "rural_non_highway": (147508, 18517, 5064),
    "urban_highway": (118936, 13901, 2383),
    "urban_non_highway": (267651, 28037, 4543),
}

DEFAULT_BBOX = (-92.9, 42.5, -86.8, 47.1)

_CRASH_HEADER = [
    "crash_id", "crash_date", "longitude", "latitude", "crshloc", "crshjur",
    "agcytype", "trbcode", "trbname", "road_functional", "urban_rural",
    "crash_type", "flag_speeding", "flag_impaired", "flag_pedestrian",
    "flag_hitrun", "flag_beltnonuse",
]
_PERSON_HEADER = ["crash_id", "role", "sex", "age", "injury"]

_TRIBAL_TYPE_MIX = {
    "ANL NA": 0.18, "Ditch": 0.10, "Tree": 0.06, "ANL ND": 0.05,
    "Rear End": 0.12, "Angle": 0.10, "Sideswipe": 0.08, "Overturn": 0.05,
    "Pedestrian": 0.01, "Embankment": 0.03, "Intersection": 0.10,
    "Head On": 0.04, "Parked": 0.05, "Other": 0.03,
}
_STATEWIDE_TYPE_MIX = {
    "ANL NA": 0.10, "Ditch": 0.05, "Tree": 0.03, "ANL ND": 0.03,
    "Rear End": 0.20, "Angle": 0.14, "Sideswipe": 0.10, "Overturn": 0.03,
    "Pedestrian": 0.01, "Embankment": 0.02, "Intersection": 0.15,
    "Head On": 0.04, "Parked": 0.07, "Other": 0.03,
}

_TRIBAL_FLAG_RATES = {
    "speeding": 0.143, "impaired": 0.093, "pedestrian": 0.009,
    "hitrun": 0.099, "beltnonuse": 0.085,
}
_STATEWIDE_FLAG_RATES = {
    "speeding": 0.141, "impaired": 0.060, "pedestrian": 0.010,
    "hitrun": 0.145, "beltnonuse": 0.075,
}
_FLAG_ORDER = ("speeding", "impaired", "pedestrian", "hitrun", "beltnonuse")

_SEX_MIX = {"F": 0.37, "M": 0.53, "U": 0.10}
# age-bin weights: seven bins then unknown
_AGE_BIN_MIX = (0.0005, 0.0095, 0.23, 0.32, 0.23, 0.07, 0.05, 0.09)
_AGE_BINS = ((0, 4), (5, 14), (15, 24), (25, 44), (45, 64), (65, 74), (75, 90))


class SynthSpecError(ValueError):
    """Invalid generator specification."""


@dataclass(frozen=True)
class ScopeMix:
    """Marginal targets for one scope (tribal or statewide)."""

    severity: dict[str, float]
    road: dict[str, float]
    severity_by_road: dict[str, dict[str, float]] = field(default_factory=dict)
    crash_types: dict[str, float] = field(default_factory=dict)
    flags: dict[str, float] = field(default_factory=dict)

    def validate(self, scope: str) -> None:
        _check_mix(self.severity, f"{scope} severity_mix", SEVERITY_CODES)
        _check_mix(self.road, f"{scope} road_mix", ROAD_COMBOS)
        for combo, mix in self.severity_by_road.items():
            if combo not in ROAD_COMBOS:
                raise SynthSpecError(f"unknown road combo {combo!r}")
            _check_mix(mix, f"{scope} severity_by_road[{combo}]", SEVERITY_CODES)
        if self.crash_types:
            _check_mix(self.crash_types, f"{scope} crash_types", None)


@dataclass(frozen=True)
class ClusterSpec:
    """Planted spatial cluster: share of background points drawn near a center."""

    lon: float
    lat: float
    weight: float  # fraction of non-tribal points routed to this cluster
    spread: float = 0.004  # stddev in degrees


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_crashes: int
    tribal_fraction: float
    tribal: ScopeMix
    statewide: ScopeMix
    cluster_centers: tuple[ClusterSpec, ...] = ()
    year_range: tuple[int, int] = (2017, 2021)
    bbox: tuple[float, float, float, float] = DEFAULT_BBOX
    n_tribes: int = 11
    tribe_size: float = 0.18  # square edge length in degrees
    attr_only_rate: float = 0.03
    spatial_only_rate: float = 0.03
    conflict_rate: float = 0.01
    missing_location_rate: float = 0.02
    persons_mix: tuple[float, ...] = (0.6, 0.3, 0.1)  # P(1), P(2), ... persons

    def validate(self) -> None:
        if self.n_crashes < 0:
            raise SynthSpecError("n_crashes must be >= 0")
        if not 0.0 <= self.tribal_fraction <= 1.0:
            raise SynthSpecError("tribal_fraction must be in [0, 1]")
        if self.year_range[0] > self.year_range[1]:
            raise SynthSpecError("year_range start after end")
        if self.n_tribes < 1:
            raise SynthSpecError("n_tribes must be >= 1")
        self.tribal.validate("tribal")
        self.statewide.validate("statewide")
        if abs(sum(self.persons_mix) - 1.0) > 1e-9 or any(p < 0 for p in self.persons_mix):
            raise SynthSpecError("persons_mix must be probabilities summing to 1")
        total_weight = sum(c.weight for c in self.cluster_centers)
        if total_weight > 1.0 + 1e-9:
            raise SynthSpecError("cluster weights exceed 1")


def _check_mix(mix: dict[str, float], name: str, keys: Optional[Sequence[str]]) -> None:
    if keys is not None:
        unknown = set(mix) - set(keys)
        if unknown:
            raise SynthSpecError(f"{name} has unknown keys {sorted(unknown)}")
    if any(v < 0 for v in mix.values()):
        raise SynthSpecError(f"{name} has negative probabilities")
    total = sum(mix.values())
    if abs(total - 1.0) > 1e-9:
        raise SynthSpecError(f"{name} sums to {total}, expected 1")


def _severity_mix_from_rates(
    kab_rate: float, ka_rate: float, k_share_of_ka: float, c_share_of_rest: float
) -> dict[str, float]:
    ka = ka_rate
    kab = kab_rate
    rest = 1.0 - kab
    mix = {
        "K": ka * k_share_of_ka,
        "A": ka * (1.0 - k_share_of_ka),
        "B": kab - ka,
        "C": rest * c_share_of_rest,
        "O": rest * (1.0 - c_share_of_rest),
    }
    # squash float residue so the mix sums to exactly 1
    mix["O"] = 1.0 - (mix["K"] + mix["A"] + mix["B"] + mix["C"])
    return mix


def calibrated_spec(
    seed: int,
    n_crashes: int,
    tribal_fraction: float = 0.5,
    cluster_centers: tuple[ClusterSpec, ...] = (),
    **overrides,
) -> SynthSpec:
    """Spec whose severity and road-type mixes follow the published Wisconsin
    2017-2021 tribal vs statewide crash marginals.

    The statewide K/A and C/O splits are not published separately, so the
    tribal ratios fill them in; the group totals (KAB, KA) are exact.
    """
    tribal_total = sum(_TRIBAL_SEVERITY_COUNTS.values())
    tribal_severity = {
        code: count / tribal_total for code, count in _TRIBAL_SEVERITY_COUNTS.items()
    }
    k_share = _TRIBAL_SEVERITY_COUNTS["K"] / (
        _TRIBAL_SEVERITY_COUNTS["K"] + _TRIBAL_SEVERITY_COUNTS["A"]
    )
    c_share = _TRIBAL_SEVERITY_COUNTS["C"] / (
        _TRIBAL_SEVERITY_COUNTS["C"] + _TRIBAL_SEVERITY_COUNTS["O"]
    )

    def scope_mix(
        rows: dict[str, tuple[int, int, int]],
        severity: dict[str, float],
        crash_types: dict[str, float],
        flags: dict[str, float],
    ) -> ScopeMix:
        scope_total = sum(t for t, _, _ in rows.values())
        road = {combo: t / scope_total for combo, (t, _, _) in rows.items()}
        by_road = {
            combo: _severity_mix_from_rates(kab / t, ka / t, k_share, c_share)
            for combo, (t, kab, ka) in rows.items()
        }
        return ScopeMix(
            severity=severity, road=road, severity_by_road=by_road,
            crash_types=crash_types, flags=flags,
        )

    statewide_severity = _severity_mix_from_rates(
        77516 / 672363, 16450 / 672363, k_share, c_share
    )
    return SynthSpec(
        seed=seed, n_crashes=n_crashes, tribal_fraction=tribal_fraction,
        tribal=scope_mix(
            _ROAD_ROWS_TRIBAL, tribal_severity, dict(_TRIBAL_TYPE_MIX), dict(_TRIBAL_FLAG_RATES)
        ),
        statewide=scope_mix(
            _ROAD_ROWS_STATEWIDE, statewide_severity,
            dict(_STATEWIDE_TYPE_MIX), dict(_STATEWIDE_FLAG_RATES),
        ),
        cluster_centers=cluster_centers, **overrides,
    )


def simple_spec(seed: int, n_crashes: int, tribal_fraction: float = 0.2, **overrides) -> SynthSpec:
    """Minimal spec with flat mixes; handy for small test snapshots."""
    severity = {"K": 0.01, "A": 0.04, "B": 0.10, "C": 0.15, "O": 0.70}
    road = {combo: 0.25 for combo in ROAD_COMBOS}
    mix = ScopeMix(
        severity=severity, road=road,
        crash_types=dict(_TRIBAL_TYPE_MIX), flags=dict(_TRIBAL_FLAG_RATES),
    )
    return SynthSpec(
        seed=seed, n_crashes=n_crashes, tribal_fraction=tribal_fraction,
        tribal=mix, statewide=mix, **overrides,
    )


def _quota_counts(n: int, mix: dict[str, float], keys: Sequence[str]) -> dict[str, int]:
    """Largest-remainder allocation of n draws across mix probabilities."""
    quotas = [(key, n * mix.get(key, 0.0)) for key in keys]
    counts = {key: int(math.floor(q)) for key, q in quotas}
    shortfall = n - sum(counts.values())
    remainders = sorted(quotas, key=lambda kq: (-(kq[1] - math.floor(kq[1])), kq[0]))
    for key, _ in remainders[:shortfall]:
        counts[key] += 1
    return counts


class _Stream:
    """Buffered scalar draws over one PCG64 stream; cheap and deterministic."""

    def __init__(self, rng: np.random.Generator, block: int = 16384):
        self._rng = rng
        self._block = block
        self._buffer = rng.random(block)
        self._index = 0

    def u(self) -> float:
        if self._index >= self._block:
            self._buffer = self._rng.random(self._block)
            self._index = 0
        value = self._buffer[self._index]
        self._index += 1
        return float(value)

    def randint(self, n: int) -> int:
        """Uniform 0..n-1 (negligible bias at float64 resolution)."""
        return min(int(self.u() * n), n - 1)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.u()

    def normal(self, mu: float, sigma: float) -> float:
        u1 = self.u() or 5e-324
        u2 = self.u()
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


class _Cdf:
    """Precomputed cumulative distribution for weighted label draws."""

    def __init__(self, mix: dict[str, float]):
        self.labels = list(mix.keys())
        total = sum(mix.values())
        acc = 0.0
        self.edges = []
        for label in self.labels:
            acc += mix[label] / total
            self.edges.append(acc)
        self.edges[-1] = 1.0 + 1e-12

    def draw(self, stream: _Stream) -> str:
        return self.labels[bisect.bisect_left(self.edges, stream.u())]


def tribe_layout(spec: SynthSpec) -> list[dict]:
    """Deterministic square tribal territories placed on an interior grid."""
    min_lon, min_lat, max_lon, max_lat = spec.bbox
    per_row = math.ceil(math.sqrt(spec.n_tribes))
    n_rows = math.ceil(spec.n_tribes / per_row)
    half = spec.tribe_size / 2.0
    tribes = []
    for index in range(spec.n_tribes):
        gx = index % per_row
        gy = index // per_row
        cx = min_lon + (max_lon - min_lon) * (gx + 1) / (per_row + 1)
        cy = min_lat + (max_lat - min_lat) * (gy + 1) / (n_rows + 1)
        ring = [
            [cx - half, cy - half], [cx + half, cy - half],
            [cx + half, cy + half], [cx - half, cy + half],
            [cx - half, cy - half],
        ]
        tribes.append(
            {
                "tribe_id": f"T{index + 1:02d}",
                "name": f"Tribe {index + 1:02d}",
                "center": (cx, cy),
                "ring": ring,
            }
        )
    return tribes


def boundaries_geojson(spec: SynthSpec) -> dict:
    features = [
        {
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [t["ring"]]},
            "properties": {"tribe_id": t["tribe_id"], "name": t["name"]},
        }
        for t in tribe_layout(spec)
    ]
    return {"type": "FeatureCollection", "features": features}


def _draw_date(stream: _Stream, start: datetime.date, total_days: int) -> str:
    return (start + datetime.timedelta(days=stream.randint(total_days))).isoformat()


_HIGHWAY_TYPES = ("STH", "USH", "IH")
_NON_HIGHWAY_TYPES = ("CTH", "LOCAL")


def generate(spec: SynthSpec) -> tuple[list[list], list[list], dict]:
    """Generate (crash_rows, person_rows, boundaries_geojson) for a spec.

    Severity and road-combo marginals use largest-remainder quotas shuffled
    by the seeded generator, so emitted mixes match the spec up to integer
    rounding at any n; everything else is drawn i.i.d. from the seeded
    stream in a fixed order.
    """
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    stream = _Stream(rng)
    tribes = tribe_layout(spec)
    half = spec.tribe_size / 2.0
    min_lon, min_lat, max_lon, max_lat = spec.bbox

    n_tribal = round(spec.n_crashes * spec.tribal_fraction)
    n_state = spec.n_crashes - n_tribal

    def build_plan(n: int, mix: ScopeMix) -> list[tuple[str, str]]:
        plan: list[tuple[str, str]] = []
        road_counts = _quota_counts(n, mix.road, ROAD_COMBOS)
        for combo in ROAD_COMBOS:
            count = road_counts[combo]
            severity_mix = mix.severity_by_road.get(combo, mix.severity)
            for code, k in _quota_counts(count, severity_mix, SEVERITY_CODES).items():
                plan.extend([(combo, code)] * k)
        order = rng.permutation(len(plan))
        return [plan[i] for i in order]

    tribal_plan = build_plan(n_tribal, spec.tribal)
    state_plan = build_plan(n_state, spec.statewide)

    # tribe allocation for tribal crashes: uniform quota, shuffled
    tribe_ids = [t["tribe_id"] for t in tribes]
    tribe_counts = _quota_counts(n_tribal, {tid: 1.0 / len(tribe_ids) for tid in tribe_ids}, tribe_ids)
    tribe_stream: list[str] = []
    for tid in tribe_ids:
        tribe_stream.extend([tid] * tribe_counts[tid])
    tribe_stream = [tribe_stream[i] for i in rng.permutation(len(tribe_stream))]

    scope_flags = ["tribal"] * n_tribal + ["statewide"] * n_state
    scope_stream = [scope_flags[i] for i in rng.permutation(len(scope_flags))]

    by_id = {t["tribe_id"]: t for t in tribes}
    cluster_total = sum(c.weight for c in spec.cluster_centers)
    cluster_cdf = (
        _Cdf({str(i): c.weight for i, c in enumerate(spec.cluster_centers)})
        if spec.cluster_centers else None
    )

    tribal_type_cdf = _Cdf(spec.tribal.crash_types or _STATEWIDE_TYPE_MIX)
    state_type_cdf = _Cdf(spec.statewide.crash_types or _STATEWIDE_TYPE_MIX)
    sex_cdf = _Cdf(_SEX_MIX)
    persons_cdf = _Cdf({str(i + 1): p for i, p in enumerate(spec.persons_mix)})
    age_cdf = _Cdf({str(i): p for i, p in enumerate(_AGE_BIN_MIX)})

    date_start = datetime.date(spec.year_range[0], 1, 1)
    total_days = (datetime.date(spec.year_range[1], 12, 31) - date_start).days + 1

    def draw_background_point() -> tuple[float, float]:
        # rejection-sample outside tribal squares so the tribal share is exact
        for _ in range(1000):
            if cluster_cdf is not None and stream.u() < cluster_total:
                chosen = spec.cluster_centers[int(cluster_cdf.draw(stream))]
                lon = stream.normal(chosen.lon, chosen.spread)
                lat = stream.normal(chosen.lat, chosen.spread)
            else:
                lon = stream.uniform(min_lon, max_lon)
                lat = stream.uniform(min_lat, max_lat)
            if not (min_lon <= lon <= max_lon and min_lat <= lat <= max_lat):
                continue
            if not any(
                abs(lon - t["center"][0]) <= half and abs(lat - t["center"][1]) <= half
                for t in tribes
            ):
                return lon, lat
        raise SynthSpecError("could not place a background point outside tribal land")

    def draw_tribal_point(tribe_id: str) -> tuple[float, float]:
        cx, cy = by_id[tribe_id]["center"]
        return (
            stream.uniform(cx - half, cx + half),
            stream.uniform(cy - half, cy + half),
        )

    crash_rows: list[list] = []
    person_rows: list[list] = []
    tribal_cursor = state_cursor = tribe_cursor = 0

    for index in range(spec.n_crashes):
        scope = scope_stream[index]
        if scope == "tribal":
            combo, severity = tribal_plan[tribal_cursor]
            tribal_cursor += 1
            mix = spec.tribal
            type_cdf = tribal_type_cdf
        else:
            combo, severity = state_plan[state_cursor]
            state_cursor += 1
            mix = spec.statewide
            type_cdf = state_type_cdf

        crash_id = f"C{index + 1:06d}"
        date = _draw_date(stream, date_start, total_days)
        urban_rural = "U" if combo.startswith("urban") else "R"
        if combo.endswith("non_highway"):
            road = _NON_HIGHWAY_TYPES[stream.randint(len(_NON_HIGHWAY_TYPES))]
        else:
            road = _HIGHWAY_TYPES[stream.randint(len(_HIGHWAY_TYPES))]
        crash_type = type_cdf.draw(stream)
        flag_rates = mix.flags or _STATEWIDE_FLAG_RATES
        flags = {name: (1 if stream.u() < flag_rates[name] else 0) for name in _FLAG_ORDER}

        trbcode = trbname = ""
        crshloc, crshjur, agcytype = "Public Property", "No Special Jurisdiction", "County Sheriff"
        lon_s = lat_s = ""
        if scope == "tribal":
            tribe_id = tribe_stream[tribe_cursor]
            tribe_cursor += 1
            crshloc = "Tribal Land"
            crshjur = "Indian Reservation/Trust"
            agcytype = "Tribal"
            mode_draw = stream.u()
            if mode_draw < spec.attr_only_rate:
                trbcode, trbname = tribe_id, by_id[tribe_id]["name"]
            elif mode_draw < spec.attr_only_rate + spec.spatial_only_rate:
                lon, lat = draw_tribal_point(tribe_id)
                lon_s, lat_s = f"{lon:.6f}", f"{lat:.6f}"
            elif mode_draw < spec.attr_only_rate + spec.spatial_only_rate + spec.conflict_rate:
                trbcode, trbname = tribe_id, by_id[tribe_id]["name"]
                other = tribe_ids[(tribe_ids.index(tribe_id) + 1) % len(tribe_ids)]
                lon, lat = draw_tribal_point(other)
                lon_s, lat_s = f"{lon:.6f}", f"{lat:.6f}"
            else:
                trbcode, trbname = tribe_id, by_id[tribe_id]["name"]
                lon, lat = draw_tribal_point(tribe_id)
                lon_s, lat_s = f"{lon:.6f}", f"{lat:.6f}"
        else:
            if stream.u() >= spec.missing_location_rate:
                lon, lat = draw_background_point()
                lon_s, lat_s = f"{lon:.6f}", f"{lat:.6f}"
            if stream.u() < 0.05:
                crshloc = "Private Property"
            agency_draw = stream.u()
            if agency_draw < 0.3:
                agcytype = "State Patrol"
            elif agency_draw < 0.7:
                agcytype = "City Police"

        crash_rows.append(
            [
                crash_id, date, lon_s, lat_s, crshloc, crshjur, agcytype,
                trbcode, trbname, road, urban_rural, crash_type,
                flags["speeding"], flags["impaired"], flags["pedestrian"],
                flags["hitrun"], flags["beltnonuse"],
            ]
        )
        _append_persons(
            person_rows, stream, crash_id, severity, flags["pedestrian"],
            persons_cdf, sex_cdf, age_cdf,
        )

    return crash_rows, person_rows, boundaries_geojson(spec)


def _draw_age(stream: _Stream, age_cdf: _Cdf) -> str:
    pick = int(age_cdf.draw(stream))
    if pick == len(_AGE_BINS):
        return ""
    lo, hi = _AGE_BINS[pick]
    return str(lo + stream.randint(hi - lo + 1))


def _append_persons(
    person_rows: list[list],
    stream: _Stream,
    crash_id: str,
    severity: str,
    pedestrian_flag: int,
    persons_cdf: _Cdf,
    sex_cdf: _Cdf,
    age_cdf: _Cdf,
) -> None:
    n_persons = int(persons_cdf.draw(stream))
    severity_rank = SEVERITY_CODES.index(severity)
    for person_index in range(n_persons):
        if person_index == 0:
            injury = severity  # carries the crash-level maximum
            role = "driver"
        else:
            injury = SEVERITY_CODES[
                severity_rank + stream.randint(len(SEVERITY_CODES) - severity_rank)
            ]
            role = "pedestrian" if (pedestrian_flag and person_index == 1) else "passenger"
        person_rows.append(
            [crash_id, role, sex_cdf.draw(stream), _draw_age(stream, age_cdf), injury]
        )


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def write_dataset(
    spec: SynthSpec,
    crash_path: Path,
    persons_path: Path,
    boundaries_path: Path,
) -> dict[str, int]:
    """Generate and write the three dataset files; returns row counts."""
    crash_rows, person_rows, boundaries = generate(spec)
    crash_path = Path(crash_path)
    persons_path = Path(persons_path)
    boundaries_path = Path(boundaries_path)
    crash_path.write_bytes(render_csv(_CRASH_HEADER, crash_rows))
    persons_path.write_bytes(render_csv(_PERSON_HEADER, person_rows))
    boundaries_path.write_bytes(
        (json.dumps(boundaries, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    )
    return {"crashes": len(crash_rows), "persons": len(person_rows)}
