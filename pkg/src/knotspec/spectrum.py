"""Knotoid spectra of open curves and of knot neighborhoods.

Directions are sampled on S^2 (Monte Carlo in place of the exact
great-circle arrangement).  Every projection is reduced to a packed
diagram key, keys are counted, and each distinct key is fingerprinted
once.  Classes are fingerprint keys; counts are exact integers and
probabilities carry 95% Wilson intervals.

Work is split into fixed chunks whose seeds depend only on the chunk
index, and count tables are merged by addition, so output does not
depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .config import RunConfig, derive_seed
from .curves import OpenCurve, Origin, PolyCurve, _base, open_at, sample_neighborhood, tube_radius
from .diagrams import KnotoidDiagram
from .errors import InputError, InvariantViolation, SamplingError, StepError
from .invariants import Fingerprint, UnresolvedClass, fingerprint, jones_normalized
from .polynomial import LaurentPolynomial
from .projection import _Geometry, decode_key, direction_array, project_codes, project_keys, resample_direction

SCHEMA = "knotspec.spectrum/1"
Z95 = 1.959963984540054
LOW_COUNT = 5
HEIGHT_CEILING = 3
CHUNK_DIRS = 4096
FAIL_FRACTION = 0.01


def wilson(p: float, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a proportion ``p`` observed on ``n`` trials."""
    if n <= 0:
        return (0.0, 1.0)
    z2 = z * z
    den = 1 + z2 / n
    center = (p + z2 / (2 * n)) / den
    half = z * math.sqrt(max(p * (1 - p) / n + z2 / (4 * n * n), 0.0)) / den
    # rounding can push an endpoint past p itself at p = 0 or 1
    return (max(0.0, min(p, center - half)), min(1.0, max(p, center + half)))


# ------------------------------------------------------------ data types

@dataclass(frozen=True)
class SpectrumEntry:
    key: str
    fingerprint: Fingerprint
    count: int
    p: float
    ci: tuple
    height: int  # smallest height bound seen in the class
    knot_type: bool
    representative: str

    @property
    def low_confidence(self) -> bool:
        return self.count < LOW_COUNT

    @property
    def review(self) -> bool:
        """Height bound above the ceiling for generic polygons: needs a human look."""
        return self.height > HEIGHT_CEILING

    def to_json(self) -> dict:
        fp = self.fingerprint
        return {
            "key": self.key,
            "jones": str(fp.jones),
            "under_closure_jones": str(fp.under),
            "over_closure_jones": str(fp.over),
            "height_bound": self.height,
            "knot_type": self.knot_type,
            "count": self.count,
            "p": self.p,
            "ci": list(self.ci),
            "low_confidence": self.low_confidence,
            "review": self.review,
            "representative": self.representative,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectrumEntry":
        fp = Fingerprint(
            LaurentPolynomial.parse(obj["jones"]),
            LaurentPolynomial.parse(obj["under_closure_jones"]),
            LaurentPolynomial.parse(obj["over_closure_jones"]),
            int(obj["height_bound"]),
            bool(obj["knot_type"]),
        )
        return cls(obj["key"], fp, int(obj["count"]), float(obj["p"]), tuple(obj["ci"]),
                   int(obj["height_bound"]), bool(obj["knot_type"]), obj["representative"])


@dataclass(frozen=True)
class Spectrum:
    kind: str  # "open-curve" | "knot-neighborhood"
    entries: tuple  # SpectrumEntry, sorted by key
    total: int  # classified projections (resolved + unresolved)
    degenerate: int  # directions that needed resampling
    failed: int  # directions dropped after the retry budget
    unresolved: int  # projections above the bracket cap after simplification
    unresolved_mass: float
    unresolved_codes: tuple = ()  # (code, crossings, count)
    provenance: dict = field(default_factory=dict)
    per_base: dict | None = None
    view: str = "kspec"
    knot_type_key: str | None = None  # the class taken as the knot-type knotoid

    # ---------------------------------------------------------- views
    @property
    def keys(self) -> set:
        return {e.key for e in self.entries}

    def entry(self, key: str) -> SpectrumEntry | None:
        for e in self.entries:
            if e.key == key:
                return e
        return None

    def knot_type_entries(self) -> list[SpectrumEntry]:
        return [e for e in self.entries if e.knot_type]

    @property
    def knot_type_conflicts(self) -> list[str]:
        """Knot-type classes other than the designated one (the uniqueness lemma fails for these)."""
        return [e.key for e in self.entries if e.knot_type and e.key != self.knot_type_key]

    @property
    def mass(self) -> float:
        return float(sum(e.p for e in self.entries))

    def pkspec(self) -> "Spectrum":
        """The spectrum without its designated knot-type class.

        Conflicting knot-type classes stay in: they are not the knot type
        of the source curve.
        """
        return replace(self, entries=tuple(e for e in self.entries if e.key != self.knot_type_key), view="pkspec")

    def heights(self) -> list[int]:
        return sorted({e.height for e in self.entries})

    # ---------------------------------------------------------- export
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "view": self.view,
            "provenance": self.provenance,
            "totals": {
                "classified": self.total,
                "degenerate_resampled": self.degenerate,
                "failed": self.failed,
                "unresolved": self.unresolved,
            },
            "unresolved_mass": self.unresolved_mass,
            "unresolved": [{"code": c, "crossings": k, "count": n} for c, k, n in self.unresolved_codes],
            "entries": [e.to_json() for e in self.entries],
            "knot_type_class": self.knot_type_key,
            "knot_type_conflicts": self.knot_type_conflicts,
            "per_base": self.per_base,
            "notes": {
                "height_bound": "upper bound on knotoid height from the diagrams seen",
                "equality": "equal fingerprints mean not distinguished, not equivalent",
                "ci": "95% Wilson interval on p with n = classified projections",
                "knot_type_class": "designated knot-type class; knot_type_conflicts lists any other height-0 classes",
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "Spectrum":
        if obj.get("schema") != SCHEMA:
            raise InputError(f"unsupported spectrum schema {obj.get('schema')!r}")
        t = obj["totals"]
        return cls(
            obj["kind"],
            tuple(SpectrumEntry.from_json(e) for e in obj["entries"]),
            int(t["classified"]),
            int(t["degenerate_resampled"]),
            int(t["failed"]),
            int(t["unresolved"]),
            float(obj["unresolved_mass"]),
            tuple((u["code"], int(u["crossings"]), int(u["count"])) for u in obj["unresolved"]),
            obj["provenance"],
            obj["per_base"],
            obj.get("view", "kspec"),
            obj.get("knot_type_class"),
        )

    @classmethod
    def loads(cls, text: str) -> "Spectrum":
        return cls.from_json(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "count", "p", "ci_low", "ci_high", "height_bound", "knot_type",
                    "low_confidence", "review", "representative"])
        for e in self.entries:
            w.writerow([e.key, e.count, repr(e.p), repr(e.ci[0]), repr(e.ci[1]), e.height,
                        int(e.knot_type), int(e.low_confidence), int(e.review), e.representative])
        if self.unresolved:
            w.writerow(["UNRESOLVED", self.unresolved, repr(self.unresolved_mass), "", "", "", "", "", "", ""])
        return buf.getvalue()


# --------------------------------------------------------- projection work

def _project_with_retries(geo, dirs, first_index: int, resample_seed: int, cfg: RunConfig):
    """Keys for every direction, resampling degenerate ones by global index."""
    keys = project_keys(geo, dirs, cfg.degeneracy_tol)
    bad = [i for i, k in enumerate(keys) if k is None]
    degenerate = len(bad)
    for attempt in range(1, cfg.max_retries + 1):
        if not bad:
            break
        fresh = np.array([resample_direction(resample_seed, first_index + i, attempt) for i in bad])
        new = project_keys(geo, fresh, cfg.degeneracy_tol)
        still = []
        for i, k in zip(bad, new):
            if k is None:
                still.append(i)
            else:
                keys[i] = k
        bad = still
    return keys, degenerate, len(bad)


def _directions(cfg: RunConfig, seed: int) -> np.ndarray:
    return direction_array(cfg.directions, derive_seed(seed, "directions"), cfg.scheme)


def _count_task(args):
    vertices, chunks, cfg, seed = args
    geo = _Geometry(vertices, False)
    dirs = _directions(cfg, seed)
    counts: Counter = Counter()
    degenerate = failed = 0
    for lo in chunks:
        keys, dg, fl = _project_with_retries(geo, dirs[lo:lo + CHUNK_DIRS], lo, derive_seed(seed, "resample"), cfg)
        degenerate += dg
        failed += fl
        counts.update(k for k in keys if k is not None)
    return counts, degenerate, failed


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _check_failures(failed: int, n: int, what: str) -> None:
    if n and failed > FAIL_FRACTION * n:
        raise SamplingError(
            f"{failed} of {n} directions stayed degenerate after resampling ({what}); "
            "the curve is probably not generic"
        )


# ------------------------------------------------------ classification

class _Classifier:
    """Maps packed keys to fingerprints, caching both steps."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.codes: dict[bytes, str] = {}
        self.fps: dict[str, object] = {}

    def code(self, key: bytes) -> str:
        c = self.codes.get(key)
        if c is None:
            c = self.codes[key] = decode_key(key)
        return c

    def fp(self, code: str):
        f = self.fps.get(code)
        if f is None:
            f = self.fps[code] = fingerprint(KnotoidDiagram.from_code(code), self.cfg.cap, self.cfg.budget)
        return f

    def classify(self, key: bytes):
        return self.fp(self.code(key))

    def class_counts(self, counts: Counter) -> Counter:
        out: Counter = Counter()
        for k, n in counts.items():
            out[self.classify(k).key] += n
        return out


def _rep_better(code: str, other: str | None) -> bool:
    if other is None:
        return True
    return (len(code), code) < (len(other), other)


def _build_entries(weighted: dict, counts: Counter, total: int, info: dict) -> tuple:
    entries = []
    for key in sorted(counts):
        fp, height, rep = info[key]
        p = weighted[key]
        entries.append(SpectrumEntry(key, fp, counts[key], p, wilson(p, total), height, height == 0, rep))
    return tuple(entries)


def _aggregate(code_counts: Counter, clf: _Classifier):
    """Class counts, per-class (fingerprint, min height, representative), unresolved list."""
    counts: Counter = Counter()
    info: dict = {}
    unresolved: dict[str, list] = {}
    for key in sorted(code_counts):
        n = code_counts[key]
        code = clf.code(key)
        fp = clf.fp(code)
        if isinstance(fp, UnresolvedClass):
            slot = unresolved.setdefault(fp.code, [fp.crossings, 0])
            slot[1] += n
            continue
        counts[fp.key] += n
        cur = info.get(fp.key)
        if cur is None:
            info[fp.key] = (fp, fp.height, code)
        else:
            f0, h0, r0 = cur
            info[fp.key] = (f0, min(h0, fp.height), code if _rep_better(code, r0) else r0)
    unres = tuple(sorted((c, k, n) for c, (k, n) in unresolved.items()))
    return counts, info, unres


def _fix_knot_type(info: dict) -> dict:
    """Class-level fingerprint carries the class height and knot-type flag."""
    out = {}
    for key, (fp, h, rep) in info.items():
        out[key] = (replace(fp, height=h, knot_type=h == 0), h, rep)
    return out


# ------------------------------------------------------------- spectra

def knotoid_spectrum(l, n_dirs: int | None = None, seed: int | None = None, config: RunConfig | None = None) -> Spectrum:
    """Monte Carlo knotoid spectrum of an open curve."""
    cfg = config or RunConfig()
    if n_dirs is not None:
        cfg = replace(cfg, directions=int(n_dirs))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    curve = l if isinstance(l, OpenCurve) else None
    base = _base(l)
    if base.closed:
        raise InputError("knotoid_spectrum needs an open curve")
    tube_radius(base)  # raises on self-intersection
    chunks = list(range(0, cfg.directions, CHUNK_DIRS))
    per = max(1, math.ceil(len(chunks) / cfg.workers))
    tasks = [(base.vertices, chunks[i:i + per], cfg, cfg.seed) for i in range(0, len(chunks), per)]
    results = _map(_count_task, tasks, cfg.workers)
    code_counts: Counter = Counter()
    degenerate = failed = 0
    for c, d, f in results:
        code_counts.update(c)
        degenerate += d
        failed += f
    _check_failures(failed, cfg.directions, base.label or "open curve")
    clf = _Classifier(cfg)
    counts, info, unres = _aggregate(code_counts, clf)
    info = _fix_knot_type(info)
    total = sum(code_counts.values())
    unresolved = sum(n for _, _, n in unres)
    weighted = {k: n / total for k, n in counts.items()}
    prov = {
        "curve": base.label,
        "n_vertices": base.n_vertices,
        "vertices": base.vertices.tolist(),
        "config": cfg.provenance(),
    }
    if curve is not None and curve.origin is not None:
        o = curve.origin
        prov["origin"] = {"knot": o.knot, "vertex": o.vertex, "sample": o.sample}
    entries = _build_entries(weighted, counts, total, info)
    kt = [e for e in entries if e.knot_type]
    # the most frequent knot-type class is taken as the curve's knot type
    main = min(kt, key=lambda e: (-e.count, e.key)).key if kt else None
    s = Spectrum("open-curve", entries, total, degenerate, failed, unresolved,
                 unresolved / total if total else 0.0, unres, prov, knot_type_key=main)
    if s.knot_type_conflicts:
        _knot_type_conflict(cfg, f"open curve {base.label!r} has {len(kt)} knot-type classes")
    return s


def _knot_type_conflict(cfg: RunConfig, msg: str) -> None:
    if cfg.knot_type_policy == "strict":
        raise InvariantViolation(msg + "; at most one is expected")
    warnings.warn(msg + "; extra classes recorded as knot_type_conflicts", RuntimeWarning, stacklevel=3)


def _knot_task(args):
    K, x, h, cfg, seed, dirs = args
    geo_seed = derive_seed(seed, f"resample/{x}")
    samples = sample_neighborhood(K, x, h, cfg.samples_per_base, derive_seed(seed, "neighborhood"))
    per_sample = []
    degenerate = failed = 0
    for s in samples:
        keys, dg, fl = _project_with_retries(_Geometry(s.vertices, False), dirs, 0, geo_seed, cfg)
        per_sample.append(Counter(k for k in keys if k is not None))
        degenerate += dg
        failed += fl
    kx = open_at(K, x)
    keys, _, _ = _project_with_retries(_Geometry(kx.vertices, False), dirs, 0, geo_seed, cfg)
    ref = Counter(k for k in keys if k is not None)
    return x, per_sample, ref, degenerate, failed


def knot_jones(K: PolyCurve, cap: int = 64) -> LaurentPolynomial:
    """Normalized Jones of a closed curve from one generic projection."""
    dirs = direction_array(64, derive_seed(0, "knot-jones"))
    for code in project_codes(K.vertices, True, dirs):
        if code is not None:
            d = KnotoidDiagram.from_code(code)
            if d.n_crossings > cap:
                from .diagrams import simplify

                d = simplify(d).diagram
            return jones_normalized(d, cap)
    raise SamplingError("no generic projection of the knot found")


def knot_spectrum(
    K: PolyCurve,
    h: float | None = None,
    bases=None,
    per_base: int | None = None,
    n_dirs: int | None = None,
    seed: int | None = None,
    config: RunConfig | None = None,
) -> Spectrum:
    """Spectrum of the open-curve neighborhood of a knot, pooled over base vertices.

    Every base contributes ``per_base`` jittered open curves, each projected
    along one common direction set.  Class probabilities are the average of
    per-base frequencies (uniform weights over bases); per-base counts are
    kept in ``per_base``.
    """
    cfg = config or RunConfig()
    if n_dirs is not None:
        cfg = replace(cfg, directions=int(n_dirs))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if per_base is not None:
        cfg = replace(cfg, samples_per_base=int(per_base))
    K = _base(K)
    if not K.closed:
        raise InputError("knot_spectrum needs a closed curve")
    tr = tube_radius(K)
    if h is None:
        h = cfg.h_frac * tr
    if not 0 < h < tr:
        raise InputError(f"h={h:g} must lie in (0, tube radius {tr:g})")
    if bases is None or bases == "all":
        bases = list(range(K.n_vertices))
    bases = sorted({int(b) for b in bases})
    for b in bases:
        if not 0 <= b < K.n_vertices:
            raise InputError(f"base vertex {b} out of range")
    dirs = _directions(cfg, cfg.seed)
    tasks = [(K, x, h, cfg, cfg.seed, dirs) for x in bases]
    results = sorted(_map(_knot_task, tasks, cfg.workers), key=lambda r: r[0])

    clf = _Classifier(cfg)
    code_counts: Counter = Counter()
    degenerate = failed = 0
    base_codes: dict[int, Counter] = {}
    unstable = 0
    for x, per_sample, ref, dg, fl in results:
        degenerate += dg
        failed += fl
        bc: Counter = Counter()
        ref_classes = set(clf.class_counts(ref))
        for c in per_sample:
            bc.update(c)
            if set(clf.class_counts(c)) != ref_classes:
                unstable += 1
        base_codes[x] = bc
        code_counts.update(bc)
    _check_failures(failed, cfg.directions * cfg.samples_per_base * len(bases), K.label or "knot")

    counts, info, unres = _aggregate(code_counts, clf)
    info = _fix_knot_type(info)
    total = sum(code_counts.values())
    knot_type_keys = {k for k, (_, hgt, _) in info.items() if hgt == 0}

    weighted: dict = {k: 0.0 for k in counts}
    unres_w = 0.0
    per_base_out = {}
    used = 0
    conflicts: list[int] = []
    jk = knot_jones(K)
    for x in bases:
        bc = base_codes[x]
        nb = sum(bc.values())
        cls = clf.class_counts(bc)
        unres_b = sum(n for k, n in cls.items() if k == UnresolvedClass.key)
        kt = sorted(k for k in cls if k in knot_type_keys)
        own = [k for k in kt if info[k][0].jones == jk]
        others = [k for k in kt if k not in own]
        if len(kt) > 1 or others:
            conflicts.append(x)
            if cfg.knot_type_policy == "strict":
                raise InvariantViolation(f"base {x}: knot-type classes {kt}, knot Jones {jk}")
        per_base_out[str(x)] = {
            "classified": nb,
            "counts": {k: n for k, n in sorted(cls.items()) if k != UnresolvedClass.key},
            "unresolved": unres_b,
            "knot_type_class": own[0] if own else None,
            "knot_type_classes": kt,
        }
        if nb == 0:
            continue
        used += 1
        for k, n in cls.items():
            if k == UnresolvedClass.key:
                unres_w += n / nb
            else:
                weighted[k] += n / nb
    if used:
        weighted = {k: v / used for k, v in weighted.items()}
        unres_w /= used
    missing = [x for x in bases if per_base_out[str(x)]["knot_type_class"] is None]
    if conflicts:
        _knot_type_conflict(cfg, f"{len(conflicts)} bases have a knot-type class other than the knot's own")
    if unstable:
        warnings.warn(
            f"{unstable} of {len(bases) * cfg.samples_per_base} neighborhood samples have a class set different "
            "from the unperturbed open curve at the same directions; h may be too large",
            RuntimeWarning,
            stacklevel=2,
        )
    prov = {
        "knot": K.label,
        "n_vertices": K.n_vertices,
        "vertices": K.vertices.tolist(),
        "h": h,
        "tube_radius": tr,
        "bases": bases,
        "knot_jones": str(jk),
        "weights": "uniform over bases",
        "stability": {"samples": len(bases) * cfg.samples_per_base, "differing_class_sets": unstable},
        "bases_without_knot_type_class": missing,
        "bases_with_knot_type_conflicts": conflicts,
        "config": cfg.provenance(),
    }
    unresolved = sum(n for _, _, n in unres)
    entries = _build_entries(weighted, counts, total, info)
    main = next((e.key for e in entries if e.knot_type and e.fingerprint.jones == jk), None)
    return Spectrum("knot-neighborhood", entries, total, degenerate, failed, unresolved, unres_w, unres, prov,
                    per_base_out, knot_type_key=main)


def rerun(s: Spectrum, workers: int = 1) -> Spectrum:
    """Recompute a spectrum from nothing but its own provenance."""
    prov = s.provenance
    if "vertices" not in prov or "config" not in prov:
        raise InputError("spectrum provenance lacks the curve or the config")
    cfg = RunConfig.from_provenance(prov["config"], workers=int(workers))
    if s.kind == "open-curve":
        o = prov.get("origin")
        origin = None if o is None else Origin(o["knot"], o["vertex"], (), o["sample"])
        l = OpenCurve(PolyCurve(prov["vertices"], False, prov["curve"]), origin)
        out = knotoid_spectrum(l, config=cfg)
    else:
        K = PolyCurve(prov["vertices"], True, prov["knot"])
        out = knot_spectrum(K, h=prov["h"], bases=prov["bases"], config=cfg)
    if s.view == "pkspec":
        out = out.pkspec()
    elif s.view.startswith("H_"):
        out = height_subset(out, int(s.view[2:]))
    return out


def height_subset(s: Spectrum, m: int) -> Spectrum:
    """Entries whose height bound equals ``m`` (bound-based, labeled as such)."""
    prov = dict(s.provenance)
    prov["height_subset"] = {"m": int(m), "basis": "height upper bound"}
    return replace(s, entries=tuple(e for e in s.entries if e.height == m), provenance=prov, view=f"H_{int(m)}")


# ------------------------------------------------------------ comparison

@dataclass(frozen=True)
class Comparison:
    only_a: tuple
    only_b: tuple
    common: tuple
    by_height: dict  # height -> {"only_a": [...], "only_b": [...], "common": [...]}
    unresolved_mass: tuple  # (a, b)
    labels: tuple

    @property
    def distinguished(self) -> bool:
        return bool(self.only_a or self.only_b)

    @property
    def verdict(self) -> str:
        return "distinguished" if self.distinguished else "not distinguished"

    def to_json(self) -> dict:
        return {
            "schema": "knotspec.comparison/1",
            "labels": list(self.labels),
            "verdict": self.verdict,
            "only_a": list(self.only_a),
            "only_b": list(self.only_b),
            "common": list(self.common),
            "by_height": {str(k): v for k, v in sorted(self.by_height.items())},
            "unresolved_mass": list(self.unresolved_mass),
            "note": "a shared fingerprint means not distinguished, never equivalent",
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _fp_config(s: Spectrum) -> tuple:
    cfg = s.provenance.get("config", {})
    return cfg.get("cap"), cfg.get("budget")


def compare(a: Spectrum, b: Spectrum) -> Comparison:
    if _fp_config(a) != _fp_config(b):
        raise InputError(f"spectra use different fingerprint settings {_fp_config(a)} vs {_fp_config(b)}")
    ka, kb = a.keys, b.keys
    ha = {e.key: e.height for e in a.entries}
    hb = {e.key: e.height for e in b.entries}
    by_height = {}
    for m in sorted(set(ha.values()) | set(hb.values())):
        sa = {k for k, v in ha.items() if v == m}
        sb = {k for k, v in hb.items() if v == m}
        by_height[m] = {
            "only_a": sorted(sa - sb),
            "only_b": sorted(sb - sa),
            "common": sorted(sa & sb),
            "verdict": "distinguished" if sa != sb else "not distinguished",
        }
    label = lambda s: s.provenance.get("knot") or s.provenance.get("curve") or ""  # noqa: E731
    return Comparison(
        tuple(sorted(ka - kb)),
        tuple(sorted(kb - ka)),
        tuple(sorted(ka & kb)),
        by_height,
        (a.unresolved_mass, b.unresolved_mass),
        (label(a), label(b)),
    )


# -------------------------------------------------------------- f-measure

def _poly_dict(p: LaurentPolynomial) -> dict:
    return dict(p.terms)


@dataclass(frozen=True)
class FMeasureResult:
    mean: dict  # exponent of A -> Fraction
    stderr: dict  # exponent of A -> float
    n_dirs: int
    resolved: int
    unresolved: int
    value: complex | float | None = None

    def is_exactly(self, poly: LaurentPolynomial) -> bool:
        target = {e: Fraction(c) for e, c in poly.terms.items()}
        return {e: c for e, c in self.mean.items() if c} == target

    def max_deviation(self, poly: LaurentPolynomial) -> float:
        target = dict(poly.terms)
        exps = set(target) | set(self.mean)
        return max((abs(float(self.mean.get(e, 0)) - target.get(e, 0)) for e in exps), default=0.0)

    def evaluate(self, A):
        return sum(float(c) * A ** e for e, c in self.mean.items())

    def __str__(self):
        terms = [f"{c}*A^{e}" for e, c in sorted(self.mean.items(), reverse=True) if c]
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {
            "mean": {str(e): str(c) for e, c in sorted(self.mean.items())},
            "stderr": {str(e): s for e, s in sorted(self.stderr.items())},
            "n_dirs": self.n_dirs,
            "resolved": self.resolved,
            "unresolved": self.unresolved,
            "value": None if self.value is None else repr(self.value),
        }


def _moments(samples: list[tuple[dict, int]], scale: Fraction = Fraction(1)) -> tuple[dict, dict]:
    """Mean (exact) and standard error of each coefficient over weighted samples."""
    n = sum(w for _, w in samples)
    exps = sorted({e for p, _ in samples for e in p})
    mean, se = {}, {}
    for e in exps:
        m = sum(Fraction(p.get(e, 0)) * w for p, w in samples) / n * scale
        mean[e] = m
        if n > 1:
            mf = float(m)
            var = sum(w * (float(p.get(e, 0) * scale) - mf) ** 2 for p, w in samples) / (n - 1)
            se[e] = math.sqrt(var / n)
        else:
            se[e] = 0.0
    return mean, se


def f_measure(l, n_dirs: int | None = None, seed: int | None = None, config: RunConfig | None = None,
              at: complex | float | None = None) -> FMeasureResult:
    """Average normalized Jones over projection directions (Monte Carlo)."""
    s = knotoid_spectrum(l, n_dirs, seed, config)
    samples = [(_poly_dict(e.fingerprint.jones), e.count) for e in s.entries]
    resolved = sum(e.count for e in s.entries)
    if resolved == 0:
        raise SamplingError("no resolved projections; raise the bracket cap")
    mean, se = _moments(samples)
    res = FMeasureResult(mean, se, s.total, resolved, s.unresolved)
    if at is not None:
        res = replace(res, value=res.evaluate(at))
    return res


@dataclass(frozen=True)
class GradientResult:
    derivative: dict  # exponent of A -> Fraction
    stderr: dict
    eps: float
    n_dirs: int
    changed: int  # directions whose class differs between the two evaluation points

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.derivative.values())

    def to_json(self) -> dict:
        return {
            "derivative": {str(e): str(c) for e, c in sorted(self.derivative.items())},
            "stderr": {str(e): s for e, s in sorted(self.stderr.items())},
            "eps": self.eps,
            "n_dirs": self.n_dirs,
            "changed_directions": self.changed,
        }


def _paired_keys(geos, dirs, seed: int, cfg: RunConfig):
    """Keys for several curves along common directions; a direction degenerate for
    any curve is replaced for all of them."""
    per = [project_keys(g, dirs, cfg.degeneracy_tol) for g in geos]
    bad = [i for i in range(len(dirs)) if any(k[i] is None for k in per)]
    for attempt in range(1, cfg.max_retries + 1):
        if not bad:
            break
        fresh = np.array([resample_direction(seed, i, attempt) for i in bad])
        new = [project_keys(g, fresh, cfg.degeneracy_tol) for g in geos]
        still = []
        for j, i in enumerate(bad):
            if any(n[j] is None for n in new):
                still.append(i)
            else:
                for k, n in zip(per, new):
                    k[i] = n[j]
        bad = still
    return per, set(bad)


def f_gradient(K: PolyCurve, x: int, v, eps: float | None = None, n_dirs: int | None = None,
               seed: int | None = None, config: RunConfig | None = None) -> GradientResult:
    """Central difference of the f-measure of ``K`` opened at ``x`` along ``v``.

    Both evaluation points use the same directions (common random numbers),
    so directions whose class does not change contribute exactly zero.
    """
    cfg = config or RunConfig()
    if n_dirs is not None:
        cfg = replace(cfg, directions=int(n_dirs))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    K = _base(K)
    if not K.closed:
        raise InputError("f_gradient needs a closed curve")
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3 * K.n_vertices,):
        raise InputError(f"perturbation must have {3 * K.n_vertices} entries")
    if eps is None:
        eps = 1e-3 * K.diameter
    if not eps > 0:
        raise InputError("eps must be positive")
    V = v.reshape(-1, 3)
    tr = tube_radius(K)
    if eps * np.linalg.norm(V, axis=1).max() >= tr:
        raise StepError(f"step eps*|v| exceeds the tube radius {tr:g}; the perturbed knot may change type")
    curves = []
    for sgn in (1, -1):
        try:
            Kp = PolyCurve(K.vertices + sgn * eps * V, True, K.label)
        except InputError as exc:
            raise StepError(f"perturbed curve is invalid: {exc}") from None
        curves.append(open_at(Kp, x))
    dirs = _directions(cfg, cfg.seed)
    keys, dropped = _paired_keys([_Geometry(c.vertices, False) for c in curves], dirs,
                                 derive_seed(cfg.seed, "resample"), cfg)
    _check_failures(len(dropped), len(dirs), "f_gradient")
    clf = _Classifier(cfg)
    pairs: Counter = Counter()
    for i in range(len(dirs)):
        if i in dropped:
            continue
        pairs[(keys[0][i], keys[1][i])] += 1
    samples = []
    changed = 0
    for (kp, km), n in sorted(pairs.items()):
        if kp == km:
            samples.append(({}, n))
            continue
        fp, fm = clf.classify(kp), clf.classify(km)
        if isinstance(fp, UnresolvedClass) or isinstance(fm, UnresolvedClass):
            raise StepError("a projection stayed above the bracket cap; raise the cap")
        if fp.key != fm.key:
            changed += n
        diff = dict(_poly_dict(fp.jones))
        for e, c in fm.jones.terms.items():
            diff[e] = diff.get(e, 0) - c
        samples.append(({e: c for e, c in diff.items() if c}, n))
    mean, se = _moments(samples, 1 / (2 * Fraction(eps)))
    return GradientResult({e: c for e, c in mean.items() if c}, se, float(eps), len(dirs) - len(dropped), changed)
