"""Compare the pure knotoid spectra of the bundled Kinoshita-Terasaka and Conway knots.

Both knots share the Jones polynomial, so the knot-type classes agree and
any difference has to come from pure knotoids.  The report lists the
fingerprints found for one knot only, per height bound, plus the
unresolved mass of each side.  It is a report, not a test: matching
fingerprints do not show the spectra are equal.

    python scripts/mutant_report.py [--dirs 200] [--samples 5] [--seed 7] [--bases 0,11,22,33] [--out report.json]
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from knotspec.config import RunConfig
from knotspec.curves import bundled
from knotspec.spectrum import compare, knot_spectrum


def report(cfg: RunConfig, bases) -> dict:
    out = {}
    spectra = {}
    for name in ("kinoshita_terasaka", "conway"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spectra[name] = knot_spectrum(bundled(name), bases=bases, config=cfg)
    a, b = spectra["kinoshita_terasaka"], spectra["conway"]
    cmp = compare(a.pkspec(), b.pkspec())
    out["comparison"] = cmp.to_json()
    out["knot_type_classes"] = [a.knot_type_key, b.knot_type_key]
    out["entries"] = [len(a.entries), len(b.entries)]
    out["unresolved_mass"] = [a.unresolved_mass, b.unresolved_mass]
    out["config"] = cfg.provenance()
    out["bases"] = bases
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dirs", type=int, default=200)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--bases", default="0,11,22,33")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args()
    bases = "all" if args.bases == "all" else [int(b) for b in args.bases.split(",")]
    cfg = RunConfig(seed=args.seed, directions=args.dirs, samples_per_base=args.samples,
                    h_frac=0.05, workers=args.workers)
    json.dump(report(cfg, bases), args.out, sort_keys=True, indent=2)
    args.out.write("\n")


if __name__ == "__main__":
    main()
