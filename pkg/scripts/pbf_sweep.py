"""Tabulate the projective bundle checks over a grid of bases, bundles and twists.

    python3 scripts/pbf_sweep.py --bases P1 P2 --kmax 3 [--json out.json]
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from f1kgw.builtins import builtin_scheme
from f1kgw.bundles import direct_sum_bundle, pic, pn_line, trivial_bundle
from f1kgw.projbundle import gamma_check, gw0_pbf_check, k0_pbf_check, pic_pbf_check, proj_bundle


@dataclass
class SweepConfig:
    bases: list = field(default_factory=lambda: ["point", "A1", "P1", "P2"])
    kmax: int = 3
    twists: tuple = (0, 1, 2)


def lines_for(X):
    if X.meta.get("kind") == "Pn":
        return lambda k: pn_line(X, k)
    return lambda k: trivial_bundle(X, 1)


def sweep(cfg: SweepConfig):
    rows = []
    for name in cfg.bases:
        X = builtin_scheme(name)
        line = lines_for(X)
        Es = {"O^2": trivial_bundle(X, 2), "O^3": trivial_bundle(X, 3)}
        for k in range(-cfg.kmax, cfg.kmax + 1):
            Es[f"O+O({k})"] = direct_sum_bundle(line(0), line(k))
        for ename, E in Es.items():
            t0 = time.perf_counter()
            PB = proj_bundle(X, E)
            base = dict(base=name, bundle=ename, charts=len(PB.scheme.charts),
                        pic=pic(PB.scheme).group.describe(), gamma=gamma_check(PB),
                        k0=k0_pbf_check(PB)["ok"])
            for d in cfg.twists:
                rep = pic_pbf_check(PB, line(d))
                g = gw0_pbf_check(PB, line(d))
                rows.append(dict(base, twist=f"O({d})", pic_ok=rep.ok, gw0=g["ok"],
                                 seconds=round(time.perf_counter() - t0, 3)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bases", nargs="+", default=SweepConfig().bases)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--json", help="write rows to this file")
    args = ap.parse_args()
    cfg = SweepConfig(bases=args.bases, kmax=args.kmax)
    rows = sweep(cfg)
    cols = ["base", "bundle", "twist", "charts", "pic", "pic_ok", "k0", "gw0", "gamma"]
    print("  ".join(f"{c:<9}" for c in cols))
    for r in rows:
        print("  ".join(f"{str(r[c]):<9}" for c in cols))
    bad = [r for r in rows if not (r["pic_ok"] and r["k0"] and r["gw0"] and r["gamma"])]
    print(f"{len(rows)} cases, {len(bad)} failing")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=2)
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
