"""Regenerate the frozen counterexample fixtures under tests/fixtures/."""

import json
from pathlib import Path

from opmono.monotonicity import TrialConfig, bilinear, counterexample_search, power

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CASES = {
    "bilinear_tuple": (bilinear(1.0), TrialConfig(dims=(2, 3, 4), box=(-3.0, -0.01), seed=2024)),
    **{
        f"power2_alpha{alpha}": (power(2, alpha), TrialConfig(dims=(2, 3, 4), seed=2024))
        for alpha in (0.6, 0.75, 0.9, 1.0)
    },
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (f, cfg) in CASES.items():
        w = counterexample_search(f, "tuple", 10000, cfg)
        if w is None:
            raise SystemExit(f"{name}: no witness within budget")
        record = {
            "function": {"name": f.name, **f.params},
            "regime": "tuple",
            "config": cfg.resolve(f).echo(),
            "witness": w.to_dict(),
        }
        (OUT / f"{name}.json").write_text(json.dumps(record, indent=2) + "\n")
        print(f"{name}: trial {w.index}, d={w.d}, margin {w.margin:.3e}")


if __name__ == "__main__":
    main()
