"""Green <= relaxed Lempert <= Lempert on a polar grid, for every preset."""

import json

from plurigreen.cli import run
from plurigreen.scenario import PRESETS


def main():
    for preset in PRESETS:
        code, text = run(["grid", "--preset", preset, "--format", "json"])
        rows = [r for r in json.loads(text)["rows"] if r["region"] != "pole"]
        gaps = [r["lempert_upper"] - r["tilde_upper"] for r in rows]
        lower = [r["tilde_upper"] - r["green"] for r in rows if r["green"] is not None]
        low = f"{min(lower):.2e}" if lower else "n/a"
        print(f"{preset:<9} {len(rows)} points  min(tilde - G) {low:>10}  max(L - tilde) {max(gaps):.3e}")


if __name__ == "__main__":
    main()
