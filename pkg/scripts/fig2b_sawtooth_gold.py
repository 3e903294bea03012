"""Lateral force between sawtooth gold gratings at H = 140 nm and the sign
changes of F(b) in (0, 1)."""
import numpy as np

from casilat.validation import sawtooth_gold, sign_changes
from _common import parser, sweep

if __name__ == "__main__":
    args = parser(__doc__, "sawtooth_gold.json").parse_args()
    sweep(args, "fig2b_sawtooth_gold")
    grid = list(np.round(np.linspace(0.0, 1.0, 51), 10))
    roots, _ = sign_changes(sawtooth_gold(), grid)
    print("sign changes (rising ramps):", ", ".join(f"{r:.4f}" for r in roots))
    print("mirrored ramps (b -> 1 - b):", ", ".join(f"{1 - r:.4f}" for r in reversed(roots)))
