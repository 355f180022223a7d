"""LED/LDR bench measurements: voltage (V), LED current (mA), light power (lux), LDR resistance (kOhm)."""

from __future__ import annotations

from ..dag import parse_dot
from ..data import parse_csv_text, read_csv

HEADER = ["V", "I", "P", "R"]

# learned from data: voltage drives both current and power, no P -> R
MODEL_DATA = parse_dot("digraph { V -> P; V -> I; }")
# domain knowledge: current mediates voltage's effect on power, power sets resistance
MODEL_DOMAIN = parse_dot("digraph { V -> I; I -> P; V -> P; P -> R; }")


def ldr_variant(i_to_p: bool, p_to_r: bool):
    """Domain model with the I->P and/or P->R arms toggled."""
    edges = ["V -> I", "V -> P"]
    if i_to_p:
        edges.append("I -> P")
    if p_to_r:
        edges.append("P -> R")
    return parse_dot("digraph { R; " + "; ".join(edges) + "; }")


def load_ldr_dataset(path):
    return read_csv(path, required=HEADER)


def parse_ldr_text(text):
    return parse_csv_text(text, required=HEADER)
