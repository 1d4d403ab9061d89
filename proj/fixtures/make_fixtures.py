#!/usr/bin/env python3
"""Regenerates the model files and the synthetic cohort in this directory.

Rule consequents follow one policy: the output label is the mean label index
of the antecedents, rounded half up.
"""
import itertools
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
LABELS = ["Low", "Medium", "High"]

# name, unit, range (None = unit default, "cohort" = fitted), invert, source
MEASURES = [
    ("Appropriateness to the subject", "ratio", None, False, "text"),
    ("Concreteness", "markers per minute", (0, 6), False, "text"),
    ("Crutches", "count", (0, 12), True, "text"),
    ("Examples", "adjectives per minute", (0, 10), False, "text"),
    ("Fluency", "pauses and interruptions", (0, 20), True, "audio"),
    ("Gaze", "ratio", None, False, "video"),
    ("Gesture", "ratio", None, False, "video"),
    ("Mood", "ratio", None, False, "audio"),
    ("Organization", "connectors per minute", (0, 8), False, "text"),
    ("Originality", "ratio", (0, 0.4), False, "text"),
    ("Quantity", "topics", (0, 6), False, "text"),
    ("Reaction time", "seconds", (0, 30), True, "audio"),
    ("Redundancy", "repetitions", (0, 30), True, "text"),
    ("Speech speed", "syllables/second", (2, 7), False, "audio"),
    ("Smile", "ratio", None, False, "video"),
    ("Vagueness", "per-minute count", "cohort", True, "text"),
    ("Verbal tense", "percent", None, False, "text"),
]

# Reconstructed hierarchy. Attribute inputs are measures, dimension inputs
# are attributes, skill inputs are dimensions.
SKILLS = {
    "Decision-making": {
        "template": "Decision-making is {label}: accuracy is {child:Accuracy} and clearness is {child:Clearness}.",
        "dimensions": {
            "Accuracy": {
                "Speed": ["Reaction time", "Fluency", "Speech speed"],
                "Firmness": ["Gaze", "Mood", "Verbal tense"],
            },
            "Clearness": {
                "Concision": ["Crutches", "Redundancy", "Vagueness"],
                "Focus": ["Appropriateness to the subject", "Quantity"],
            },
        },
    },
    "Communication": {
        "template": None,
        "dimensions": {
            "Verbal communication": {
                "Structure": ["Organization", "Concreteness", "Examples", "Quantity"],
                "Precision": ["Vagueness", "Appropriateness to the subject"],
            },
            "Non-verbal communication": {
                "Body language": ["Gaze", "Gesture", "Smile"],
                "Voice": ["Fluency", "Speech speed", "Mood"],
            },
        },
    },
    "Creativity": {
        "template": None,
        "dimensions": {
            "Novelty": {
                "Lexical richness": ["Originality", "Redundancy"],
                "Idea generation": ["Quantity", "Examples", "Concreteness", "Originality"],
            },
            "Expressiveness": {
                "Emotional tone": ["Mood", "Smile", "Gesture"],
                "Spontaneity": ["Reaction time", "Fluency", "Crutches"],
            },
        },
    },
}

WEIGHTS = {
    "Structure": [2, 1.5, 1, 1],
    "Idea generation": [2, 1, 1, 1.5],
}


def quote(name):
    bare = all(c.isalnum() or c in "_-" for c in name) and name[0].isalpha()
    return name if bare else f'"{name}"'


def rule_block(inputs):
    lines = []
    for combo in itertools.product(range(len(LABELS)), repeat=len(inputs)):
        mean = sum(combo) / len(combo)
        out = int(mean + 0.5)
        ante = " and ".join(f"{quote(i)} is {LABELS[c]}" for i, c in zip(inputs, combo))
        lines.append(f"  if {ante} then {LABELS[out]};")
    return "{\n" + "\n".join(lines) + "\n}"


def mapping(level, name, inputs, template=None):
    head = f"{level} {quote(name)} from {', '.join(quote(i) for i in inputs)}"
    if len(inputs) > 3:
        body = " using weights (" + ", ".join(str(w) for w in WEIGHTS[name]) + ")"
    else:
        body = " using rules " + rule_block(inputs)
    tail = f' template "{template}"' if template else ""
    return head + body + tail + "\n"


def measure_line(m):
    name, unit, rng, invert, source = m
    s = f'measure {quote(name)} unit "{unit}"'
    if rng == "cohort":
        s += " range cohort"
    elif rng is not None:
        s += f" range {rng[0]} {rng[1]}"
    if invert:
        s += " invert"
    return s + f" source {source}\n"


def model_text(skills, header):
    used = []
    for s in skills:
        for dim in SKILLS[s]["dimensions"].values():
            for ms in dim.values():
                used += [m for m in ms if m not in used]
    out = [header, "\n"]
    out += [measure_line(m) for m in MEASURES if m[0] in used]
    done = set()
    for level in ("attribute", "dimension"):
        for s in skills:
            for dname, attrs in SKILLS[s]["dimensions"].items():
                if level == "attribute":
                    for aname, ms in attrs.items():
                        if aname not in done:
                            done.add(aname)
                            out += ["\n", mapping("attribute", aname, ms)]
                elif dname not in done:
                    done.add(dname)
                    out += ["\n", mapping("dimension", dname, list(attrs))]
    for s in skills:
        out += ["\n", mapping("skill", s, list(SKILLS[s]["dimensions"]), SKILLS[s]["template"])]
    return "".join(out)


def write_models():
    (HERE / "soft_skills.glmp").write_text(model_text(
        ["Decision-making", "Communication", "Creativity"],
        "# Soft-skill model over the 17 behavioral measures.\n"
        "# The wiring of attributes and dimensions is a reconstruction; rule\n"
        "# consequents are the mean antecedent level rounded half up.\n"))
    (HERE / "decision_making.glmp").write_text(model_text(
        ["Decision-making"],
        "# Decision-making alone: Speed and Firmness feed Accuracy, Concision and\n"
        "# Focus feed Clearness.\n"))


GROUPS = [("ML-2022", "A", 10), ("ML-2023", "B", 18), ("HCI", "CA", 10), ("HCI", "CB", 11)]


def sample(rng, m):
    name, unit, r, invert, source = m
    if r == "cohort":
        lo, hi = 0.0, 5.0
    elif r is None:
        lo, hi = (0.0, 100.0) if unit == "percent" else (0.0, 1.0)
    else:
        lo, hi = r
    span = hi - lo
    v = rng.uniform(lo - 0.05 * span, hi + 0.05 * span)
    v = max(v, 0.0)
    if unit == "ratio":
        v = min(v, 1.0)
    if unit == "percent":
        v = min(v, 100.0)
    return round(v, 3)


def key(name):
    return name.lower().replace(" ", "_").replace("-", "_")


def write_cohort():
    rng = random.Random(20240611)
    students = []
    for group, prefix, n in GROUPS:
        for i in range(1, n + 1):
            for task in ("T1", "T2", "T3"):
                values = {key(m[0]): sample(rng, m) for m in MEASURES}
                students.append({"code": f"{prefix}{i}", "task": task, "group": group,
                                 "values": values})
    (HERE / "cohort" / "measures.json").write_text(
        json.dumps({"students": students}, indent=2) + "\n")
    # Ten bundles, one with a non-numeric value.
    few = [dict(s) for s in students[:30:3]]
    few[4] = dict(few[4], values=dict(few[4]["values"], speech_speed="fast"))
    (HERE / "broken" / "corrupt_bundle.json").write_text(
        json.dumps({"students": few}, indent=2) + "\n")


if __name__ == "__main__":
    (HERE / "cohort").mkdir(exist_ok=True)
    (HERE / "broken").mkdir(exist_ok=True)
    write_models()
    write_cohort()
