"""Generates the 100-record replay fixture and its expected reports.

The simulation is written from the filter's definition, independently of the
C++ code: walk the stream, decide with the statistics of records seen so far
(or of the whole stream in oracle mode), then count the record.

Outputs tests/data/replay_fixture.jsonl and tests/data/replay_expected.json.
"""
import json
import os
import random

NOOP = {1, 2, 17}
HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# (category, weight, p_compile, p_pass_given_compile, p_noop)
PROFILE = [
    (1, 18, 0.95, 0.90, 0.90),
    (2, 8, 0.90, 0.80, 0.70),
    (5, 20, 0.67, 0.33, 0.05),
    (8, 24, 0.17, 0.20, 0.00),
    (9, 14, 0.80, 0.60, 0.10),
    (12, 6, 0.50, 0.50, 0.00),
    (17, 10, 0.90, 0.85, 0.60),
]


def make_records():
    rng = random.Random(20240611)
    cats = [c for c, w, *_ in PROFILE for _ in range(w)]
    rng.shuffle(cats)
    prof = {c: rest for c, _, *rest in PROFILE}
    records = []
    for i, c in enumerate(cats):
        pc, pp, pn = prof[c]
        compiled = rng.random() < pc
        passed = compiled and rng.random() < pp
        noop = rng.random() < pn
        records.append({
            "patch_id": f"p{i:03d}",
            "project": "jcodec",
            "llm": "llama3",
            "diff_raw": f"{i + 1}c{i + 1}\n< a\n---\n> b\n",
            "summary_raw": None,
            "summary_clean": None,
            "category_manual": None,
            "category_auto": c,
            "compiled": compiled,
            "passed": passed,
            "noop": noop,
        })
    return records


def pass_rate(s, basis):
    denom = s["total"] if basis == "total" else s["compiled"]
    return s["passed"] / denom if denom else 0.0


def decide(policy, stats, c):
    if policy["skip_noop_categories"] and c in NOOP:
        return "NoOpCategory"
    s = stats.get(c, {"total": 0, "compiled": 0, "passed": 0})
    if s["total"] >= policy["min_samples"] and \
            pass_rate(s, policy["pass_rate_basis"]) < policy["min_pass_rate"]:
        return "LowPassRate"
    return None


def add(stats, r):
    s = stats.setdefault(r["category_auto"], {"total": 0, "compiled": 0, "passed": 0})
    s["total"] += 1
    s["compiled"] += r["compiled"]
    s["passed"] += r["passed"]


def simulate(records, policy, mode):
    stats = {}
    if mode == "oracle":
        for r in records:
            add(stats, r)
    rep = {"records": len(records), "evaluations_skipped": 0, "evaluations_run": 0,
           "passing_patches_lost": 0, "noops_avoided": 0,
           "skipped_noop_category": 0, "skipped_low_pass_rate": 0}
    for r in records:
        reason = decide(policy, stats, r["category_auto"])
        if reason is None:
            rep["evaluations_run"] += 1
        else:
            rep["evaluations_skipped"] += 1
            rep["passing_patches_lost"] += r["passed"]
            rep["noops_avoided"] += r["noop"]
            key = "skipped_noop_category" if reason == "NoOpCategory" else "skipped_low_pass_rate"
            rep[key] += 1
        if mode == "prequential":
            add(stats, r)
    return rep


POLICIES = {
    "default": {"skip_noop_categories": True, "min_pass_rate": 0.10,
                "min_samples": 20, "pass_rate_basis": "total"},
    "neutral": {"skip_noop_categories": False, "min_pass_rate": 0.0,
                "min_samples": 20, "pass_rate_basis": "total"},
    "aggressive": {"skip_noop_categories": True, "min_pass_rate": 0.30,
                   "min_samples": 5, "pass_rate_basis": "total"},
    "compiled_basis": {"skip_noop_categories": False, "min_pass_rate": 0.5,
                       "min_samples": 5, "pass_rate_basis": "compiled"},
}


def main():
    records = make_records()
    with open(os.path.join(DATA, "replay_fixture.jsonl"), "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")
    expected = []
    for name, policy in POLICIES.items():
        for mode in ("prequential", "oracle"):
            expected.append({"policy_name": name, "policy": policy, "mode": mode,
                             "report": simulate(records, policy, mode)})
    with open(os.path.join(DATA, "replay_expected.json"), "w") as f:
        json.dump(expected, f, indent=1)
        f.write("\n")
    for e in expected:
        print(e["policy_name"], e["mode"], e["report"])


if __name__ == "__main__":
    main()
