#!/usr/bin/env python3
"""Fixture generator for data/fixtures.json.

For each variant in DESIGN, searches keyword lists so the candidate pool
satisfies the structural requirements below, then sets the requirement profile
to the mean scalar block of the rewarded agents and places the affinity
threshold midway between the weakest rewarded agent and the strongest other.

  * every filtered pool (pool members carrying the required tag) holds at
    least 3 agents spanning at least 2 risk tiers
  * every rewarded agent is pooled and carries the required tag
  * every agent appears in some pool of every scenario
  * fraud_detection: fraud-sentinel is rewarded in all five variants (the
    concentration-prone scenario)

Afterwards, check the resulting dynamics with
  selgov sweep --out-dir /tmp/cal
"""

import itertools
import json
import math
import pathlib
import sys

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
MASK = (1 << 64) - 1
HASH_SEED = 0x5E1EC72FE
DIM = 16
SCALARS = 4
POOL = 5


def splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def token_hash(tok, seed=HASH_SEED):
    h = FNV_OFFSET
    for c in tok.encode():
        h = ((h ^ c) * FNV_PRIME) & MASK
    return splitmix64(h ^ seed)


def hash_embed(tokens, dim):
    v = [0.0] * dim
    for t in tokens:
        h = token_hash(t)
        v[h % dim] += -1.0 if h >> 63 else 1.0
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v] if n > 0 else v


def cos(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


def scalars(a):
    return [a["risk_profile"], a["stability_score"], 100.0 / (100.0 + a["latency_ms"]), a["auditability_score"]]


def agent_emb(a):
    return scalars(a) + hash_embed(a["compliance_tags"], DIM - SCALARS)


def pool(agents, scenario, variant, keywords):
    ctx = [0.0] * SCALARS + hash_embed([scenario, f"variant-{variant}"] + keywords, DIM - SCALARS)
    sims = [(-cos(ctx, agent_emb(a)), a["id"]) for a in agents]
    return sorted(i for _, i in sorted(sims)[:POOL])


def tier(risk):
    return 0 if risk < 1 / 3 else (1 if risk < 2 / 3 else 2)


VOCAB = ["fraud", "aml", "pci-dss", "sox", "ops", "basel", "gdpr", "kyc", "ledger", "chargeback",
         "refund", "settlement", "realtime", "audit", "controls", "velocity", "disputes", "limits"]

# Per scenario: required tag, then one (theme keyword, rewarded agents) per
# variant. The requirement profile is the mean scalar block of the rewarded
# agents; the threshold separates them from everyone else.
DESIGN = {
    "fraud_detection": ("fraud", [
        ("card-fraud", ["fraud-sentinel", "aml-guardian"]),
        ("account-takeover", ["fraud-sentinel", "anomaly-scout"]),
        ("synthetic-identity", ["fraud-sentinel"]),
        ("velocity-bursts", ["fraud-sentinel", "anomaly-scout"]),
        ("merchant-collusion", ["fraud-sentinel"]),
    ]),
    "payments_monitoring": ("pci-dss", [
        ("settlement-breaks", ["payments-watch", "anomaly-scout"]),
        ("cross-border", ["fraud-sentinel", "payments-watch"]),
        ("latency-spike", ["rapid-responder", "anomaly-scout"]),
        ("card-network", ["payments-watch", "rapid-responder"]),
        ("reconciliation", ["anomaly-scout", "payments-watch"]),
    ]),
    "qbr_analysis": ("sox", [
        ("quarterly-review", ["compliance-auditor", "ledger-analyst"]),
        ("revenue-bridge", ["ledger-analyst", "payments-watch"]),
        ("audit-findings", ["compliance-auditor", "payments-watch"]),
        ("ops-kpis", ["payments-watch"]),
        ("regulatory-capital", ["compliance-auditor", "ledger-analyst"]),
    ]),
}


def variant_ok(agents, scenario, tag, v, keywords, focus):
    members = pool(agents, scenario, v, keywords)
    by_id = {a["id"]: a for a in agents}
    filtered = [m for m in members if tag in by_id[m]["compliance_tags"]]
    if len(filtered) < 3 or len({tier(by_id[m]["risk_profile"]) for m in filtered}) < 2:
        return None
    if focus and focus not in members:
        return None
    return members


def profile_of(agents, rewarded):
    rows = [scalars(a) for a in agents if a["id"] in rewarded]
    return [round(sum(col) / len(rows), 4) for col in zip(*rows)]


def threshold(agents, rewarded, keywords):
    """Midpoint between the rewarded and the rest, or None if they overlap."""
    req = requirement(profile_of(agents, rewarded), keywords)
    aff = {a["id"]: cos(agent_emb(a), req) for a in agents}
    low = min(aff[i] for i in rewarded)
    high = max(v for i, v in aff.items() if i not in rewarded)
    return round((low + high) / 2, 4) if low > high + 1e-3 else None


def search(agents, scenario, tag, design):
    by_id = {a["id"]: a for a in agents}
    options = []
    for v, (theme, rewarded) in enumerate(design):
        found = []
        vocab = VOCAB[5 * v:] + VOCAB[:5 * v]
        for extra in itertools.combinations(vocab, 2):
            kw = [theme, *extra]
            members = variant_ok(agents, scenario, tag, v, kw, None)
            if not members or any(r not in members or tag not in by_id[r]["compliance_tags"] for r in rewarded):
                continue
            if threshold(agents, rewarded, kw) is not None:
                found.append((kw, frozenset(members)))
            if len(found) >= 40:
                break
        if not found:
            sys.exit(f"no keyword set for {scenario} variant {v}")
        options.append(found)
    ids = {a["id"] for a in agents}
    for combo in itertools.product(*options):
        if set().union(*(m for _, m in combo)) == ids:
            return [kw for kw, _ in combo]
    sys.exit(f"no exposure-complete keyword combination for {scenario}")


def requirement(profile, keywords):
    return list(profile) + hash_embed(keywords, DIM - SCALARS)


def main():
    path = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures.json"
    doc = json.loads(path.read_text())
    agents = sorted(doc["agents"], key=lambda a: a["id"])
    scenarios = []
    for name, (tag, design) in DESIGN.items():
        keywords = search(agents, name, tag, design)
        variants = []
        for v, ((_, rewarded), kw) in enumerate(zip(design, keywords)):
            h = threshold(agents, rewarded, kw)
            variants.append({"keywords": kw, "profile": profile_of(agents, rewarded), "threshold": h})
            print(f"{name} v{v} kw={kw} pool={pool(agents, name, v, kw)} h={h}")
        scenarios.append({"name": name, "required_tag": tag, "variants": variants})
    doc["scenarios"] = scenarios
    path.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
