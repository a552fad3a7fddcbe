#!/usr/bin/env python3
"""Generate the bundled topology documents under data/topologies/.

Router graphs are synthetic ISP-like graphs (geographic placement, preferential
attachment, distance-proportional delays) sized to match the published
node/link counts of the Exodus (AS 3967) and Abovenet (AS 6461) RocketFuel
maps. They are not the real RocketFuel delay data.

Endpoints follow the attach rule used by the simulator: one consumer per
router, floor(0.05 * routers) (minimum 1) sources on the highest-degree
routers, all artificial links with delay 0.
"""
import json
import math
import random
import sys
from pathlib import Path


def router_graph(n_routers, n_edges, seed):
    rng = random.Random(seed)
    pos = [(rng.uniform(0, 4000), rng.uniform(0, 2000)) for _ in range(n_routers)]
    edges = set()
    deg = [0] * n_routers

    def add(a, b):
        key = (min(a, b), max(a, b))
        if a == b or key in edges:
            return False
        edges.add(key)
        deg[a] += 1
        deg[b] += 1
        return True

    # spanning tree: each new node attaches to a nearby, preferentially high-degree node
    for v in range(1, n_routers):
        cands = sorted(range(v), key=lambda u: math.dist(pos[u], pos[v]))[:6]
        weights = [deg[u] + 1 for u in cands]
        add(v, rng.choices(cands, weights)[0])
    while len(edges) < n_edges:
        a = rng.choices(range(n_routers), [d + 1 for d in deg])[0]
        cands = sorted((u for u in range(n_routers) if u != a),
                       key=lambda u: math.dist(pos[u], pos[a]))[:8]
        add(a, rng.choice(cands))
    width = len(str(n_routers - 1))
    name = lambda i: f"r{i:0{width}d}"
    out = []
    for a, b in sorted(edges):
        # ~ fibre propagation: 1 ms per 200 km, floor of 1 ms
        delay = max(1.0, round(math.dist(pos[a], pos[b]) / 200.0, 1))
        out.append({"a": name(a), "b": name(b), "delay_ms": delay})
    return [name(i) for i in range(n_routers)], out


def attach(routers, edges, fraction=0.05):
    deg = {r: 0 for r in routers}
    for e in edges:
        deg[e["a"]] += 1
        deg[e["b"]] += 1
    nodes = [{"id": r, "role": "router"} for r in routers]
    all_edges = list(edges)
    for r in routers:
        nodes.append({"id": "c" + r[1:], "role": "consumer"})
        all_edges.append({"a": "c" + r[1:], "b": r, "delay_ms": 0})
    n_src = max(1, math.floor(fraction * len(routers)))
    ranked = sorted(routers, key=lambda r: (-deg[r], r))[:n_src]
    for i, r in enumerate(ranked):
        nodes.append({"id": f"s{i}", "role": "source"})
        all_edges.append({"a": f"s{i}", "b": r, "delay_ms": 0})
    return {"nodes": nodes, "edges": all_edges}


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    specs = {
        "desk12.json": (12, 17, 12),
        # 79 routers, 229 links total - 79 consumer links - 3 source links
        "exodus.json": (79, 147, 3967),
        # 138 routers, 516 links total - 138 consumer links - 6 source links
        "abovenet.json": (138, 372, 6461),
    }
    for fname, (n, m, seed) in specs.items():
        routers, edges = router_graph(n, m, seed)
        doc = attach(routers, edges)
        (outdir / fname).write_text(json.dumps(doc, indent=1) + "\n")
        print(fname, len(doc["nodes"]), "nodes", len(doc["edges"]), "edges")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "topologies")
