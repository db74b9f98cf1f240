#!/usr/bin/env python3
"""Write every connected 3-regular graph on 10 vertices (up to isomorphism).

There are 19 of them. Graphs are found by seeded random sampling with
isomorphism deduplication. Each graph is relabelled to its smallest BFS
edge list and the files are written in sorted order, so the output does not
depend on the sampling order.
"""
import argparse
import pathlib
import random

import networkx as nx

EXPECTED = 19


def collect(n, seed):
    rng = random.Random(seed)
    found = []
    attempts = 0
    while len(found) < EXPECTED:
        attempts += 1
        if attempts > 2_000_000:
            raise SystemExit(f"only {len(found)} classes after {attempts} samples")
        g = nx.random_regular_graph(3, n, seed=rng.randrange(2**32))
        if not nx.is_connected(g):
            continue
        if any(nx.is_isomorphic(g, h) for h in found):
            continue
        found.append(g)
    return found


def canonical_edges(g):
    # Smallest sorted edge list over BFS relabellings from every start vertex.
    best = None
    for start in sorted(g.nodes):
        order = list(nx.bfs_tree(g, start).nodes)
        relabel = {v: k for k, v in enumerate(order)}
        edges = sorted(tuple(sorted((relabel[a], relabel[b]))) for a, b in g.edges)
        if best is None or edges < best:
            best = edges
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/maxcut_n10_3regular")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    graphs = [canonical_edges(g) for g in collect(10, args.seed)]
    graphs.sort()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, edges in enumerate(graphs):
        lines = [f"# connected cubic graph {k:02d} on 10 vertices", "n 10"]
        lines += [f"{a} {b}" for a, b in edges]
        (out / f"cubic10_{k:02d}.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(graphs)} graphs to {out}")


if __name__ == "__main__":
    main()
