#!/usr/bin/env python3
"""Writes data/net7.topo and data/net44.topo.

Both are reconstructions: the node counts, link counts, capacities and server
counts are fixed, the adjacency and gateway choice are ours.
"""

import math
import pathlib
import sys

E_IDLE = 0.0184453
ALPHA_U = 0.0095632
CLOUD_CAP = 1e9


def haversine_km(a, b):
    la1, lo1, la2, lo2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def render(title, nodes, cloud, servers_per_node, server_cap, pairs, gateways, link_cap):
    out = [f"# {title}", "# representative reconstruction: adjacency and cloud gateways are not",
           "# taken from a published map. Link delays come from node coordinates.", "",
           "[nodes]", "# id lat lon cloud name"]
    for i, (name, lat, lon) in enumerate(nodes):
        out.append(f"{i} {lat:.4f} {lon:.4f} 0 {name}")
    out.append(f"{len(nodes)} {cloud[1]:.4f} {cloud[2]:.4f} 1 {cloud[0]}")
    out += ["", "[servers]", "# id node capacity cloud e_idle alpha_u k_fixed"]
    sid = 0
    for i in range(len(nodes)):
        for _ in range(servers_per_node):
            out.append(f"{sid} {i} {server_cap} 0 {E_IDLE} {ALPHA_U} 0")
            sid += 1
    out.append(f"{sid} {len(nodes)} {CLOUD_CAP:.0f} 1 0 0 0")
    out += ["", "[links]", "# src dst capacity (delay from coordinates)"]
    for a, b in pairs:
        out.append(f"{a} {b} {link_cap}")
        out.append(f"{b} {a} {link_cap}")
    c = len(nodes)
    for g in gateways:
        out.append(f"{g} {c} inf")
        out.append(f"{c} {g} inf")
    return "\n".join(out) + "\n"


def net7():
    nodes = [("n0", 52.2646, 10.5236), ("n1", 52.2820, 10.5260), ("n2", 52.2680, 10.5480),
             ("n3", 52.2530, 10.4950), ("n4", 52.2300, 10.5250), ("n5", 52.2980, 10.5600)]
    ring = [(i, (i + 1) % 6) for i in range(6)]
    pairs = ring + [(0, 3)]
    return render("net7: 6 edge nodes in a ring with one chord, plus a cloud node",
                  nodes, ("Frankfurt", 50.1109, 8.6821), 1, 1000, pairs, [1, 3, 5], 500)


TOWNS = [
    ("Columbia", 34.00, -81.03), ("Charleston", 32.78, -79.93), ("Greenville", 34.85, -82.40),
    ("Spartanburg", 34.95, -81.93), ("Rock_Hill", 34.92, -81.03), ("Myrtle_Beach", 33.69, -78.89),
    ("Florence", 34.20, -79.76), ("Sumter", 33.92, -80.34), ("Aiken", 33.56, -81.72),
    ("Anderson", 34.50, -82.65), ("Orangeburg", 33.49, -80.86), ("Beaufort", 32.43, -80.67),
    ("Hilton_Head", 32.22, -80.75), ("Greenwood", 34.19, -82.16), ("Conway", 33.84, -79.05),
    ("Georgetown", 33.38, -79.29), ("Lancaster", 34.72, -80.77), ("Gaffney", 35.07, -81.65),
    ("Easley", 34.83, -82.60), ("Clemson", 34.68, -82.84), ("Seneca", 34.69, -82.95),
    ("Newberry", 34.27, -81.62), ("Camden", 34.25, -80.61), ("Darlington", 34.30, -79.87),
    ("Hartsville", 34.37, -80.07), ("Bennettsville", 34.62, -79.68), ("Dillon", 34.42, -79.37),
    ("Marion", 34.18, -79.40), ("Kingstree", 33.67, -79.83), ("Walterboro", 32.90, -80.67),
    ("Summerville", 33.02, -80.18), ("Moncks_Corner", 33.20, -80.01), ("Barnwell", 33.24, -81.36),
    ("Allendale", 33.01, -81.31), ("Hampton", 32.87, -81.11), ("Bamberg", 33.30, -81.03),
    ("Lexington", 33.98, -81.24), ("Chester", 34.70, -81.21), ("Union", 34.72, -81.62),
    ("Laurens", 34.50, -82.01), ("Abbeville", 34.18, -82.38), ("Edgefield", 33.79, -81.93),
    ("Saluda", 34.00, -81.77),
]


def net44():
    n = len(TOWNS)
    pts = [(t[1], t[2]) for t in TOWNS]
    dist = {(i, j): haversine_km(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n)}
    # Prim from node 0, ties by index.
    in_tree = {0}
    tree = []
    while len(in_tree) < n:
        best = min(((dist[min(i, j), max(i, j)], min(i, j), max(i, j))
                    for i in in_tree for j in range(n) if j not in in_tree))
        tree.append((best[1], best[2]))
        in_tree.add(best[2] if best[1] in in_tree else best[1])
    extra = sorted((d, i, j) for (i, j), d in dist.items() if (i, j) not in set(tree))[:15]
    pairs = sorted(tree + [(i, j) for _, i, j in extra])
    assert len(pairs) == 57
    gateways = list(range(13))
    return render("net44: 43 towns of South Carolina plus a cloud node",
                  TOWNS, ("Ashburn", 39.04, -77.49), 8, 1000, pairs, gateways, 5000)


def main():
    root = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data"
    root.mkdir(parents=True, exist_ok=True)
    (root / "net7.topo").write_text(net7())
    (root / "net44.topo").write_text(net44())


if __name__ == "__main__":
    main()
