#!/usr/bin/env python3
# Copyright 2026 The commbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Downloads public datasets and writes them as commbench bundles.

The WebKB graphs (texas, cornell, wisc) come from the geom-gcn release
(``new_data/<name>/out1_*.txt``). ``--source`` may point at a mirror URL or a
local checkout with the same layout. ``karate`` is built offline from
networkx.
"""

import argparse
import pathlib
import sys
import urllib.request

DEFAULT_SOURCE = "https://raw.githubusercontent.com/graphdml-uiuc-jlu/geom-gcn/master"

# bundle name -> (name in the source tree, classes)
WEBKB = {"texas": ("texas", 5), "cornell": ("cornell", 5), "wisc": ("wisconsin", 5)}


def read_source(source, relative):
    if "://" in source:
        url = source.rstrip("/") + "/" + relative
        with urllib.request.urlopen(url, timeout=60) as resp:
            return resp.read().decode("utf-8")
    return (pathlib.Path(source) / relative).read_text(encoding="utf-8")


def write_bundle(dest, name, n, k, classes, edges, features, labels, edge_convention):
    out = pathlib.Path(dest) / name
    out.mkdir(parents=True, exist_ok=True)
    d = len(features[0]) if features else 0
    (out / "meta.txt").write_text(
        f"name = {name}\nn = {n}\nd = {d}\nk = {k}\nclasses = {classes}\n"
        f"edge_convention = {edge_convention}\n")
    (out / "edges.txt").write_text("".join(f"{u} {v}\n" for u, v in edges))
    (out / "features.txt").write_text(
        "".join(" ".join(format_number(x) for x in row) + "\n" for row in features))
    (out / "labels.txt").write_text("".join(f"{l}\n" for l in labels))
    return out


def format_number(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def fetch_webkb(name, source, dest):
    remote, classes = WEBKB[name]
    nodes = read_source(source, f"new_data/{remote}/out1_node_feature_label.txt")
    graph = read_source(source, f"new_data/{remote}/out1_graph_edges.txt")

    rows = {}
    for line in nodes.splitlines()[1:]:
        if not line.strip():
            continue
        node, feats, label = line.split("\t")
        rows[int(node)] = ([float(v) for v in feats.split(",")], int(label))
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ValueError(f"{name}: node ids are not 0..{n - 1}")

    edges = []
    for line in graph.splitlines()[1:]:
        if line.strip():
            u, v = line.split("\t")
            edges.append((int(u), int(v)))
    features = [rows[i][0] for i in range(n)]
    labels = [rows[i][1] for i in range(n)]
    # The published edge counts are the listed (directed) entries.
    return write_bundle(dest, name, n, classes, classes, edges, features, labels, "entries")


def build_karate(dest):
    import networkx as nx

    g = nx.karate_club_graph()
    n = g.number_of_nodes()
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    features = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    labels = [0 if g.nodes[i]["club"] == "Mr. Hi" else 1 for i in range(n)]
    return write_bundle(dest, "karate", n, 2, 2, edges, features, labels, "undirected")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dest", default="data", help="output directory (default: data)")
    parser.add_argument("--source", default=DEFAULT_SOURCE,
                        help="base URL or local directory holding new_data/<name>/")
    parser.add_argument("datasets", nargs="*", default=sorted(WEBKB),
                        help="texas, cornell, wisc or karate (default: the three WebKB graphs)")
    args = parser.parse_args(argv)

    failed = 0
    for name in args.datasets:
        try:
            if name == "karate":
                out = build_karate(args.dest)
            elif name in WEBKB:
                out = fetch_webkb(name, args.source, args.dest)
            else:
                parser.error(f"unknown dataset '{name}'")
            print(f"wrote {out}")
        except (OSError, ValueError) as e:
            print(f"error: {name}: {e}", file=sys.stderr)
            failed += 1
    return 3 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
