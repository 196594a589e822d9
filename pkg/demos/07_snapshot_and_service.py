"""Bundling an engine snapshot and querying it over HTTP.

A snapshot freezes feature stores, training pairs, and trained models into
one checksummed file; the service answers read-only queries against it and
appends posted preference comparisons to a log the analytics CLI can read.
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

import numpy as np

from fontpair import (
    EngineSnapshot,
    FeatureStore,
    PairDataset,
    PairRecord,
    load_snapshot,
    save_snapshot,
)
from fontpair.dsknn import DsknnParams
from fontpair.service import make_server

rng = np.random.default_rng(17)
names = ["Alpha", "Alpha-Bold", "Beta", "Beta-Italic", "Gamma", "Delta"]
store = FeatureStore((n, rng.normal(size=6)) for n in names)
train = PairDataset("header_body", [
    PairRecord("Alpha", "Beta", 3),
    PairRecord("Alpha-Bold", "Beta", 1),
    PairRecord("Beta", "Gamma", 2),
    PairRecord("Gamma", "Delta", 1),
])
engine = EngineSnapshot(store, store, train, dsknn_params=DsknnParams(k1=2, k2=2))

workdir = Path(tempfile.mkdtemp())
snap_path = workdir / "engine.snapshot"
save_snapshot(engine, snap_path)
reloaded = load_snapshot(snap_path)
print(f"snapshot round-trip OK: {snap_path.stat().st_size} bytes")

log_path = workdir / "comparisons.log"
server = make_server(reloaded, "127.0.0.1", 0, comparison_log=log_path)
port = server.server_address[1]
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{port}"
print(f"service listening on {base}\n")


def get(path):
    with urllib.request.urlopen(base + path) as resp:
        return json.loads(resp.read())


print("GET /fonts?role=header ->", get("/fonts?role=header")["fonts"][:4], "...")
body = get("/recommend?header=Alpha&method=dsknn&n=3")
print("GET /recommend?header=Alpha&method=dsknn&n=3 ->")
for row in body["recommendations"]:
    print(f"   {row['font_id']:<12} {row['score']:+.4f}")
print("GET /score?header=Alpha&follower=Beta&method=sknn ->",
      f"{get('/score?header=Alpha&follower=Beta&method=sknn')['score']:+.4f}")

payload = json.dumps({
    "header": "Alpha", "follower_a": "Beta", "follower_b": "Delta", "choice": "a",
}).encode()
req = urllib.request.Request(base + "/comparisons", data=payload,
                             headers={"Content-Type": "application/json"})
with urllib.request.urlopen(req) as resp:
    print("POST /comparisons ->", json.loads(resp.read()))
print("comparison log now holds:", log_path.read_text().strip())

server.shutdown()
server.server_close()
