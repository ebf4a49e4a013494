"""Service round trip: boot the API on a local port, query it, reload it.

Shows the snapshot-swap model from a client's perspective: every response
carries its snapshot_id, and an admin reload atomically publishes a new
snapshot without disturbing readers.
"""

import json
import socket
import tempfile
import threading
import time
import urllib.request
from pathlib import Path

import uvicorn

from crashboard.config import AppConfig
from crashboard.service import SnapshotHolder, create_app
from crashboard.synth import simple_spec, write_dataset


def get(base: str, path: str) -> dict:
    with urllib.request.urlopen(base + path, timeout=10) as response:
        return json.loads(response.read())


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="crashboard-demo-"))
    for seed, name in ((1, "first"), (2, "second")):
        out = workdir / name
        out.mkdir()
        write_dataset(
            simple_spec(seed=seed, n_crashes=500 * seed, tribal_fraction=0.3),
            out / "crashes.csv", out / "persons.csv", out / "boundaries.geojson",
        )

    holder = SnapshotHolder()
    holder.load_files(
        str(workdir / "first" / "crashes.csv"),
        str(workdir / "first" / "persons.csv"),
        str(workdir / "first" / "boundaries.geojson"),
    )

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    config = AppConfig(listen_addr=f"127.0.0.1:{port}", admin_token="demo-token")
    app = create_app(config, holder)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)
    base = f"http://127.0.0.1:{port}"
    print(f"serving on {base}")

    info = get(base, "/api/v1/snapshot")
    print("snapshot:", json.dumps(info, indent=2))

    summary = get(base, "/api/v1/summary?scope=tribal")
    print(f"tribal: {summary['total']} crashes, kab_rate={summary['kab_rate']:.2f}%")

    rankings = get(base, "/api/v1/tribes/rankings")
    top = rankings["rows"][0]
    print(f"top KAB-rate tribe: {top['name']} ({top['kab_rate']:.2f}%)")

    # atomic reload to the second dataset
    request = urllib.request.Request(
        f"{base}/api/v1/admin/reload",
        data=json.dumps(
            {
                "crash_csv_path": str(workdir / "second" / "crashes.csv"),
                "persons_csv_path": str(workdir / "second" / "persons.csv"),
                "boundaries_path": str(workdir / "second" / "boundaries.geojson"),
            }
        ).encode(),
        headers={"Content-Type": "application/json", "X-Admin-Token": "demo-token"},
    )
    with urllib.request.urlopen(request, timeout=10) as response:
        new_info = json.loads(response.read())
    print(f"reloaded: {info['snapshot_id']} -> {new_info['snapshot_id']} "
          f"({new_info['record_count']} records)")

    summary = get(base, "/api/v1/summary")
    assert summary["snapshot_id"] == new_info["snapshot_id"]
    print(f"statewide total after reload: {summary['total']}")

    server.should_exit = True
    thread.join(timeout=10)
    print("server stopped")


if __name__ == "__main__":
    main()
