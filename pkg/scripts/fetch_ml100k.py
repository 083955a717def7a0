"""Place MovieLens 100K ratings at data/ml-100k/u.data.

GroupLens' own archive is tried first; if that host is unreachable, the
copy bundled in the RecBole wheel is fetched through pip instead (same
100,000 ratings, with a header line that is dropped here).
"""
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
DEST = Path(__file__).resolve().parents[1] / "data" / "ml-100k" / "u.data"


def from_grouplens() -> bytes:
    with urllib.request.urlopen(URL, timeout=20) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_recbole() -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "recbole", "--no-deps",
                        "-q", "-d", tmp], check=True)
        wheel = next(Path(tmp).glob("recbole-*.whl"))
        raw = zipfile.ZipFile(wheel).read("recbole/dataset_example/ml-100k/ml-100k.inter")
    return raw.split(b"\n", 1)[1]


def main():
    if DEST.is_file():
        print(f"already present: {DEST}")
        return
    try:
        data = from_grouplens()
    except OSError as exc:
        print(f"grouplens download failed ({exc}); falling back to the RecBole wheel")
        data = from_recbole()
    DEST.parent.mkdir(parents=True, exist_ok=True)
    DEST.write_bytes(data)
    count = data.count(b"\n")
    print(f"wrote {DEST} ({count} ratings)")


if __name__ == "__main__":
    main()
