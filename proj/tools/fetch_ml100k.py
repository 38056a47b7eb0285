#!/usr/bin/env python3
# Copyright 2026 The GEMRank Authors.
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
"""Materializes MovieLens-100K `u.data` without direct access to grouplens.org.

The pytorch-widedeep wheel on PyPI ships the ratings table as parquet. This
script downloads the wheel (no dependencies), reads the table and writes it
back out in the original tab-separated `user item rating timestamp` layout.

Usage: tools/fetch_ml100k.py [OUT_DIR]   (default: data/ml-100k)
"""
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

import pandas as pd

MEMBER = "pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli"


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/ml-100k")
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
             "-d", tmp, "pytorch-widedeep==1.7.0"],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("pytorch_widedeep-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            frame = pd.read_parquet(io.BytesIO(z.read(MEMBER)))
    frame = frame[["user_id", "movie_id", "rating", "timestamp"]]
    if len(frame) != 100000:
        print(f"unexpected row count {len(frame)}", file=sys.stderr)
        return 1
    target = out_dir / "u.data"
    frame.to_csv(target, sep="\t", header=False, index=False)
    print(f"wrote {target} ({len(frame)} ratings, "
          f"{frame.user_id.nunique()} users, {frame.movie_id.nunique()} items)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
