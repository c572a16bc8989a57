#!/usr/bin/env python3
# Copyright 2026 The dbnet Authors.
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

"""Prepends the Apache-2.0 header to every first-party source file.

Files that already carry the header are left alone, so reruns are no-ops.
"""

import argparse
import pathlib
import sys

SLASH_SUFFIXES = {".h", ".hpp", ".cc", ".cpp"}
HASH_SUFFIXES = {".py", ".sh", ".cmake"}
HASH_NAMES = {"CMakeLists.txt"}
SKIP_DIRS = {"vendor", "build", "examples", ".git"}
ROOTS = ["src", "include", "tests", "tools", "CMakeLists.txt"]


def header_for(path, slash_header):
    if path.suffix in SLASH_SUFFIXES:
        return slash_header
    if path.suffix in HASH_SUFFIXES or path.name in HASH_NAMES:
        return "".join("#" + line[2:] if line.startswith("//") else line
                       for line in slash_header.splitlines(keepends=True))
    return None


def candidates(repo):
    for root in ROOTS:
        base = repo / root
        paths = [base] if base.is_file() else sorted(base.rglob("*"))
        for p in paths:
            if p.is_file() and not SKIP_DIRS.intersection(p.relative_to(repo).parts):
                yield p


def apply(path, header):
    text = path.read_text()
    first = header.splitlines()[0]
    if first in text.splitlines()[:5]:
        return False
    shebang = ""
    if text.startswith("#!"):
        shebang, _, text = text.partition("\n")
        shebang += "\n"
    path.write_text(shebang + header + "\n" + text)
    return True


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repo", default=pathlib.Path(__file__).resolve().parent.parent, type=pathlib.Path)
    parser.add_argument("--header", required=True, type=pathlib.Path)
    args = parser.parse_args()
    slash_header = args.header.read_text().rstrip() + "\n"
    changed = 0
    for path in candidates(args.repo):
        header = header_for(path, slash_header)
        if header and apply(path, header):
            changed += 1
    print(f"added header to {changed} files", file=sys.stderr)


if __name__ == "__main__":
    main()
