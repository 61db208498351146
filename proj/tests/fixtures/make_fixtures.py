# Copyright 2026 The Blendemo Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the synthetic blendshape fixtures in this directory."""

import csv
import pathlib
import random

NAMES = [
    "_neutral", "browDownLeft", "browDownRight", "browInnerUp",
    "browOuterUpLeft", "browOuterUpRight", "cheekPuff", "cheekSquintLeft",
    "cheekSquintRight", "eyeBlinkLeft", "eyeBlinkRight", "eyeLookDownLeft",
    "eyeLookDownRight", "eyeLookInLeft", "eyeLookInRight", "eyeLookOutLeft",
    "eyeLookOutRight", "eyeLookUpLeft", "eyeLookUpRight", "eyeSquintLeft",
    "eyeSquintRight", "eyeWideLeft", "eyeWideRight", "jawForward", "jawLeft",
    "jawOpen", "jawRight", "mouthClose", "mouthDimpleLeft", "mouthDimpleRight",
    "mouthFrownLeft", "mouthFrownRight", "mouthFunnel", "mouthLeft",
    "mouthLowerDownLeft", "mouthLowerDownRight", "mouthPressLeft",
    "mouthPressRight", "mouthPucker", "mouthRight", "mouthRollLower",
    "mouthRollUpper", "mouthShrugLower", "mouthShrugUpper", "mouthSmileLeft",
    "mouthSmileRight", "mouthStretchLeft", "mouthStretchRight",
    "mouthUpperUpLeft", "mouthUpperUpRight", "noseSneerLeft", "noseSneerRight",
]
SOURCE = ["angry", "disgust", "afraid", "happy", "sad", "surprise", "neutral"]
THREE = {"happy": 0, "sad": 2}
# Blendshapes that fire for each three-way class.
ACTIVE = {
    0: ["mouthSmileLeft", "mouthSmileRight", "cheekSquintLeft", "cheekSquintRight"],
    1: ["eyeWideLeft", "eyeWideRight", "jawOpen", "browOuterUpLeft"],
    2: ["mouthFrownLeft", "mouthFrownRight", "browInnerUp", "browDownLeft"],
}
ALWAYS = ["eyeBlinkLeft", "eyeBlinkRight", "_neutral"]


def rows(n, rng):
    out = []
    for i in range(n):
        source = SOURCE[[3, 4, 0, 1, 2, 5, 6][i % 7]] if i % 3 == 2 else (
            "happy" if i % 3 == 0 else "sad")
        label3 = THREE.get(source, 1)
        scores = []
        for name in NAMES:
            if name in ACTIVE[label3]:
                v = rng.uniform(0.55, 1.0)
            elif name in ALWAYS:
                v = rng.uniform(0.3, 0.9)
            else:
                v = rng.uniform(0.0, 0.25)
            scores.append(f"{v:.6f}")
        out.append([str(i), source, str(label3)] + scores)
    return out


def write(path, n, seed):
    rng = random.Random(seed)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "label7", "label3"] + NAMES)
        w.writerows(rows(n, rng))


def main():
    here = pathlib.Path(__file__).resolve().parent
    write(here / "mini" / "train.csv", 60, 1)
    write(here / "mini" / "val.csv", 21, 2)
    write(here / "mini" / "test.csv", 21, 3)
    rng = random.Random(4)
    with open(here / "frames.csv", "w") as f:
        f.write("# one frame per line, 52 scores in canonical order\n")
        for label3 in (0, 1, 2, 2, 0):
            vals = []
            for name in NAMES:
                hi = name in ACTIVE[label3]
                vals.append(f"{rng.uniform(0.6, 1.0) if hi else rng.uniform(0, 0.2):.4f}")
            f.write(",".join(vals) + "\n")


if __name__ == "__main__":
    main()
