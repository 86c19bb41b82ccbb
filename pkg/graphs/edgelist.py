"""Edge-list file format for AttachGraph.

Header:  #attachgraph v1 model=<ua|pa> n=<n> m1=<m1> m2=<m2> seed=<u64> [coloured=<0|1>]
Records: stem<TAB>ordinal<TAB>target<TAB>colour   (colour in b, r, p)

The colour letters say whether a graph is coloured. A graph without
records (m = 0) carries the flag in the optional coloured= token instead.
"""

import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from graphs.core import PLAIN, PREFERENTIAL, UNIFORM, AttachGraph, COLOUR_LETTERS, LETTER_COLOURS
from graphs.errors import EdgeListFormatError

MODEL_TAGS = {UNIFORM: "ua", PREFERENTIAL: "pa"}
TAG_MODELS = {tag: model for model, tag in MODEL_TAGS.items()}

HEADER_PATTERN = re.compile(
    r"^#attachgraph v1 model=(?P<model>ua|pa) n=(?P<n>\d+) m1=(?P<m1>\d+) m2=(?P<m2>\d+) seed=(?P<seed>\d+)"
    r"(?: coloured=(?P<coloured>[01]))?$"
)
COLUMNS = ["stem", "ordinal", "target", "colour"]


def format_header(g: AttachGraph) -> str:
    header = f"#attachgraph v1 model={MODEL_TAGS[g.model]} n={g.n} m1={g.m1} m2={g.m2} seed={g.seed}"
    if g.m == 0:
        header += f" coloured={int(g.coloured)}"
    return header


def write_edgelist(g: AttachGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    letters = np.array([COLOUR_LETTERS[code] for code in sorted(COLOUR_LETTERS)])
    frame = pd.DataFrame({
        "stem": g.stems,
        "ordinal": g.ordinals,
        "target": g.targets,
        "colour": letters[g.colours],
    })
    with open(path, "w", newline="") as f:
        f.write(format_header(g) + "\n")
        frame.to_csv(f, sep="\t", header=False, index=False, lineterminator="\n")
    return path


def read_edgelist(path: Union[str, Path]) -> AttachGraph:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Edge list not found: {path}")

    with open(path, "r") as f:
        header = f.readline().rstrip("\n")
    match = HEADER_PATTERN.match(header)
    if not match:
        raise EdgeListFormatError(f"Bad header in {path}: {header!r}")

    try:
        frame = pd.read_csv(path, sep="\t", header=None, names=COLUMNS, skiprows=1,
                            dtype={"stem": np.int64, "ordinal": np.int64, "target": np.int64, "colour": str})
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame({column: pd.Series(dtype=np.int64) for column in COLUMNS})
    except ValueError as e:
        raise EdgeListFormatError(f"Bad record in {path}: {e}") from e

    unknown = set(frame["colour"].unique()) - set(LETTER_COLOURS)
    if unknown:
        raise EdgeListFormatError(f"Unknown colour letters {sorted(unknown)} in {path}")
    colours = frame["colour"].map(LETTER_COLOURS).to_numpy(dtype=np.uint8)
    if match["coloured"] is not None:
        coloured = match["coloured"] == "1"
    else:
        coloured = int(match["m2"]) > 0 or bool(np.any(colours != PLAIN))

    try:
        return AttachGraph(
            n=int(match["n"]),
            m1=int(match["m1"]),
            m2=int(match["m2"]),
            model=TAG_MODELS[match["model"]],
            seed=int(match["seed"]),
            stems=frame["stem"].to_numpy(),
            ordinals=frame["ordinal"].to_numpy(),
            targets=frame["target"].to_numpy(),
            colours=colours,
            coloured=coloured,
        )
    except ValueError as e:
        raise EdgeListFormatError(f"Invalid graph in {path}: {e}") from e
