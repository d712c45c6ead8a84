"""
Text formats of graph2epd.

Every artifact written here starts with a magic line ``# graph2epd <kind> v1``
followed by one ``# key: value`` line per RunConfig entry. Readers skip ``#``
comments anywhere.

graph    first data line ``V E``, then E lines ``u v``
values   lines ``v value``, one per vertex
diagram  ``dim0 <count>`` then ``birth death creator destroyer`` lines, same for ``dim1``;
         creators and destroyers are ``v<id>`` or ``e<id>`` (edge id = row of the sorted edge list)
pairing  ``edge role birth death partner`` per edge; the engine is a header entry
image    ``r min max sigma weight_mode`` then r rows of r values
history  ``epoch train_loss test_w2 test_pie`` then one row per epoch
"""

import glob
import os
import re

import numpy as np
import pandas as pd

from .diagrams import PersistenceImage
from .errors import DataFormatError, UsageError
from .graph import build_graph
from .persistence import PersistenceDiagram, PersistencePair, Simplex

MAGIC = "graph2epd"
VERSION = "v1"
ARTIFACT_SUFFIXES = ("_epd", "_pairs", "_pred", "_img", "_values", "_history")


class RunConfig(dict):
    """Ordered parameters of a run, embedded in the header of every artifact."""

    def header_lines(self, kind):
        lines = [f"# {MAGIC} {kind} {VERSION}"]
        lines.extend(f"# {key}: {format_value(value)}" for key, value in self.items())
        return lines


def format_value(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)


def _header(kind, run_config):
    return "\n".join((run_config or RunConfig()).header_lines(kind)) + "\n"


def read_header(path):
    """``# key: value`` entries of the leading comment block, as strings."""
    entries = {}
    with open(path, "r", errors="replace") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition(":")
            if sep:
                entries[key.strip()] = value.strip()
    return entries


def _data_lines(path):
    """(line number, tokens) of every non-comment, non-empty line."""
    try:
        with open(path, "r") as f:
            raw = f.readlines()
    except OSError as e:
        raise DataFormatError(f"cannot read file ({e.strerror})", path) from None
    for number, line in enumerate(raw, start=1):
        tokens = line.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def _ints(tokens, count, path, number, what):
    if len(tokens) != count:
        raise DataFormatError(f"expected {what}, got '{' '.join(tokens)}'", path, number)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DataFormatError(f"expected {what}, got '{' '.join(tokens)}'", path, number) from None


def _float(token, path, number):
    try:
        return float(token)
    except ValueError:
        raise DataFormatError(f"invalid number '{token}'", path, number) from None


#########
# GRAPH #
#########

def read_graph(path):
    lines = _data_lines(path)
    try:
        number, tokens = next(lines)
    except StopIteration:
        raise DataFormatError("missing 'V E' header line", path) from None
    num_vertices, num_edges = _ints(tokens, 2, path, number, "'V E'")
    if num_vertices < 0 or num_edges < 0:
        raise DataFormatError("negative counts in 'V E' header", path, number)
    raw_edges = []
    for number, tokens in lines:
        if len(raw_edges) == num_edges:
            raise DataFormatError(f"more than the {num_edges} edges announced in the header", path, number)
        u, v = _ints(tokens, 2, path, number, "an edge 'u v'")
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise DataFormatError(f"edge ({u}, {v}) has a vertex id outside [0, {num_vertices})", path, number)
        raw_edges.append((u, v))
    if len(raw_edges) != num_edges:
        raise DataFormatError(f"expected {num_edges} edges, found {len(raw_edges)}", path)
    return build_graph(num_vertices, raw_edges)


def write_graph(path, g, run_config=None):
    with open(path, "w") as f:
        f.write(_header("graph", run_config))
        f.write(f"{g.num_vertices} {g.num_edges}\n")
        for u, v in g.edges:
            f.write(f"{u} {v}\n")


##########
# VALUES #
##########

def read_values(path, num_vertices):
    values = np.full(num_vertices, np.nan)
    seen = np.zeros(num_vertices, dtype=bool)
    for number, tokens in _data_lines(path):
        if len(tokens) != 2:
            raise DataFormatError(f"expected 'v value', got '{' '.join(tokens)}'", path, number)
        v = _ints(tokens[:1], 1, path, number, "a vertex id")[0]
        if not 0 <= v < num_vertices:
            raise DataFormatError(f"vertex {v} outside [0, {num_vertices})", path, number)
        if seen[v]:
            raise DataFormatError(f"vertex {v} listed twice", path, number)
        values[v] = _float(tokens[1], path, number)
        seen[v] = True
    missing = np.flatnonzero(~seen)
    if len(missing):
        raise DataFormatError(f"no value for vertex {missing[0]}", path)
    return values


def write_values(path, values, run_config=None):
    with open(path, "w") as f:
        f.write(_header("values", run_config))
        for v, value in enumerate(values):
            f.write(f"{v} {float(value)!r}\n")


############
# DIAGRAMS #
############

def write_diagram(path, diagram, run_config=None, drop_zero=False):
    """
    Write a diagram sorted by (birth, death, creator), with the creator and
    destroyer of every pair as computed. Zero-persistence points are dropped
    when ``drop_zero`` is set (recorded in the header).
    """
    if drop_zero:
        diagram = diagram.without_zero_persistence()
    diagram = diagram.sorted()
    config = RunConfig(run_config or {})
    config["include_zero_persistence"] = diagram.include_zero_persistence
    with open(path, "w") as f:
        f.write(_header("diagram", config))
        for name, pairs in (("dim0", diagram.dim0), ("dim1", diagram.dim1)):
            f.write(f"{name} {len(pairs)}\n")
            for p in pairs:
                f.write(f"{float(p.birth)!r} {float(p.death)!r} {p.creator or '-'} {p.destroyer or '-'}\n")


def read_diagram(path):
    sections = {"dim0": [], "dim1": []}
    expected = {}
    current = None
    for number, tokens in _data_lines(path):
        if tokens[0] in sections:
            current = tokens[0]
            if len(tokens) != 2:
                raise DataFormatError(f"expected '{current} <count>'", path, number)
            expected[current] = _ints(tokens[1:], 1, path, number, "a point count")[0]
            continue
        if current is None:
            raise DataFormatError("point before any 'dim0' or 'dim1' section", path, number)
        if len(tokens) not in (2, 4):
            raise DataFormatError(f"expected 'birth death creator destroyer', got '{' '.join(tokens)}'", path, number)
        birth, death = _float(tokens[0], path, number), _float(tokens[1], path, number)
        refs = [None, None]
        if len(tokens) == 4:
            try:
                refs = [None if t == "-" else Simplex.parse(t) for t in tokens[2:]]
            except DataFormatError as e:
                raise DataFormatError(e.message, path, number) from None
        sections[current].append(PersistencePair(birth, death, int(current[-1]), refs[0], refs[1]))
    for name, count in expected.items():
        if len(sections[name]) != count:
            raise DataFormatError(f"section {name} announces {count} points, found {len(sections[name])}", path)
    include_zero = read_header(path).get("include_zero_persistence", "True") == "True"
    return PersistenceDiagram(sections["dim0"], sections["dim1"], include_zero)


def write_pairings(path, pairing_map, run_config=None):
    with open(path, "w") as f:
        f.write(_header("pairing", run_config))
        for e in pairing_map.edges():
            entry = pairing_map[e]
            f.write(f"e{e} {entry.role} {float(entry.pair.birth)!r} {float(entry.pair.death)!r} {entry.partner}\n")


##########
# IMAGES #
##########

def write_image(path, img, run_config=None):
    with open(path, "w") as f:
        f.write(_header("image", run_config))
        lo, hi = img.bounds
        f.write(f"{img.resolution} {float(lo)!r} {float(hi)!r} {float(img.sigma)!r} {img.weight_mode}\n")
        for row in img.values:
            f.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_image(path):
    lines = _data_lines(path)
    try:
        number, tokens = next(lines)
    except StopIteration:
        raise DataFormatError("missing 'r min max sigma weight_mode' header line", path) from None
    if len(tokens) != 5:
        raise DataFormatError("expected 'r min max sigma weight_mode'", path, number)
    r = _ints(tokens[:1], 1, path, number, "a resolution")[0]
    weight_mode = tokens[4]
    lo, hi, sigma = (_float(t, path, number) for t in tokens[1:4])
    rows = []
    for number, tokens in lines:
        if len(tokens) != r:
            raise DataFormatError(f"expected {r} values per row, got {len(tokens)}", path, number)
        rows.append([_float(t, path, number) for t in tokens])
    if len(rows) != r:
        raise DataFormatError(f"expected {r} rows, found {len(rows)}", path)
    return PersistenceImage(np.array(rows, dtype=np.float64).reshape(r, r), (lo, hi), sigma, weight_mode)


##########
# TABLES #
##########

def write_history(path, history, run_config=None):
    with open(path, "w") as f:
        f.write(_header("history", run_config))
        history.to_csv(f, sep=" ", index=False, na_rep="nan")


def read_history(path):
    return pd.read_csv(path, sep=" ", comment="#")


def write_table(path, table, run_config=None, kind="report"):
    """CSV with the RunConfig header, or an Excel workbook with a RunConfig sheet."""
    if path.endswith(".xlsx"):
        with pd.ExcelWriter(path) as writer:
            table.to_excel(writer, sheet_name=kind, index=False)
            pd.Series({k: format_value(v) for k, v in (run_config or {}).items()}, dtype=object) \
                .rename("value").to_frame().to_excel(writer, sheet_name="RunConfig")
        return
    with open(path, "w") as f:
        f.write(_header(kind, run_config))
        table.to_csv(f, index=False)


def read_table(path, kind="report"):
    if path.endswith(".xlsx"):
        return pd.read_excel(path, sheet_name=kind)
    return pd.read_csv(path, comment="#")


###########
# FOLDERS #
###########

def artifact_stem(path):
    """File stem without artifact suffixes, e.g. 'vicinity_3_pred_img.txt' -> 'vicinity_3'."""
    stem = os.path.splitext(os.path.basename(path))[0]
    changed = True
    while changed:
        changed = False
        for suffix in ARTIFACT_SUFFIXES:
            if stem.endswith(suffix):
                stem = stem[:-len(suffix)]
                changed = True
    return stem


def is_artifact(path):
    stem = os.path.splitext(os.path.basename(path))[0]
    return stem.endswith(ARTIFACT_SUFFIXES)


def _natural_key(path):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", path)]


def list_graph_files(folder, recursive=False):
    """
    Graph files (``*.txt`` that are not artifacts) in natural order. With
    ``recursive`` the subfolders are searched too, which is how the output of
    a vicinity extraction over several graphs is laid out.
    """
    pattern = os.path.join(folder, "**", "*.txt") if recursive else os.path.join(folder, "*.txt")
    found = (p for p in glob.glob(pattern, recursive=recursive) if not is_artifact(p))
    return sorted(found, key=lambda p: _natural_key(os.path.relpath(p, folder)))


def list_artifacts(folder, suffix, recursive=False):
    pattern = os.path.join(folder, "**", f"*{suffix}.txt") if recursive else os.path.join(folder, f"*{suffix}.txt")
    return sorted(glob.glob(pattern, recursive=recursive), key=lambda p: _natural_key(os.path.relpath(p, folder)))


def artifact_key(path, folder):
    """Relative subfolder plus artifact stem, the key files of two folders are matched on."""
    return os.path.join(os.path.dirname(os.path.relpath(path, folder)), artifact_stem(path))


def index_artifacts(folder, suffixes):
    """Map artifact key -> path; for a key found with several suffixes the first suffix wins."""
    files = {}
    for suffix in suffixes:
        for path in list_artifacts(folder, suffix, recursive=True):
            files.setdefault(artifact_key(path, folder), path)
    return files


def match_artifacts(folder_a, folder_b, suffixes):
    """
    (key, path in folder_a, path in folder_b) for every key present in both
    folders, and the count of files left without counterpart. folder_a prefers
    the first suffix, folder_b the last.
    """
    left, right = index_artifacts(folder_a, suffixes), index_artifacts(folder_b, suffixes[::-1])
    common = [key for key in left if key in right]
    if not common:
        raise UsageError(f"no matching files between {folder_a} and {folder_b}")
    return [(key, left[key], right[key]) for key in common], len(left) + len(right) - 2 * len(common)
