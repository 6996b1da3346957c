"""Text file formats: graphs, distance/similarity matrices, cluster tables, bundles.

Every file written here starts with the version line ``# netflow-dist v1``;
readers skip ``#`` comment lines, so hand-written files may omit it.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .clustering import ClusterAssignment, SimilarityMatrix
from .distance import DistanceMatrix
from .errors import InputError, ParseError
from .generators import ScenarioBundle
from .graph import Graph

VERSION_LINE = "# netflow-dist v1"
MANIFEST = "manifest.tsv"


def fmt_real(x: float) -> str:
    return format(float(x), ".17g")


def _content_lines(text: str) -> list[tuple[int, str]]:
    """Non-empty, non-comment lines with their 0-based line numbers."""
    return [(i, line) for i, line in enumerate(text.splitlines()) if line.strip() and not line.startswith("#")]


def _comments(text: str) -> list[str]:
    return [line[1:].strip() for line in text.splitlines() if line.startswith("#")]


# -- graphs -----------------------------------------------------------------

def parse_adjacency_csv(text: str) -> Graph:
    rows = [line.strip() for _, line in _content_lines(text)]
    n = len(rows)
    if n == 0:
        raise ParseError("empty adjacency file")
    adj = np.zeros((n, n), dtype=np.uint8)
    for r, line in enumerate(rows):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != n:
            raise ParseError(f"expected {n} entries, found {len(cells)}", row=r)
        for c, cell in enumerate(cells):
            if cell not in ("0", "1"):
                raise ParseError(f"entry {cell!r} is not 0 or 1", row=r, col=c)
            adj[r, c] = int(cell)
    for r in range(n):
        if adj[r, r]:
            raise ParseError("nonzero diagonal", row=r, col=r)
    # name the first lower-triangle cell that disagrees with its mirror
    bad = np.argwhere(np.tril(adj != adj.T, -1))
    if bad.size:
        r, c = (int(x) for x in bad[0])
        raise ParseError("asymmetric adjacency", row=r, col=c)
    return Graph(adj)


def parse_edge_tsv(text: str) -> Graph:
    lines = _content_lines(text)
    if not lines or not lines[0][1].strip().startswith("n="):
        raise ParseError("edge list must start with a header line 'n=<count>'", row=0)
    try:
        n = int(lines[0][1].strip()[2:])
    except ValueError:
        raise ParseError("bad node count in header", row=lines[0][0]) from None
    if n < 1:
        raise ParseError("node count must be positive", row=lines[0][0])
    adj = np.zeros((n, n), dtype=np.uint8)
    for lineno, line in lines[1:]:
        parts = line.strip().split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'u<TAB>v'", row=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("node ids must be integers", row=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"node pair ({u}, {v}) out of range for n={n}", row=lineno)
        if u == v:
            raise ParseError(f"self-loop ({u}, {v})", row=lineno)
        adj[u, v] = adj[v, u] = 1
    return Graph(adj)


def _resolve_format(path: Path, fmt: str, text: str | None = None) -> str:
    if fmt in ("csv", "tsv"):
        return fmt
    if fmt != "auto":
        raise InputError(f"unknown graph format {fmt!r}")
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".tsv", ".txt", ".edges"):
        return "tsv"
    if text is not None:
        first = next((line for _, line in _content_lines(text)), "")
        return "tsv" if first.strip().startswith("n=") else "csv"
    raise InputError(f"cannot infer graph format from {path}")


def load_graph(path, format: str = "auto") -> Graph:
    path = Path(path)
    text = path.read_text()
    fmt = _resolve_format(path, format, text)
    return parse_adjacency_csv(text) if fmt == "csv" else parse_edge_tsv(text)


def graph_to_text(g: Graph, format: str = "csv") -> str:
    lines = [VERSION_LINE]
    if format == "csv":
        lines += [",".join(str(int(x)) for x in row) for row in g.adjacency]
    elif format == "tsv":
        lines.append(f"n={g.n}")
        lines += [f"{u}\t{v}" for u, v in g.edges()]
    else:
        raise InputError(f"unknown graph format {format!r}")
    return "\n".join(lines) + "\n"


def save_graph(g: Graph, path, format: str = "auto") -> None:
    path = Path(path)
    fmt = _resolve_format(path, format) if format == "auto" else format
    path.write_text(graph_to_text(g, fmt))


# -- matrices ----------------------------------------------------------------

def _matrix_text(labels, entries, extra_comments=()) -> str:
    buf = io.StringIO()
    buf.write(VERSION_LINE + "\n")
    for c in extra_comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(labels)
    for row in np.asarray(entries):
        writer.writerow([fmt_real(x) for x in row])
    return buf.getvalue()


def _parse_matrix_text(text: str) -> tuple[list[str], np.ndarray, dict[str, str]]:
    meta = {}
    for c in _comments(text):
        if "=" in c:
            key, _, value = c.partition("=")
            meta[key.strip()] = value.strip()
    rows = list(csv.reader([line for _, line in _content_lines(text)]))
    if not rows:
        raise ParseError("empty matrix file")
    labels = rows[0]
    m = len(labels)
    if len(rows) - 1 != m:
        raise ParseError(f"expected {m} matrix rows, found {len(rows) - 1}")
    entries = np.empty((m, m))
    for r, row in enumerate(rows[1:]):
        if len(row) != m:
            raise ParseError(f"expected {m} entries, found {len(row)}", row=r)
        for c, cell in enumerate(row):
            try:
                entries[r, c] = float(cell)
            except ValueError:
                raise ParseError(f"entry {cell!r} is not a number", row=r, col=c) from None
    return labels, entries, meta


def distance_matrix_to_text(d: DistanceMatrix) -> str:
    return _matrix_text(d.labels, d.entries, [f"metric={d.metric_name}"])


def save_distance_matrix(d: DistanceMatrix, path) -> None:
    Path(path).write_text(distance_matrix_to_text(d))


def load_distance_matrix(path) -> DistanceMatrix:
    labels, entries, meta = _parse_matrix_text(Path(path).read_text())
    if not np.array_equal(entries, entries.T):
        raise ParseError("distance matrix is not symmetric")
    if np.any(np.diag(entries) != 0):
        raise ParseError("distance matrix has a nonzero diagonal")
    if np.any(entries < 0):
        raise ParseError("distance matrix has negative entries")
    return DistanceMatrix(tuple(labels), entries, meta.get("metric", "unknown"))


def save_similarity_matrix(s: SimilarityMatrix, path) -> None:
    Path(path).write_text(
        _matrix_text(s.labels, s.entries, [f"sigma={fmt_real(s.sigma)}", f"metric={s.source_metric}"])
    )


def load_similarity_matrix(path) -> SimilarityMatrix:
    labels, entries, meta = _parse_matrix_text(Path(path).read_text())
    if "sigma" not in meta:
        raise ParseError("similarity file lacks a '# sigma=<value>' line")
    return SimilarityMatrix(tuple(labels), entries, float(meta["sigma"]), meta.get("metric", "unknown"))


def cluster_table_text(assignment: ClusterAssignment, graph_labels) -> str:
    if len(graph_labels) != len(assignment):
        raise InputError("one graph label per assignment entry required")
    buf = io.StringIO()
    buf.write(VERSION_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label_id", "graph_label", "cluster"])
    for i, (name, c) in enumerate(zip(graph_labels, assignment.labels)):
        writer.writerow([i, name, int(c)])
    return buf.getvalue()


def save_cluster_table(assignment: ClusterAssignment, graph_labels, path) -> None:
    Path(path).write_text(cluster_table_text(assignment, graph_labels))


def load_cluster_table(path) -> tuple[list[str], ClusterAssignment]:
    rows = list(csv.reader([line for _, line in _content_lines(Path(path).read_text())]))
    if not rows or rows[0] != ["label_id", "graph_label", "cluster"]:
        raise ParseError("cluster table must have header label_id,graph_label,cluster", row=0)
    names, labels = [], []
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != 3:
            raise ParseError("expected 3 columns", row=r)
        names.append(row[1])
        labels.append(int(row[2]))
    k = max(labels) + 1 if labels else 1
    return names, ClusterAssignment(np.array(labels), k)


# -- bundles -----------------------------------------------------------------

def save_bundle(bundle: ScenarioBundle, directory) -> Path:
    """Write one adjacency CSV per graph plus a manifest of labels and ground truth."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [VERSION_LINE, "# blocks=" + ",".join(str(b) for b in bundle.block_sizes), "label\tground_truth\tfile"]
    for label, truth, g in zip(bundle.labels, bundle.ground_truth, bundle.graphs):
        name = f"{label}.csv"
        save_graph(g, directory / name, "csv")
        lines.append(f"{label}\t{truth}\t{name}")
    (directory / MANIFEST).write_text("\n".join(lines) + "\n")
    return directory


def load_bundle(directory) -> ScenarioBundle:
    directory = Path(directory)
    manifest = directory / MANIFEST
    if not manifest.exists():
        raise InputError(f"{directory} has no {MANIFEST}")
    text = manifest.read_text()
    meta = dict(c.split("=", 1) for c in _comments(text) if "=" in c)
    blocks = tuple(int(x) for x in meta.get("blocks", "10,10").split(","))
    lines = _content_lines(text)
    if not lines or lines[0][1].split("\t") != ["label", "ground_truth", "file"]:
        raise ParseError("manifest header must be 'label<TAB>ground_truth<TAB>file'", row=0)
    labels, truth, graphs = [], [], []
    for lineno, line in lines[1:]:
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError("expected 3 tab-separated fields", row=lineno)
        labels.append(parts[0])
        truth.append(int(parts[1]))
        graphs.append(load_graph(directory / parts[2]))
    return ScenarioBundle(graphs, labels, truth, blocks)
