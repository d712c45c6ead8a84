import os

import numpy as np
import pandas as pd
import pytest

from conftest import random_graph
from graph_epd.diagrams import persistence_image
from graph_epd.engines import compute_epd
from graph_epd.errors import DataFormatError, UsageError
from graph_epd.filtration import build_filtration
from graph_epd.io import (RunConfig, artifact_stem, format_value, list_graph_files, match_artifacts,
                          read_diagram, read_graph, read_header, read_history, read_image, read_table,
                          read_values, write_diagram, write_graph, write_history, write_image,
                          write_pairings, write_table, write_values)


def write_text(path, text):
    path.write_text(text)
    return str(path)


class TestGraphFiles:

    def test_read_with_comments(self, tmp_path):
        path = write_text(tmp_path / "g.txt", "# a 4-cycle\n4 4\n0 1\n1 2 # inline\n\n2 3\n3 0\n")
        g = read_graph(path)
        assert g.num_vertices == 4
        assert g.edges.tolist() == [[0, 1], [0, 3], [1, 2], [2, 3]]

    def test_written_file_reads_back(self, tmp_path, sbm_small):
        path = str(tmp_path / "sbm.txt")
        write_graph(path, sbm_small, RunConfig(num_vertices=20, seed=3))
        assert read_graph(path) == sbm_small
        header = read_header(path)
        assert header["seed"] == "3"

    @pytest.mark.parametrize("text, line", [
        ("3 2\n0 1\n1 x\n", 3),
        ("3 1\n0 1\n1 2\n", 3),
        ("3 1\n0 7\n", 2),
        ("3\n", 1),
    ])
    def test_errors_name_the_line(self, tmp_path, text, line):
        path = write_text(tmp_path / "bad.txt", text)
        with pytest.raises(DataFormatError) as info:
            read_graph(path)
        assert info.value.line == line
        assert str(info.value).startswith(f"{path}:{line}:")

    def test_missing_edges(self, tmp_path):
        path = write_text(tmp_path / "short.txt", "3 2\n0 1\n")
        with pytest.raises(DataFormatError, match="expected 2 edges, found 1"):
            read_graph(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            read_graph(str(tmp_path / "absent.txt"))


class TestValueFiles:

    def test_read_back(self, tmp_path):
        path = str(tmp_path / "v_values.txt")
        write_values(path, [0.1, 2.0, -3.5])
        assert read_values(path, 3).tolist() == [0.1, 2.0, -3.5]

    def test_missing_vertex(self, tmp_path):
        path = write_text(tmp_path / "v.txt", "0 1.0\n2 3.0\n")
        with pytest.raises(DataFormatError, match="vertex 1"):
            read_values(path, 3)

    def test_duplicate_vertex(self, tmp_path):
        path = write_text(tmp_path / "v.txt", "0 1.0\n0 3.0\n")
        with pytest.raises(DataFormatError) as info:
            read_values(path, 1)
        assert info.value.line == 2


class TestDiagramFiles:

    def test_engines_write_identical_files(self, tmp_path, cycle4_fg):
        texts = []
        for engine in ("unionfind", "reduction"):
            diagram, _ = compute_epd(cycle4_fg, engine)
            path = str(tmp_path / f"{engine}_epd.txt")
            write_diagram(path, diagram, RunConfig(source="cycle.txt", filter="degree"))
            texts.append(open(path).read())
        assert texts[0] == texts[1]
        assert "dim1 1\n4.0 1.0 e3 e1\n" in texts[0]

    def test_read_back(self, tmp_path, example_fg):
        diagram, _ = compute_epd(example_fg)
        path = str(tmp_path / "example_epd.txt")
        write_diagram(path, diagram)
        again = read_diagram(path)
        assert again.points().tolist() == diagram.sorted().points().tolist()
        assert [p.creator for p in again.dim1] == [p.creator for p in diagram.sorted().dim1]

    def test_drop_zero_persistence(self, tmp_path, cycle4_fg):
        diagram, _ = compute_epd(cycle4_fg)
        path = str(tmp_path / "c_epd.txt")
        write_diagram(path, diagram, drop_zero=True)
        again = read_diagram(path)
        assert len(again.dim0) == 0
        assert not again.include_zero_persistence

    def test_count_mismatch(self, tmp_path):
        path = write_text(tmp_path / "d_epd.txt", "dim0 2\n0.0 1.0\ndim1 0\n")
        with pytest.raises(DataFormatError, match="announces 2"):
            read_diagram(path)

    def test_bad_simplex(self, tmp_path):
        path = write_text(tmp_path / "d_epd.txt", "dim0 1\n0.0 1.0 q1 e0\n")
        with pytest.raises(DataFormatError) as info:
            read_diagram(path)
        assert info.value.line == 2

    @pytest.mark.parametrize("engine", ["unionfind", "reduction"])
    def test_labels_agree_with_sidecar(self, tmp_path, engine):
        rng = np.random.default_rng(21)
        for trial in range(40):
            g = random_graph(rng, max_vertices=8)
            fg = build_filtration(g, rng.integers(0, 3, g.num_vertices).astype(float))
            diagram, pairing = compute_epd(fg, engine)
            diagram_path, pairs_path = str(tmp_path / f"t{trial}_epd.txt"), str(tmp_path / f"t{trial}_pairs.txt")
            write_diagram(diagram_path, diagram)
            write_pairings(pairs_path, pairing)
            sidecar = {}
            for line in open(pairs_path):
                if not line.startswith("#"):
                    edge, role, birth, death, partner = line.split()
                    sidecar[edge] = (role, float(birth), float(death), partner)
            again = read_diagram(diagram_path)
            for p in again.dim1:
                assert sidecar[str(p.creator)] == ("positive", p.birth, p.death, str(p.destroyer))
            for p in again.dim0:
                assert sidecar[str(p.destroyer)] == ("negative", p.birth, p.death, str(p.creator))

    def test_engines_agree_with_ties(self, tmp_path):
        rng = np.random.default_rng(5)
        for trial in range(40):
            g = random_graph(rng, max_vertices=8)
            fg = build_filtration(g, rng.integers(0, 3, g.num_vertices).astype(float))
            texts = []
            for engine in ("unionfind", "reduction"):
                path = str(tmp_path / f"{engine}_{trial}_epd.txt")
                write_diagram(path, compute_epd(fg, engine)[0])
                texts.append(open(path).read())
            assert texts[0] == texts[1]

    def test_pairings(self, tmp_path, cycle4_fg):
        _, pairing = compute_epd(cycle4_fg)
        path = str(tmp_path / "c_pairs.txt")
        write_pairings(path, pairing, RunConfig(engine="unionfind"))
        lines = [l for l in open(path) if not l.startswith("#")]
        assert len(lines) == 4
        assert lines[3].split()[:2] == ["e3", "positive"]
        assert read_header(path)["engine"] == "unionfind"


def test_image_file(tmp_path):
    img = persistence_image([(0.0, 1.0), (2.0, 0.5)], 5)
    path = str(tmp_path / "d_img.txt")
    write_image(path, img)
    again = read_image(path)
    assert np.array_equal(again.values, img.values)
    assert again.bounds == img.bounds
    assert again.sigma == img.sigma


def test_history_and_tables(tmp_path):
    history = pd.DataFrame({"epoch": [0, 1], "train_loss": [2.0, 1.0], "test_w2": [np.nan, 0.5],
                            "test_pie": [np.nan, 0.1]})
    path = str(tmp_path / "model_history.txt")
    write_history(path, history, RunConfig(seed=0))
    again = read_history(path)
    assert again["train_loss"].tolist() == [2.0, 1.0]
    assert np.isnan(again["test_w2"][0])

    table = pd.DataFrame({"name": ["a", "b"], "w2": [0.1, 0.2]})
    csv = str(tmp_path / "w2.csv")
    write_table(csv, table, RunConfig(norm="2"), kind="w2")
    assert read_table(csv, kind="w2").equals(table)
    assert read_header(csv)["norm"] == "2"


def test_excel_table(tmp_path):
    table = pd.DataFrame({"engine": ["unionfind"], "median_s": [0.5]})
    path = str(tmp_path / "bench.xlsx")
    write_table(path, table, RunConfig(seed=1), kind="bench")
    assert read_table(path, kind="bench").equals(table)
    assert str(pd.read_excel(path, sheet_name="RunConfig", index_col=0)["value"]["seed"]) == "1"


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value([1, 2.5]) == "1,2.5"
    assert format_value(None) == ""


class TestFolders:

    def test_artifact_stem(self):
        assert artifact_stem("vicinity_3_pred_img.txt") == "vicinity_3"
        assert artifact_stem("/a/b/g_hks-10_epd.txt") == "g_hks-10"

    def test_graph_listing_skips_artifacts(self, tmp_path):
        for name in ["g_10.txt", "g_2.txt", "g_2_epd.txt", "g_2_img.txt", "notes.csv"]:
            (tmp_path / name).write_text("")
        sub = tmp_path / "sub"
        sub.mkdir()
        (sub / "g_1.txt").write_text("")
        assert [os.path.basename(p) for p in list_graph_files(str(tmp_path))] == ["g_2.txt", "g_10.txt"]
        assert len(list_graph_files(str(tmp_path), recursive=True)) == 3

    def test_match_artifacts(self, tmp_path):
        a, b = tmp_path / "pred", tmp_path / "exact"
        a.mkdir()
        b.mkdir()
        for name in ["g_1_pred.txt", "g_2_pred.txt", "g_3_pred.txt"]:
            (a / name).write_text("")
        for name in ["g_1_epd.txt", "g_2_epd.txt"]:
            (b / name).write_text("")
        pairs, unmatched = match_artifacts(str(a), str(b), ["_pred", "_epd"])
        assert [key for key, _, _ in pairs] == ["g_1", "g_2"]
        assert pairs[0][2].endswith("g_1_epd.txt")
        assert unmatched == 1

    def test_match_nothing(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        with pytest.raises(UsageError):
            match_artifacts(str(tmp_path / "a"), str(tmp_path / "b"), ["_epd"])
