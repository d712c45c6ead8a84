import os

import pytest

import g2e
from graph_epd.io import read_diagram, read_graph

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def pipeline_file(tmp_path, text):
    path = tmp_path / "PIPELINE"
    path.write_text(text)
    return str(path)


def exit_code(argv):
    with pytest.raises(SystemExit) as info:
        g2e.main(argv)
    return info.value.code


class TestParse:

    @pytest.mark.parametrize("text, value", [
        ("True", True), ("false", False), ("12", 12), ("0.4", 0.4), ("degree", "degree"),
        ("[1,2.5,hks]", [1, 2.5, "hks"]), ("[]", []),
    ])
    def test_values(self, text, value):
        assert g2e.parse(text) == value

    def test_flag_value(self):
        assert g2e.flag_value(["degree", "hks:10"]) == "degree,hks:10"
        assert g2e.flag_value(0.5) == "0.5"


class TestConfigFile:

    def test_example_pipeline(self):
        configs = []
        g2e.read_config_file(os.path.join(ROOT, "PIPELINES", "PIPELINE_EXAMPLE"), configs, False)
        functions = [cfg["function"] for cfg in configs]
        assert functions[:4] == ["GLOBAL_PARAMETERS", "GEN-SBM", "VICINITY", "COMPUTE"]
        assert set(functions) - {"GLOBAL_PARAMETERS"} <= set(g2e.BLOCKS)
        assert configs[1]["vertices"] == "100"

    def test_inline_comments(self, tmp_path):
        configs = []
        path = pipeline_file(tmp_path, "COMPUTE:   # exact diagrams\n{\n  inputFolder: a  # here\n}\n")
        g2e.read_config_file(path, configs, False)
        assert configs[0]["inputFolder"] == "a"

    @pytest.mark.parametrize("text", [
        "SEGMENTATION:\n{\n inputFolder: a\n}\n",
        "COMPUTE:\n{\n inputFolder: a\n",
        "COMPUTE:\n{\n inputFolder a\n}\n",
    ])
    def test_bad_files_exit_with_usage_code(self, tmp_path, text):
        with pytest.raises(SystemExit) as info:
            g2e.read_config_file(pipeline_file(tmp_path, text), [], False)
        assert info.value.code == 1


class TestMain:

    def test_missing_config(self):
        assert exit_code([]) == 1

    def test_config_not_found(self, tmp_path):
        assert exit_code(["-c", str(tmp_path / "absent")]) == 1

    def test_unknown_subcommand(self):
        assert exit_code(["segment"]) == 1

    def test_help(self, capsys):
        assert exit_code(["-h"]) is None
        assert "compute: src/epd_multiprocessing.py" in capsys.readouterr().out

    def test_subcommand_runs_in_process(self, tmp_path):
        path = str(tmp_path / "g.txt")
        g2e.main(["gen-sbm", "-o", path, "-n", "8", "-k", "1", "--p_intra", "1", "--p_inter", "0"])
        assert read_graph(path).num_edges == 28

    def test_subcommand_exit_code(self, tmp_path):
        assert exit_code(["compute", "-i", str(tmp_path / "absent.txt")]) == 2

    def test_input_placeholder_needs_option(self, tmp_path):
        path = pipeline_file(tmp_path, "VICINITY:\n{\n inputFolder: .\n outputFolder: out\n}\n")
        assert exit_code(["-c", path]) == 1

    def test_previous_output_needs_a_previous_block(self, tmp_path):
        path = pipeline_file(tmp_path, "COMPUTE:\n{\n inputFolder: PREVIOUS_BLOCK_OUTPUT_FOLDER\n}\n")
        assert exit_code(["-c", path]) == 1

    def test_infer_needs_a_model(self, tmp_path):
        path = pipeline_file(tmp_path, f"INFER:\n{{\n inputFolder: {tmp_path}\n}}\n")
        assert exit_code(["-c", path]) == 1

    def test_blocks_chain_their_folders(self, tmp_path):
        graphs, vicinities = tmp_path / "sbm", tmp_path / "vicinities"
        path = pipeline_file(tmp_path, (
            "GLOBAL_PARAMETERS:\n{\n seed: 5\n}\n"
            f"GEN-SBM:\n{{\n outputFolder: {graphs}\n vertices: 12\n clusters: 2\n graphs: 2\n}}\n"
            f"VICINITY:\n{{\n inputFolder: PREVIOUS_BLOCK_OUTPUT_FOLDER\n outputFolder: {vicinities}\n}}\n"
            "COMPUTE:\n{\n inputFolder: PREVIOUS_BLOCK_OUTPUT_FOLDER\n engine: reduction\n}\n"
        ))
        g2e.main(["-c", path])
        assert sorted(os.listdir(graphs)) == ["sbm_0.txt", "sbm_1.txt"]
        diagram = read_diagram(str(vicinities / "sbm_1" / "vicinity_11_epd.txt"))
        graph = read_graph(str(vicinities / "sbm_1" / "vicinity_11.txt"))
        assert len(diagram) == graph.num_edges

    def test_failing_block_stops_the_pipeline(self, tmp_path):
        path = pipeline_file(tmp_path, (
            f"COMPUTE:\n{{\n inputFolder: {tmp_path / 'absent'}\n}}\n"
            f"GEN-SBM:\n{{\n outputFolder: {tmp_path / 'sbm'}\n}}\n"
        ))
        assert exit_code(["-c", path]) != 0
        assert not os.path.exists(tmp_path / "sbm")
