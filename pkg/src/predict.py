#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _INFER:

The INFER module predicts extended persistence diagrams with a PDGNN model previously trained with the TRAIN module. The model predicts one (birth, death) point per edge of the filtered graph; points with death < birth are extended 1D points, the others 0D points. Points whose persistence |death - birth| is below ``epsilon`` are dropped (with the default 0 the diagram has exactly one point per edge).

The filter must be the one the model was trained with.

The INFER module can be used with the following options:

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: Specify a graph file or a folder of graph files (subfolders included).
- ``outputFolder``: Specify the path to the output folder (default: next to the graphs).
- ``modelFolder``: Specify the folder of the model file.
- ``model_filename``: Specify the name of the model file (default: model.pdgnn).
- ``filter``: Filter spec or comma-separated list (default: degree).
- ``epsilon``: Persistence threshold below which predicted points are dropped (default: 0).

Here is an example of how to use the INFER module:

.. code-block:: bash

    INFER
    {
        inputFolder: /path/to/vicinities
        outputFolder: /path/to/predictions
        modelFolder: /path/to/model
        model_filename: model.pdgnn
        filter: degree
        log: /path/to/logs/infer.log
    }

In this example:

- **inputFolder**: Specifies the folder containing the graphs.
- **modelFolder** and **model_filename**: Specify the trained model.
- **outputFolder**: ``<name>_pred.txt`` is written for every graph ``<name>.txt``; the diagrams can be compared with the exact ones by the DIST module.
- **log**: Specifies a path for the log file.

"""

# Predict extended persistence diagrams with a trained PDGNN model.
#
# Usage:
#     predict.py -m <model file> -i <graph file or folder> -o <out>
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -m, --model <file>               Model file written by train.py
#     -i, --input <path>               Graph file, or folder of graph files (searched recursively)
#     -o, --out <path>                 Diagram file (one graph, one filter) or output folder
#     -f, --filter <spec>              Filter spec or comma-separated list (default: degree)
#         --centers <ids>              Centers of ricci-dist (default: 0)
#         --epsilon <value>            Drop predicted points with persistence below epsilon (default: 0)
#         --seed <seed>                Accepted for uniformity, inference is deterministic
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     predict.py -h

import sys, getopt, os
import functools
import torch
from datetime import datetime
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.filtration import build_filtration, expand_filter_specs, filter_values
from graph_epd.io import RunConfig, read_graph, write_diagram, list_graph_files, artifact_stem
from graph_epd.pdgnn import load_model, predict_diagram, describe
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base

def main(argv):
    model_path = ''
    inpath = ''
    outpath = ''
    filters = 'degree'
    centers = [0]
    epsilon = 0.0
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "vhm:i:o:f:j:",["log=","new_log","verbose","help","model=","input=","out=","filter=","centers=","epsilon=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (predict.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tpredict.py\n")
                print("SYNOPSIS")
                print("\tpredict.py [-h|--help][-v|--verbose][--log <logFile>][-m|--model <file>][-i|--input <path>][-o|--out <path>][-f|--filter <spec>][--epsilon <value>][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tPredict extended persistence diagrams with a trained PDGNN model\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -m, --model: model file written by train.py")
                print("\t -i, --input: graph file, or folder of graph files (subfolders included)")
                print("\t -o, --out: diagram file when one graph and one filter are given, output folder otherwise (default: next to the input)")
                print("\t -f, --filter: filter spec or comma-separated list, the one the model was trained with (default: degree)")
                print("\t --centers: comma-separated centers of ricci-dist (default: 0)")
                print("\t --epsilon: drop predicted points with |death - birth| < epsilon (default: 0, one point per edge)")
                print("\t --seed: accepted, not used")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: redirect stdout to a log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-m", "--model"):
                model_path = arg
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt in ("-f", "--filter"):
                filters = arg
            elif opt == "--centers":
                centers = [int(c) for c in arg.strip("[]").split(',') if c.strip()]
            elif opt == "--epsilon":
                epsilon = float(arg)
            elif opt == "--seed":
                int(arg)
            elif opt in ("-j", "--threads"):
                n_jobs = int(arg)
            elif opt in ("-v", "--verbose"):
                verbose = True
            elif opt == "--log":
                log = arg
            elif opt == "--new_log":
                new_log = True
    except ValueError as e:
        error(f"invalid option value ({e})")
        sys.exit(EXIT_USAGE)

    redirect_log(log, new_log)
    configure_logging(verbose)

    try:
        if model_path == '':
            raise UsageError("no model specified (use -m)")
        if not os.path.isfile(model_path):
            raise UsageError(f"model file {model_path} not found")
        if inpath == '':
            raise UsageError("no input specified (use -i)")
        if epsilon < 0:
            raise UsageError(f"epsilon must be nonnegative, got {epsilon}")
        specs = expand_filter_specs(filters)
        #IMPORT MODEL
        model = load_model(model_path)
        if os.path.isdir(inpath):
            graphs = list_graph_files(inpath, recursive=True)
            if not graphs:
                warning(f"no graph file found in {inpath}")
            jobs = [(path, os.path.join(outpath or inpath, os.path.dirname(os.path.relpath(path, inpath))))
                    for path in graphs]
        else:
            graphs = [inpath]
            single_file = len(specs) == 1 and outpath.endswith(".txt")
            jobs = [(inpath, outpath if single_file else (outpath or os.path.dirname(inpath) or '.'))]
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Model: {model_path}\n"
            f"Architecture: {model.config.variant} ({model.config.layers} x {model.config.hidden}, {model.config.head_mode} head)\n"
            f"Input: {inpath}\n"
            f"Graphs: {len(graphs)}\n"
            f"Output: {outpath}\n"
            f"Filters: {', '.join(str(s) for s in specs)}\n"
            f"Ricci centers: {centers}\n"
            f"Epsilon: {epsilon}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"INFER {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        print(f"Model: {describe(model)}", flush=True)

    #MAKE PREDICTION
    torch.set_num_threads(max(1, n_jobs) if len(jobs) == 1 else 1)
    try:
        results = run_pool(infer, [(path, target, model_path, specs, centers, epsilon) for path, target in jobs],
                           n_jobs if len(jobs) > 1 else 1, "Inference", verbose)
    except GraphEpdError as e:
        die(e)

    #SAVE PREDICTION
    if verbose:
        for written in results:
            for diagram_path, n0, n1 in written:
                hprint(f"{base(diagram_path)}: {n0} 0D and {n1} 1D points", os.path.abspath(diagram_path))

@functools.lru_cache(maxsize=4)
def cached_model(model_path):
    """One load per worker process."""
    return load_model(model_path)

def output_path(path, target, spec, n_specs):
    if target.endswith(".txt"):
        return target
    stem = artifact_stem(path)
    if n_specs > 1:
        stem = f"{stem}_{spec.tag}"
    return os.path.join(target, f"{stem}_pred.txt")

def infer(path, target, model_path, specs, centers, epsilon):
    model = cached_model(model_path)
    g = read_graph(path)
    written = []
    for spec in specs:
        fg = build_filtration(g, filter_values(g, spec, centers))
        diagram = predict_diagram(model, fg, epsilon)
        config = RunConfig(source=base(path), filter=str(spec), model=base(model_path), epsilon=epsilon)
        if spec.name == "ricci-dist":
            config["centers"] = centers
        diagram_path = output_path(path, target, spec, len(specs))
        if os.path.dirname(diagram_path):
            os.makedirs(os.path.dirname(diagram_path), exist_ok=True)
        write_diagram(diagram_path, diagram, run_config=config)
        written.append((diagram_path, len(diagram.dim0), len(diagram.dim1)))
    return written

if __name__ == "__main__":
    main(sys.argv[1:])
