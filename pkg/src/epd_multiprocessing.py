#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _COMPUTE:

The **COMPUTE** module computes the exact extended persistence diagram (EPD) of filtered graphs. For every graph and every filter it writes a diagram file (0D points of the ascending filtration and extended 1D points, zero-persistence points included) and an edge-pairing sidecar listing, for every edge, whether it is negative (kills a component) or positive (creates a loop), its persistence pair and its partner.

Two engines give identical diagrams:

- ``unionfind``: the decomposed Union-Find engine, one union-find sweep per vertex with its upper edges split into clones (parallel over vertices with ``multiprocessing`` when a single graph is processed).
- ``reduction``: the standard boundary-matrix reduction of the extended filtration.

Filters
-------

``degree``, ``hks:<t>`` (heat kernel signature at time t), ``ricci-dist[:<alpha>]`` (shortest-path distance from the centers with edge lengths derived from the Ollivier-Ricci curvature), ``clustering``, ``centrality``, and ``standard`` = ``hks:10,hks:0.1,ricci-dist:0.5,degree``. Several filters are given as a comma-separated list.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: A graph file, or a folder of graph files (subfolders included).
- ``outputFolder``: Folder for the diagrams (default: next to the graphs).
- ``filter``: Filter spec or comma-separated list (default: degree).
- ``engine``: ``unionfind`` or ``reduction`` (default: unionfind).
- ``centers``: Centers of ``ricci-dist`` as a list of vertex ids (default: [0], the vicinity center).
- ``drop_zero``: Do not write zero-persistence points (default: False).
- ``multiprocessing``: Number of CPU cores to use.

With one filter the diagram of ``<stem>.txt`` is ``<stem>_epd.txt``; with several it is ``<stem>_<tag>_epd.txt`` where the tag is the filter spec with ``:`` replaced by ``-`` (e.g. ``vicinity_3_hks-10_epd.txt``). Sidecars use ``_pairs`` in place of ``_epd``.

Example Usage
-------------

.. code-block:: bash

    COMPUTE:
    {
        inputFolder: PREVIOUS_BLOCK_OUTPUT_FOLDER
        outputFolder: /path/to/diagrams
        filter: standard
        engine: unionfind
        multiprocessing: 8
        timer: True
    }

In this example:

- **inputFolder**: Takes the vicinity graphs of the previous block.
- **filter**: Computes four diagrams per graph (two heat kernel signatures, Ricci distance and degree).
- **engine**: Uses the decomposed Union-Find engine.
- **multiprocessing**: Eight graphs are processed simultaneously.
- **timer**: Prints the time spent in the block.

"""

# Compute exact extended persistence diagrams of filtered graphs.
#
# Usage:
#     epd_multiprocessing.py -i <graph file or folder> -f <filter spec> -e <engine> -o <out>
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               Graph file, or folder of graph files (searched recursively)
#     -o, --out <path>                 Diagram file (one graph, one filter) or output folder
#     -f, --filter <spec>              Filter spec or comma-separated list (default: degree)
#         --values <file>              Explicit vertex values 'v value' (one graph only, replaces -f)
#     -e, --engine <engine>            unionfind or reduction (default: unionfind)
#         --centers <ids>              Comma-separated centers of ricci-dist (default: 0)
#         --drop_zero                  Do not write zero-persistence points
#         --seed <seed>                Accepted for uniformity, computation is deterministic
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     epd_multiprocessing.py -h

import sys, getopt, os
from datetime import datetime
from graph_epd.engines import ENGINES, compute_epd, new_stats, stats_count
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.filtration import build_filtration, expand_filter_specs, filter_values
from graph_epd.io import (RunConfig, read_graph, read_values, write_diagram, write_pairings,
                          list_graph_files, artifact_stem)
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base, format_list_multiline

def main(argv):
    inpath = ''
    outpath = ''
    filters = 'degree'
    values_path = ''
    engine = 'unionfind'
    centers = [0]
    drop_zero = False
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:o:f:e:j:",["log=","new_log","verbose","help","input=","out=","filter=","values=","engine=","centers=","drop_zero","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (epd_multiprocessing.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tepd_multiprocessing.py\n")
                print("SYNOPSIS")
                print("\tepd_multiprocessing.py [-h|--help][-v|--verbose][-i|--input <path>][-o|--out <path>][-f|--filter <spec>][--values <file>][-e|--engine <engine>][--centers <ids>][--drop_zero][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tCompute the exact extended persistence diagram and the edge pairing of filtered graphs\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: graph file, or folder of graph files (subfolders included)")
                print("\t -o, --out: diagram file when one graph and one filter are given, output folder otherwise (default: next to the input)")
                print("\t -f, --filter: degree, hks:<t>, ricci-dist[:<alpha>], clustering, centrality, standard, or a comma-separated list (default: degree)")
                print("\t --values: file with explicit vertex values 'v value' (single graph, replaces --filter)")
                print(f"\t -e, --engine: {' or '.join(ENGINES)} (default: unionfind)")
                print("\t --centers: comma-separated centers of ricci-dist (default: 0, the vicinity center)")
                print("\t --drop_zero: do not write zero-persistence points")
                print("\t --seed: accepted, not used")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt in ("-f", "--filter"):
                filters = arg
            elif opt == "--values":
                values_path = arg
            elif opt in ("-e", "--engine"):
                engine = arg
            elif opt == "--centers":
                centers = [int(c) for c in arg.strip("[]").split(',') if c.strip()]
            elif opt == "--drop_zero":
                drop_zero = True
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
        if inpath == '':
            raise UsageError("no input specified (use -i)")
        if engine not in ENGINES:
            raise UsageError(f"unknown engine '{engine}' (expected one of: {', '.join(ENGINES)})")
        specs = [None] if values_path else expand_filter_specs(filters)
        folder_mode = os.path.isdir(inpath)
        if values_path and folder_mode:
            raise UsageError("--values needs a single graph file")
        if folder_mode:
            graphs = list_graph_files(inpath, recursive=True)
            if not graphs:
                warning(f"no graph file found in {inpath}")
            root_out = outpath or inpath
            jobs = [(path, os.path.join(root_out, os.path.dirname(os.path.relpath(path, inpath)))) for path in graphs]
        else:
            graphs = [inpath]
            single_file = len(specs) == 1 and outpath.endswith(".txt")
            jobs = [(inpath, outpath if single_file else (outpath or os.path.dirname(inpath) or '.'))]
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Graphs: {len(graphs)}\n"
            f"Output: {outpath}\n"
            f"Filters: {format_list_multiline([str(s) for s in specs] if not values_path else ['values'], 4)}\n"
            f"Values file: {values_path}\n"
            f"Engine: {engine}\n"
            f"Ricci centers: {centers}\n"
            f"Drop zero persistence: {drop_zero}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"COMPUTE {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    # one graph: the workers split the per-vertex steps, several graphs: the workers split the graphs
    inner_jobs = n_jobs if len(jobs) == 1 else 1
    try:
        results = run_pool(compute, [(path, target, specs, values_path, engine, centers, drop_zero, inner_jobs)
                                     for path, target in jobs], n_jobs if len(jobs) > 1 else 1, "EPD", verbose)
    except GraphEpdError as e:
        die(e)

    if verbose:
        for written in results:
            for diagram_path, n0, n1, ops in written:
                hprint(f"{base(diagram_path)}: {n0} 0D and {n1} 1D points, {ops} operations", os.path.abspath(diagram_path))

def output_paths(path, target, spec, n_specs):
    """(diagram, sidecar) paths of one graph and one filter."""
    if target.endswith(".txt"):
        stem = os.path.splitext(target)[0]
        if stem.endswith("_epd"):
            stem = stem[:-len("_epd")]
        return target, stem + "_pairs.txt"
    stem = artifact_stem(path)
    if n_specs > 1:
        stem = f"{stem}_{spec.tag}"
    return os.path.join(target, f"{stem}_epd.txt"), os.path.join(target, f"{stem}_pairs.txt")

def compute(path, target, specs, values_path, engine, centers, drop_zero, n_jobs):
    g = read_graph(path)
    written = []
    for spec in specs:
        if spec is None:
            values = read_values(values_path, g.num_vertices)
            config = RunConfig(source=base(path), filter="values", values=base(values_path))
        else:
            values = filter_values(g, spec, centers)
            config = RunConfig(source=base(path), filter=str(spec))
            if spec.name == "ricci-dist":
                config["centers"] = centers
        fg = build_filtration(g, values)
        stats = new_stats(engine)
        diagram, pairing = compute_epd(fg, engine, n_jobs, stats)

        diagram_path, pairs_path = output_paths(path, target, spec, len(specs))
        if os.path.dirname(diagram_path):
            os.makedirs(os.path.dirname(diagram_path), exist_ok=True)
        write_diagram(diagram_path, diagram, config, drop_zero)
        sidecar = RunConfig(config)
        sidecar["engine"] = engine
        write_pairings(pairs_path, pairing, sidecar)
        written.append((diagram_path, len(diagram.dim0), len(diagram.dim1), stats_count(stats)))
    return written

if __name__ == "__main__":
    main(sys.argv[1:])
