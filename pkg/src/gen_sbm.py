#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _GEN-SBM:

The **GEN-SBM** module samples synthetic graphs from a stochastic block model (SBM): vertices are split into contiguous clusters whose sizes differ by at most one, every intra-cluster pair is joined with probability ``p_intra`` and every inter-cluster pair with probability ``p_inter``. Sampling is reproducible: the generator is numpy's PCG64 seeded with ``seed`` (graph ``i`` of a batch uses ``seed + i``).

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``outputFolder``: Folder where the graphs ``sbm_<i>.txt`` are written.
- ``vertices``: Number of vertices (default: 250).
- ``clusters``: Number of clusters (default: 5).
- ``p_intra``: Intra-cluster edge probability (default: 0.4).
- ``p_inter``: Inter-cluster edge probability (default: 0.1).
- ``graphs``: Number of graphs to sample (default: 1).
- ``largest``: Keep only the largest connected subgraph of every sample (default: False).
- ``seed``: Seed of the first graph (default: 0).
- ``multiprocessing``: Number of CPU cores to use.

Example Usage
-------------

.. code-block:: bash

    GEN-SBM:
    {
        outputFolder: /path/to/sbm
        vertices: 40
        clusters: 2
        graphs: 20
        seed: 7
        log: /path/to/logs/gen_sbm.log
    }

In this example:

- **outputFolder**: Twenty graphs ``sbm_0.txt`` ... ``sbm_19.txt`` are written to ``/path/to/sbm``.
- **vertices** and **clusters**: Every graph has 40 vertices split into two clusters of 20.
- **seed**: Graph ``i`` is sampled with seed ``7 + i``.
- **log**: Specifies a path for the log file.

"""

# Sample stochastic block model graphs in the edge-list format.
#
# Usage:
#     gen_sbm.py -o <output file or folder> [options]
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -o, --out <path>                 Output graph file (one graph) or folder (sbm_<i>.txt)
#     -n, --vertices <count>           Number of vertices (default: 250)
#     -k, --clusters <count>           Number of clusters (default: 5)
#         --p_intra <probability>      Intra-cluster edge probability (default: 0.4)
#         --p_inter <probability>      Inter-cluster edge probability (default: 0.1)
#         --graphs <count>             Number of graphs (default: 1)
#         --largest                    Keep the largest connected subgraph only
#         --seed <seed>                Seed of the first graph (default: 0)
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     gen_sbm.py -h

import sys, getopt, os
from datetime import datetime
from graph_epd.errors import GraphEpdError, EXIT_USAGE
from graph_epd.graph import SbmConfig, sbm_generate, sbm_expected_edges, largest_connected_subgraph
from graph_epd.io import RunConfig, write_graph
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool

def main(argv):
    outpath = ''
    vertices = 250
    clusters = 5
    p_intra = 0.4
    p_inter = 0.1
    graphs = 1
    largest = False
    seed = 0
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvo:n:k:j:",["log=","new_log","verbose","help","out=","vertices=","clusters=","p_intra=","p_inter=","graphs=","largest","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (gen_sbm.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tgen_sbm.py\n")
                print("SYNOPSIS")
                print("\tgen_sbm.py [-h|--help][-v|--verbose][-o|--out <path>][-n|--vertices <count>][-k|--clusters <count>][--p_intra <p>][--p_inter <p>][--graphs <count>][--largest][--seed <seed>][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tSample stochastic block model graphs (contiguous clusters, PCG64 generator)\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -o, --out: output graph file, or output folder when --graphs > 1")
                print("\t -n, --vertices: number of vertices (default: 250)")
                print("\t -k, --clusters: number of clusters (default: 5)")
                print("\t --p_intra: intra-cluster edge probability (default: 0.4)")
                print("\t --p_inter: inter-cluster edge probability (default: 0.1)")
                print("\t --graphs: number of graphs to sample, graph i uses seed+i (default: 1)")
                print("\t --largest: keep only the largest connected subgraph")
                print("\t --seed: seed of the first graph (default: 0)")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt in ("-n", "--vertices"):
                vertices = int(arg)
            elif opt in ("-k", "--clusters"):
                clusters = int(arg)
            elif opt == "--p_intra":
                p_intra = float(arg)
            elif opt == "--p_inter":
                p_inter = float(arg)
            elif opt == "--graphs":
                graphs = int(arg)
            elif opt == "--largest":
                largest = True
            elif opt == "--seed":
                seed = int(arg)
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

    if outpath == '':
        error("no output specified (use -o)")
        sys.exit(EXIT_USAGE)
    if graphs < 1:
        error(f"--graphs must be at least 1, got {graphs}")
        sys.exit(EXIT_USAGE)

    if verbose:
        msg = (
            f"Output: {outpath}\n"
            f"Vertices: {vertices}\n"
            f"Clusters: {clusters}\n"
            f"p_intra: {p_intra}\n"
            f"p_inter: {p_inter}\n"
            f"Graphs: {graphs}\n"
            f"Largest connected subgraph: {largest}\n"
            f"Seed: {seed}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"GEN-SBM {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        cfg = SbmConfig(vertices, clusters, p_intra, p_inter, seed)
        if graphs == 1 and outpath.endswith(".txt"):
            targets = [(outpath, seed)]
            if os.path.dirname(outpath):
                os.makedirs(os.path.dirname(outpath), exist_ok=True)
        else:
            os.makedirs(outpath, exist_ok=True)
            targets = [(os.path.join(outpath, f"sbm_{i}.txt"), seed + i) for i in range(graphs)]
        if verbose:
            mean, std = sbm_expected_edges(cfg)
            print(f"Expected edges per graph: {mean:.1f} (std {std:.1f})", flush=True)
        results = run_pool(sample, [(path, vertices, clusters, p_intra, p_inter, s, largest) for path, s in targets],
                           n_jobs, "SBM sampling", verbose)
    except GraphEpdError as e:
        die(e)

    for path, num_vertices, num_edges in results:
        if num_edges == 0:
            warning(f"{os.path.basename(path)} has no edge")
        if verbose:
            hprint(f"{os.path.basename(path)}: {num_vertices} vertices, {num_edges} edges", path)

def sample(path, vertices, clusters, p_intra, p_inter, seed, largest):
    cfg = SbmConfig(vertices, clusters, p_intra, p_inter, seed)
    g = sbm_generate(cfg)
    if largest:
        g, _ = largest_connected_subgraph(g)
    run_config = RunConfig(generator="sbm", vertices=vertices, clusters=clusters, p_intra=p_intra,
                           p_inter=p_inter, seed=seed, largest=largest)
    write_graph(path, g, run_config)
    return path, g.num_vertices, g.num_edges

if __name__ == "__main__":
    main(sys.argv[1:])
