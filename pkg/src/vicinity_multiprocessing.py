#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _VICINITY:

The **VICINITY** module extracts the k-hop vicinity graph of every vertex: the subgraph induced by all vertices within ``k`` hops of a center. The center becomes vertex 0 of the vicinity graph and the other vertices follow in ascending original id; the original ids are recorded in the ``remap`` header entry of every file.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: A graph file, or a folder of graph files.
- ``outputFolder``: Folder where the vicinity graphs are written.
- ``k``: Number of hops (default: 1).
- ``multiprocessing``: Number of CPU cores to use.

Output files are named ``vicinity_<center>.txt``; with an input folder they go to one subfolder per input graph.

Example Usage
-------------

.. code-block:: bash

    VICINITY:
    {
        inputFolder: PREVIOUS_BLOCK_OUTPUT_FOLDER
        outputFolder: /path/to/vicinities
        k: 2
        multiprocessing: 4
    }

In this example:

- **inputFolder**: Takes the graphs written by the previous block (e.g. GEN-SBM).
- **outputFolder**: ``/path/to/vicinities/sbm_0/vicinity_0.txt``, ... are written there.
- **k**: 2-hop vicinities are extracted.
- **multiprocessing**: Four vicinities are extracted simultaneously.

"""

# Extract the k-hop vicinity graph of every vertex.
#
# Usage:
#     vicinity_multiprocessing.py -i <graph file or folder> -o <outputFolder> -k <hops>
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               Graph file, or folder of graph files
#     -o, --out <outputFolder>         Output folder
#     -k <hops>                        Number of hops (default: 1)
#         --seed <seed>                Accepted for uniformity, extraction is deterministic
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     vicinity_multiprocessing.py -h

import sys, getopt, os
from datetime import datetime
from graph_epd.errors import GraphEpdError, EXIT_USAGE
from graph_epd.graph import khop_vicinity
from graph_epd.io import RunConfig, read_graph, write_graph, list_graph_files, artifact_stem
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base

def main(argv):
    inpath = ''
    outpath = ''
    k = 1
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:o:k:j:",["log=","new_log","verbose","help","input=","out=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (vicinity_multiprocessing.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tvicinity_multiprocessing.py\n")
                print("SYNOPSIS")
                print("\tvicinity_multiprocessing.py [-h|--help][-v|--verbose][-i|--input <path>][-o|--out <outputFolder>][-k <hops>][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tExtract the k-hop vicinity graph of every vertex (center first, then ascending original id)\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: graph file, or folder of graph files")
                print("\t -o, --out: output folder (vicinity_<center>.txt files)")
                print("\t -k: number of hops (default: 1)")
                print("\t --seed: accepted, not used")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt == "-k":
                k = int(arg)
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

    if inpath == '':
        error("no input specified (use -i)")
        sys.exit(EXIT_USAGE)
    if outpath == '':
        error("no output folder specified (use -o)")
        sys.exit(EXIT_USAGE)
    if k < 0:
        error(f"the number of hops must be nonnegative, got {k}")
        sys.exit(EXIT_USAGE)

    if os.path.isdir(inpath):
        sources = [(path, os.path.join(outpath, artifact_stem(path))) for path in list_graph_files(inpath)]
        if not sources:
            warning(f"no graph file found in {inpath}")
    else:
        sources = [(inpath, outpath)]

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Graphs: {len(sources)}\n"
            f"Output folder: {outpath}\n"
            f"k: {k}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"VICINITY {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        for source, target in sources:
            g = read_graph(source)
            os.makedirs(target, exist_ok=True)
            sizes = run_pool(extract, [(g, center, k, target, base(source)) for center in range(g.num_vertices)],
                             n_jobs, f"Vicinities {base(source)}", verbose)
            if verbose:
                hprint(f"{base(source)}: {len(sizes)} vicinity graphs", os.path.abspath(target))
    except GraphEpdError as e:
        die(e)

def extract(g, center, k, outpath, source):
    sub, remap = khop_vicinity(g, center, k)
    run_config = RunConfig(source=source, k=k, center=center, remap=[int(v) for v in remap])
    write_graph(os.path.join(outpath, f"vicinity_{center}.txt"), sub, run_config)
    return sub.num_vertices

if __name__ == "__main__":
    main(sys.argv[1:])
