#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _DIST:

The **DIST** module computes the 2-Wasserstein distance (W2) between persistence diagrams. Points may be matched to each other or to their projection on the diagonal, and the optimal matching is found exactly with the Hungarian algorithm. The distance of two files is printed with 16 significant digits.

Given two folders, diagrams are matched by name (the suffixes ``_epd`` and ``_pred`` are removed, filter tags and subfolders are kept), a table with one distance per diagram is written and the mean is printed. This is how predicted diagrams are evaluated against exact ones.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: First diagram file or folder (e.g. predictions).
- ``referenceFolder``: Second diagram file or folder (e.g. exact diagrams).
- ``outputFolder``: Where the table ``w2.csv`` is written (folder mode).
- ``dim``: ``0``, ``1`` or ``all`` (default: all).
- ``internal_p``: Ground norm in the plane, ``2`` or ``inf`` (default: 2).

Example Usage
-------------

.. code-block:: bash

    DIST:
    {
        inputFolder: /path/to/predictions
        referenceFolder: /path/to/diagrams
        outputFolder: /path/to/evaluation
        dim: 1
    }

In this example:

- **inputFolder** and **referenceFolder**: Every ``<name>_pred.txt`` is compared with ``<name>_epd.txt``.
- **outputFolder**: The per-diagram distances are saved in ``/path/to/evaluation/w2.csv``.
- **dim**: Only the extended 1D points are compared.

"""

# 2-Wasserstein distance between persistence diagrams.
#
# Usage:
#     diagram_distance.py <diagram A> <diagram B>
#     diagram_distance.py -i <folder A> -r <folder B> -o <table.csv>
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               First diagram file or folder
#     -r, --reference <path>           Second diagram file or folder
#     -o, --out <path>                 Table of distances (folder mode; .csv or .xlsx, default: print only)
#         --dim <0|1|all>              Homology dimension to compare (default: all)
#         --internal_p <2|inf>         Ground norm (default: 2)
#         --seed <seed>                Accepted for uniformity, not used
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     diagram_distance.py -h

import sys, getopt, os
import numpy as np
import pandas as pd
from datetime import datetime
from graph_epd.diagrams import NORMS, wasserstein2
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.io import RunConfig, read_diagram, write_table, match_artifacts
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base

DIAGRAM_SUFFIXES = ("_pred", "_epd")

def main(argv):
    inpath = ''
    refpath = ''
    outpath = ''
    dim = 'all'
    internal_p = '2'
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:r:o:j:",["log=","new_log","verbose","help","input=","reference=","out=","dim=","internal_p=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (diagram_distance.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tdiagram_distance.py\n")
                print("SYNOPSIS")
                print("\tdiagram_distance.py [-h|--help][-v|--verbose][-i|--input <path>][-r|--reference <path>][-o|--out <table>][--dim <0|1|all>][--internal_p <2|inf>] [<diagram A> <diagram B>]\n")
                print("DESRIPTION")
                print("\t2-Wasserstein distance between two diagram files, or between the matching diagrams of two folders\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: first diagram file or folder (may also be given as first argument)")
                print("\t -r, --reference: second diagram file or folder (may also be given as second argument)")
                print("\t -o, --out: table of per-diagram distances in folder mode (.csv or .xlsx)")
                print("\t --dim: homology dimension to compare, 0, 1 or all (default: all)")
                print("\t --internal_p: ground norm, 2 or inf (default: 2)")
                print("\t --seed: accepted, not used")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-r", "--reference"):
                refpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt == "--dim":
                dim = arg
            elif opt == "--internal_p":
                internal_p = arg
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

    positional = list(args)
    if inpath == '' and positional:
        inpath = positional.pop(0)
    if refpath == '' and positional:
        refpath = positional.pop(0)

    try:
        if inpath == '' or refpath == '':
            raise UsageError("two diagram files or folders are needed")
        if dim not in ("0", "1", "all"):
            raise UsageError(f"--dim must be 0, 1 or all, got '{dim}'")
        if internal_p not in NORMS:
            raise UsageError(f"--internal_p must be 2 or inf, got '{internal_p}'")
        if os.path.isdir(inpath) != os.path.isdir(refpath):
            raise UsageError("compare two files or two folders")
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Reference: {refpath}\n"
            f"Output table: {outpath}\n"
            f"Dimension: {dim}\n"
            f"Ground norm: {internal_p}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"DIST {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        if not os.path.isdir(inpath):
            print(f"{distance(inpath, refpath, dim, internal_p):.16g}", flush=True)
            return
        pairs, unmatched = match_artifacts(inpath, refpath, DIAGRAM_SUFFIXES)
        if unmatched:
            warning(f"{unmatched} files without counterpart are ignored")
        values = run_pool(distance, [(a, b, dim, internal_p) for _, a, b in pairs], n_jobs, "W2", verbose)
    except GraphEpdError as e:
        die(e)

    table = pd.DataFrame({"diagram": [key for key, _, _ in pairs], "w2": values})
    if outpath:
        run_config = RunConfig(input=base(inpath), reference=base(refpath), dim=dim, internal_p=internal_p)
        write_table(outpath, table, run_config, kind="w2")
        if verbose:
            hprint("W2 table saved", os.path.abspath(outpath))
    elif verbose:
        print(table.to_string(index=False), flush=True)
    print(f"{np.mean(values) if values else float('nan'):.16g}", flush=True)

def distance(path_a, path_b, dim, internal_p):
    a, b = read_diagram(path_a), read_diagram(path_b)
    which = None if dim == "all" else int(dim)
    return wasserstein2(a.points(which), b.points(which), internal_p)[0]

if __name__ == "__main__":
    main(sys.argv[1:])
