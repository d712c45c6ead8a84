#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _PIE:

The **PIE** module computes the persistence image error: the total squared difference between two persistence images on the same grid. Images with different resolutions or bounds are rejected (exit code 2). Given two folders, images are matched by name (``_pred_img`` on the input side, ``_epd_img`` on the reference side, filter tags and subfolders kept), a table with one error per image is written and the mean is printed.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: First image file or folder.
- ``referenceFolder``: Second image file or folder.
- ``outputFolder``: Where the table ``pie.csv`` is written (folder mode).

Example Usage
-------------

.. code-block:: bash

    PIE:
    {
        inputFolder: /path/to/images
        referenceFolder: /path/to/images
        outputFolder: /path/to/evaluation
    }

In this example:

- **inputFolder** and **referenceFolder**: Both kinds of images live in the same folder; ``<name>_pred_img.txt`` is compared with ``<name>_epd_img.txt``.
- **outputFolder**: The per-image errors are saved in ``/path/to/evaluation/pie.csv``.

"""

# Persistence image error between two images.
#
# Usage:
#     image_error.py <image A> <image B>
#     image_error.py -i <folder A> -r <folder B> -o <table.csv>
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               First image file or folder
#     -r, --reference <path>           Second image file or folder
#     -o, --out <path>                 Table of errors (folder mode; .csv or .xlsx, default: print only)
#         --seed <seed>                Accepted for uniformity, not used
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     image_error.py -h

import sys, getopt, os
import numpy as np
import pandas as pd
from datetime import datetime
from graph_epd.diagrams import pie
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.io import RunConfig, read_image, write_table, match_artifacts
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base

IMAGE_SUFFIXES = ("_pred_img", "_img", "_epd_img")

def main(argv):
    inpath = ''
    refpath = ''
    outpath = ''
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:r:o:j:",["log=","new_log","verbose","help","input=","reference=","out=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (image_error.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\timage_error.py\n")
                print("SYNOPSIS")
                print("\timage_error.py [-h|--help][-v|--verbose][-i|--input <path>][-r|--reference <path>][-o|--out <table>] [<image A> <image B>]\n")
                print("DESRIPTION")
                print("\tPersistence image error (total squared difference) between two images, or between the matching images of two folders\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: first image file or folder (may also be given as first argument)")
                print("\t -r, --reference: second image file or folder (may also be given as second argument)")
                print("\t -o, --out: table of per-image errors in folder mode (.csv or .xlsx)")
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
            raise UsageError("two image files or folders are needed")
        if os.path.isdir(inpath) != os.path.isdir(refpath):
            raise UsageError("compare two files or two folders")
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Reference: {refpath}\n"
            f"Output table: {outpath}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"PIE {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        if not os.path.isdir(inpath):
            print(f"{image_error(inpath, refpath):.16g}", flush=True)
            return
        pairs, unmatched = match_artifacts(inpath, refpath, IMAGE_SUFFIXES)
        pairs = [(key, a, b) for key, a, b in pairs if a != b]
        if unmatched:
            warning(f"{unmatched} files without counterpart are ignored")
        if not pairs:
            raise UsageError(f"no pair of distinct images between {inpath} and {refpath}")
        values = run_pool(image_error, [(a, b) for _, a, b in pairs], n_jobs, "PIE", verbose)
    except GraphEpdError as e:
        die(e)

    table = pd.DataFrame({"image": [key for key, _, _ in pairs], "pie": values})
    if outpath:
        write_table(outpath, table, RunConfig(input=base(inpath), reference=base(refpath)), kind="pie")
        if verbose:
            hprint("PIE table saved", os.path.abspath(outpath))
    elif verbose:
        print(table.to_string(index=False), flush=True)
    print(f"{np.mean(values):.16g}", flush=True)

def image_error(path_a, path_b):
    return pie(read_image(path_a), read_image(path_b))

if __name__ == "__main__":
    main(sys.argv[1:])
