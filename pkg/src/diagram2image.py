#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _IMAGE:

The **IMAGE** module turns persistence diagrams into persistence images. Every point (birth, death) is moved to (birth, death - birth), weighted by its persistence divided by the largest persistence of the diagram, and spread as a Gaussian whose mass is integrated over each cell of an r x r grid. Rows of the image run along the persistence axis, columns along the birth axis.

By default the grid is the tight bounding square of the transformed points padded by 10% on each side, and sigma is 0.2 x the side of the square. With ``reference``, bounds and sigma are taken from the matching reference diagram instead, so that a predicted diagram and the exact one share the same grid.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: Diagram file or folder (``*_epd.txt`` and ``*_pred.txt``).
- ``outputFolder``: Output folder (default: next to the diagrams); images are named ``<diagram name>_img.txt``.
- ``resolution``: Grid side r (default: 5).
- ``sigma``: Gaussian bandwidth (default: from the bounds).
- ``bounds``: ``[min, max]`` of the grid on both axes (default: from the diagram).
- ``reference``: Diagram file or folder giving bounds and sigma.
- ``multiprocessing``: Number of CPU cores to use.

Example Usage
-------------

.. code-block:: bash

    IMAGE:
    {
        inputFolder: /path/to/predictions
        outputFolder: /path/to/images
        reference: /path/to/diagrams
        resolution: 5
    }

In this example:

- **inputFolder**: Predicted diagrams are turned into images.
- **reference**: Every ``<name>_pred.txt`` uses the grid of ``<name>_epd.txt`` found in ``/path/to/diagrams``.
- **resolution**: Images are 5 x 5.

"""

# Persistence images of persistence diagrams.
#
# Usage:
#     diagram2image.py -i <diagram file or folder> -o <out> [options]
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               Diagram file or folder
#     -o, --out <path>                 Image file (one diagram) or output folder
#     -r, --resolution <r>             Grid side (default: 5)
#         --sigma <sigma>              Gaussian bandwidth (default: 0.2 x side)
#         --bounds <min,max>           Grid bounds on both axes (default: padded bounding square)
#         --reference <path>           Diagram file or folder giving bounds and sigma
#         --seed <seed>                Accepted for uniformity, not used
#     -j, --threads <count>            Number of simultaneous jobs (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     diagram2image.py -h

import sys, getopt, os
from datetime import datetime
from graph_epd.diagrams import DEFAULT_RESOLUTION, default_image_params, persistence_image
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.io import RunConfig, read_diagram, write_image, list_artifacts, artifact_key, index_artifacts
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, base

DIAGRAM_SUFFIXES = ("_pred", "_epd")

def main(argv):
    inpath = ''
    outpath = ''
    resolution = DEFAULT_RESOLUTION
    sigma = None
    bounds = None
    reference = ''
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:o:r:j:",["log=","new_log","verbose","help","input=","out=","resolution=","sigma=","bounds=","reference=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (diagram2image.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tdiagram2image.py\n")
                print("SYNOPSIS")
                print("\tdiagram2image.py [-h|--help][-v|--verbose][-i|--input <path>][-o|--out <path>][-r|--resolution <r>][--sigma <sigma>][--bounds <min,max>][--reference <path>][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tVectorize persistence diagrams as persistence images\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: diagram file or folder")
                print("\t -o, --out: image file for one diagram, output folder otherwise (default: next to the diagrams)")
                print("\t -r, --resolution: grid side (default: 5)")
                print("\t --sigma: Gaussian bandwidth (default: 0.2 x side of the grid)")
                print("\t --bounds: min,max of the grid on both axes (default: bounding square padded by 10%)")
                print("\t --reference: diagram file or folder whose matching diagram gives bounds and sigma")
                print("\t --seed: accepted, not used")
                print("\t -j, --threads: number of simultaneous jobs (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt in ("-r", "--resolution"):
                resolution = int(arg)
            elif opt == "--sigma":
                sigma = float(arg)
            elif opt == "--bounds":
                bounds = tuple(float(b) for b in arg.strip("[]").split(','))
                if len(bounds) != 2:
                    raise ValueError(f"--bounds needs two values, got '{arg}'")
            elif opt == "--reference":
                reference = arg
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
        if reference and (bounds is not None or sigma is not None):
            raise UsageError("--reference cannot be combined with --bounds or --sigma")
        if os.path.isdir(inpath):
            if reference and not os.path.isdir(reference):
                raise UsageError("a folder of diagrams needs a folder of reference diagrams")
            refs = index_artifacts(reference, DIAGRAM_SUFFIXES[::-1]) if reference else {}
            jobs = []
            for suffix in DIAGRAM_SUFFIXES:
                for path in list_artifacts(inpath, suffix, recursive=True):
                    key = artifact_key(path, inpath)
                    if reference and key not in refs:
                        warning(f"no reference diagram for {os.path.relpath(path, inpath)}, skipped")
                        continue
                    target = os.path.join(outpath or inpath, os.path.dirname(os.path.relpath(path, inpath)),
                                          image_name(path))
                    jobs.append((path, target, refs.get(key, '')))
        else:
            if reference and os.path.isdir(reference):
                raise UsageError("a single diagram needs a single reference diagram")
            target = outpath if outpath.endswith(".txt") else os.path.join(outpath or os.path.dirname(inpath), image_name(inpath))
            jobs = [(inpath, target, reference)]
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Diagrams: {len(jobs)}\n"
            f"Output: {outpath}\n"
            f"Resolution: {resolution}\n"
            f"Sigma: {sigma if sigma is not None else 'default'}\n"
            f"Bounds: {bounds if bounds is not None else 'default'}\n"
            f"Reference: {reference}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"IMAGE {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        written = run_pool(vectorize, [(path, target, ref, resolution, sigma, bounds) for path, target, ref in jobs],
                           n_jobs, "Persistence images", verbose)
    except GraphEpdError as e:
        die(e)
    if verbose:
        for target in written:
            hprint(f"{base(target)} saved", os.path.abspath(target))

def image_name(path):
    return os.path.splitext(os.path.basename(path))[0] + "_img.txt"

def vectorize(path, target, reference, resolution, sigma, bounds):
    diagram = read_diagram(path)
    run_config = RunConfig(source=base(path), resolution=resolution)
    if reference:
        bounds, sigma = default_image_params(read_diagram(reference))
        run_config["reference"] = base(reference)
    img = persistence_image(diagram, resolution, sigma, bounds)
    if os.path.dirname(target):
        os.makedirs(os.path.dirname(target), exist_ok=True)
    write_image(target, img, run_config)
    return target

if __name__ == "__main__":
    main(sys.argv[1:])
