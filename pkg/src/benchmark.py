#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _BENCH:

The **BENCH** module times the exact engines against PDGNN inference on stochastic block model (SBM) graphs, to find the graph size above which the neural approximation becomes faster than the exact computation.

Every bucket of the sweep samples ``graphs`` SBM graphs (seeds seed, seed+1, ...) and keeps the largest connected subgraph of each. Every engine is run once on all graphs of the bucket (warm-up, discarded), then ``repetitions`` more times; the time per graph of one repetition is the total wall time divided by the number of graphs, and the report gives the median and the mean over the repetitions. Timings are measured in a single process with a monotonic clock.

Sweeps
------

- ``nodes`` (default): vertex counts ``start:stop:step`` (default 80:120:4, stop included), 5 clusters, p_intra 0.4, p_inter 0.1.
- ``density``: 250 vertices and 5 clusters, p_intra from 0.50 to 0.70 by 0.02 paired with p_inter from 0.05 to 0.15 by 0.01 (11 buckets).

Engines
-------

- ``unionfind`` and ``reduction``: exact diagram (the report also gives the mean number of union-find operations or column additions per graph).
- ``neural``: PDGNN inference with the model given by ``model``; added by default when a model is given.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``outputFolder``: Folder where the report ``bench.csv`` is written.
- ``sweep``: ``nodes`` or ``density``.
- ``sizes``: ``start:stop:step`` of the nodes sweep.
- ``graphs``: Graphs per bucket (default: 3).
- ``repetitions``: Timed repetitions, at least 3 (default: 3).
- ``engines``: Comma-separated engines (default: unionfind,reduction, plus neural with a model).
- ``model``: PDGNN model file for the neural engine.
- ``filter``: Filter spec (default: degree).
- ``seed``: Seed of the first graph of each bucket (default: 0).

Example Usage
-------------

.. code-block:: bash

    BENCH:
    {
        outputFolder: /path/to/bench
        sweep: nodes
        sizes: 80:120:4
        model: /path/to/model/model.pdgnn
        repetitions: 5
    }

In this example:

- **sweep** and **sizes**: Graphs of 80, 84, ..., 120 vertices are generated.
- **model**: The exact engines are compared with the trained model.
- **repetitions**: Each engine is timed 5 times per bucket after the warm-up run.

"""

# Exact engines against neural inference on SBM graphs.
#
# Usage:
#     benchmark.py -o <report.csv> [--sweep nodes|density] [--model <model file>]
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -o, --out <path>                 Report (.csv or .xlsx, default: print only)
#         --sweep <nodes|density>      Sweep (default: nodes)
#         --sizes <start:stop:step>    Vertex counts of the nodes sweep (default: 80:120:4)
#     -k, --clusters <count>           Clusters of the nodes sweep (default: 5)
#         --p_intra <p>                Intra-cluster probability of the nodes sweep (default: 0.4)
#         --p_inter <p>                Inter-cluster probability of the nodes sweep (default: 0.1)
#         --graphs <count>             Graphs per bucket (default: 3)
#         --repetitions <count>        Timed repetitions per engine, at least 3 (default: 3)
#     -e, --engines <list>             unionfind, reduction, neural (default: exact engines, neural with --model)
#     -m, --model <file>               PDGNN model for the neural engine
#     -f, --filter <spec>              Filter spec (default: degree)
#         --machine <note>             Machine note recorded in the report (default: platform description)
#         --seed <seed>                Seed of the first graph of each bucket (default: 0)
#     -j, --threads <count>            Torch threads of the neural engine (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     benchmark.py -h

import sys, getopt, os
import platform
import numpy as np
import pandas as pd
import torch
from datetime import datetime
from time import perf_counter
from graph_epd.engines import ENGINES, compute_epd, new_stats, stats_count
from graph_epd.errors import GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.filtration import build_filtration, filter_values, parse_filter_spec
from graph_epd.graph import SbmConfig, sbm_generate, largest_connected_subgraph
from graph_epd.io import RunConfig, write_table
from graph_epd.pdgnn import load_model, predict_diagram
from utils import hprint_msg_box, hprint, die, error, redirect_log, configure_logging, progress, base

SWEEPS = ("nodes", "density")
NEURAL = "neural"
COLUMNS = ["engine", "num_vertices", "num_clusters", "p_intra", "p_inter", "avg_nodes", "avg_edges",
           "repetitions", "median_s", "mean_s", "operations", "seed", "filter", "machine"]

def main(argv):
    outpath = ''
    sweep = 'nodes'
    sizes = (80, 120, 4)
    clusters = 5
    p_intra = 0.4
    p_inter = 0.1
    graphs = 3
    repetitions = 3
    engines = ''
    model_path = ''
    spec = 'degree'
    machine = ''
    seed = 0
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvo:k:e:m:f:j:",["log=","new_log","verbose","help","out=","sweep=","sizes=","clusters=","p_intra=","p_inter=","graphs=","repetitions=","engines=","model=","filter=","machine=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (benchmark.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\tbenchmark.py\n")
                print("SYNOPSIS")
                print("\tbenchmark.py [-h|--help][-v|--verbose][-o|--out <report>][--sweep <nodes|density>][--sizes <start:stop:step>][--graphs <count>][--repetitions <count>][-e|--engines <list>][-m|--model <file>][-f|--filter <spec>][--seed <seed>]\n")
                print("DESRIPTION")
                print("\tTime the exact engines and PDGNN inference on stochastic block model graphs\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -o, --out: report file, .csv or .xlsx (default: print the report)")
                print("\t --sweep: nodes (vertex counts) or density (250 vertices, growing probabilities) (default: nodes)")
                print("\t --sizes: start:stop:step vertex counts of the nodes sweep, stop included (default: 80:120:4)")
                print("\t -k, --clusters: clusters of the nodes sweep (default: 5)")
                print("\t --p_intra: intra-cluster edge probability of the nodes sweep (default: 0.4)")
                print("\t --p_inter: inter-cluster edge probability of the nodes sweep (default: 0.1)")
                print("\t --graphs: graphs per bucket (default: 3)")
                print("\t --repetitions: timed repetitions after the warm-up run, at least 3 (default: 3)")
                print("\t -e, --engines: comma-separated list of unionfind, reduction, neural (default: unionfind,reduction, plus neural when a model is given)")
                print("\t -m, --model: PDGNN model file, required by the neural engine")
                print("\t -f, --filter: filter spec (default: degree)")
                print("\t --machine: machine note recorded in the report (default: platform description)")
                print("\t --seed: seed of the first graph of each bucket (default: 0)")
                print("\t -j, --threads: torch threads of the neural engine (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt == "--sweep":
                sweep = arg
            elif opt == "--sizes":
                sizes = tuple(int(s) for s in arg.split(':'))
                if len(sizes) != 3:
                    raise ValueError(f"--sizes needs start:stop:step, got '{arg}'")
            elif opt in ("-k", "--clusters"):
                clusters = int(arg)
            elif opt == "--p_intra":
                p_intra = float(arg)
            elif opt == "--p_inter":
                p_inter = float(arg)
            elif opt == "--graphs":
                graphs = int(arg)
            elif opt == "--repetitions":
                repetitions = int(arg)
            elif opt in ("-e", "--engines"):
                engines = arg
            elif opt in ("-m", "--model"):
                model_path = arg
            elif opt in ("-f", "--filter"):
                spec = arg
            elif opt == "--machine":
                machine = arg
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
    torch.set_num_threads(max(1, n_jobs))

    if machine == '':
        machine = f"{platform.system()} {platform.machine()}, torch {torch.__version__}"

    try:
        engines = engine_list(engines, model_path)
        if repetitions < 3:
            raise UsageError(f"at least 3 repetitions are needed, got {repetitions}")
        if graphs < 1:
            raise UsageError(f"at least one graph per bucket is needed, got {graphs}")
        spec = parse_filter_spec(spec)
        sweep_buckets = buckets(sweep, sizes, clusters, p_intra, p_inter)
        model = load_model(model_path) if NEURAL in engines else None
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Output: {outpath}\n"
            f"Sweep: {sweep}\n"
            f"Buckets: {len(sweep_buckets)}\n"
            f"Graphs per bucket: {graphs}\n"
            f"Repetitions: {repetitions}\n"
            f"Engines: {', '.join(engines)}\n"
            f"Model: {model_path}\n"
            f"Filter: {spec}\n"
            f"Machine: {machine}\n"
            f"Seed: {seed}\n"
            f"Torch threads: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"BENCH {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    rows = []
    try:
        for cfg in progress(sweep_buckets, "Buckets", verbose):
            fgs = bucket_graphs(cfg, graphs, spec, seed)
            for engine in engines:
                times, operations = time_engine(engine, fgs, repetitions, model)
                rows.append({"engine": engine, "num_vertices": cfg.num_vertices, "num_clusters": cfg.num_clusters,
                             "p_intra": cfg.p_intra, "p_inter": cfg.p_inter,
                             "avg_nodes": float(np.mean([fg.num_vertices for fg in fgs])),
                             "avg_edges": float(np.mean([fg.num_edges for fg in fgs])),
                             "repetitions": repetitions, "median_s": float(np.median(times)),
                             "mean_s": float(np.mean(times)), "operations": operations, "seed": seed,
                             "filter": str(spec), "machine": machine})
    except GraphEpdError as e:
        die(e)

    report = pd.DataFrame(rows, columns=COLUMNS)
    if outpath:
        if os.path.dirname(outpath):
            os.makedirs(os.path.dirname(outpath), exist_ok=True)
        run_config = RunConfig(sweep=sweep, graphs=graphs, repetitions=repetitions, engines=engines,
                               model=base(model_path), filter=str(spec), seed=seed)
        if sweep == "nodes":
            run_config.update(sizes=list(sizes), clusters=clusters, p_intra=p_intra, p_inter=p_inter)
        write_table(outpath, report, run_config, kind="bench")
        if verbose:
            hprint("Report saved", os.path.abspath(outpath))
    if verbose or not outpath:
        print(report.drop(columns=["seed", "filter", "machine"]).to_string(index=False), flush=True)

def engine_list(engines, model_path):
    """Requested engines; the neural engine needs a model."""
    if engines == '':
        chosen = list(ENGINES) + ([NEURAL] if model_path else [])
    else:
        chosen = [e.strip() for e in engines.split(',') if e.strip()]
    for engine in chosen:
        if engine not in ENGINES + (NEURAL,):
            raise UsageError(f"unknown engine '{engine}' (expected one of: {', '.join(ENGINES + (NEURAL,))})")
    if not chosen:
        raise UsageError("no engine to time")
    if NEURAL in chosen and not model_path:
        raise UsageError("the neural engine needs a trained model (use -m)")
    if NEURAL in chosen and not os.path.isfile(model_path):
        raise UsageError(f"model file {model_path} not found")
    return chosen

def buckets(sweep, sizes, clusters, p_intra, p_inter):
    if sweep not in SWEEPS:
        raise UsageError(f"unknown sweep '{sweep}' (expected nodes or density)")
    if sweep == "density":
        return [SbmConfig(250, 5, round(0.50 + 0.02 * i, 10), round(0.05 + 0.01 * i, 10)) for i in range(11)]
    start, stop, step = sizes
    if step < 1 or start < 1 or stop < start:
        raise UsageError(f"invalid sizes {start}:{stop}:{step}")
    return [SbmConfig(n, clusters, p_intra, p_inter) for n in range(start, stop + 1, step)]

def bucket_graphs(cfg, graphs, spec, seed=0):
    """Filtered largest connected subgraphs of ``graphs`` SBM samples."""
    fgs = []
    for i in range(graphs):
        sample = SbmConfig(cfg.num_vertices, cfg.num_clusters, cfg.p_intra, cfg.p_inter, seed + i)
        g, _ = largest_connected_subgraph(sbm_generate(sample))
        fgs.append(build_filtration(g, filter_values(g, spec)))
    return fgs

def time_engine(engine, fgs, repetitions, model=None):
    """
    Per-graph wall times of ``repetitions`` timed runs after one warm-up run,
    and the mean operation count per graph (None for the neural engine).
    """
    if engine == NEURAL:
        def run(fg):
            predict_diagram(model, fg)
    else:
        def run(fg):
            compute_epd(fg, engine)

    operations = None
    if engine != NEURAL:
        counts = []
        for fg in fgs:
            stats = new_stats(engine)
            compute_epd(fg, engine, 1, stats)
            counts.append(stats_count(stats))
        operations = float(np.mean(counts))
    else:
        for fg in fgs:
            run(fg)

    times = []
    for _ in range(repetitions):
        tic = perf_counter()
        for fg in fgs:
            run(fg)
        times.append((perf_counter() - tic) / len(fgs))
    return times, operations

if __name__ == "__main__":
    main(sys.argv[1:])
