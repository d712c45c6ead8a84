#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
.. _TRAIN:

The **TRAIN** module trains a PDGNN model to predict extended persistence diagrams. The exact diagram of every graph is computed first (the training targets: one persistence pair per edge), the graphs are split randomly into 80% training and 20% test graphs, and the model is trained with mini-batch AdamW on the distance between predicted and exact points, every predicted point being forced to pair with an exact one. After every epoch the mean W2 distance and persistence image error (PIE) on the test graphs are recorded in the history file; epoch 0 is the untrained model.

Model variants
--------------

- ``pdgnn``: edge messages weighted by attention, sum and min aggregation (default).
- ``gat``: node messages weighted by attention, sum aggregation.
- ``gat_min``: node messages weighted by attention, sum and min aggregation.
- ``pdgnn_no_ew``: edge messages without attention, sum and min aggregation.

Options
-------

- ``verbose``: Enable or disable verbose mode.
- ``timer``: Enable or disable the timer to record execution time.
- ``log``: Specify the path to a file for saving logs.
- ``new_log_file``: Create a new log file: if a log file with the same name already exists, it will be overwritten.
- ``inputFolder``: Folder of graph files (subfolders included).
- ``outputFolder``: Folder where ``model_filename`` and its history are written.
- ``model_filename``: Name of the model file (default: model.pdgnn).
- ``filter``: Filter spec or comma-separated list (default: degree).
- ``variant``: Model variant (default: pdgnn).
- ``epochs``, ``batch_size``, ``learning_rate``, ``weight_decay``, ``dropout``: Training parameters (defaults: 20, 10, 0.002, 0.01, 0).
- ``loss``: ``forced`` (optimal pairing of predicted and exact points) or ``per-edge`` (default: forced).
- ``train_fraction``: Fraction of the training graphs used (default: 1).
- ``init_model``: Start from the parameters of a saved model.
- ``cache``: File where the prepared dataset is stored and reused; it is rebuilt when the graph files, filters or engine change.
- ``format``: ``text`` or ``binary`` model file (default: text).
- ``seed``: Seed of the split, the initialization and the batch order (default: 0).
- ``multiprocessing``: Number of CPU cores used to prepare the dataset and by torch.

Example Usage
-------------

.. code-block:: bash

    TRAIN:
    {
        inputFolder: /path/to/vicinities
        outputFolder: /path/to/model
        filter: degree
        epochs: 20
        seed: 0
        cache: /path/to/model/dataset.joblib
        log: /path/to/logs/train.log
    }

In this example:

- **inputFolder**: All vicinity graphs are used, 80% for training and 20% for testing.
- **outputFolder**: ``model.pdgnn`` and ``model_history.txt`` are written to ``/path/to/model``.
- **cache**: The exact diagrams are computed once and reused by later runs on the same data.

"""

# Train a PDGNN model on the exact diagrams of a folder of graphs.
#
# Usage:
#     train.py -i <graph folder> -o <model file> [options]
#
# Options:
#     -h, --help                       Show this help message and exit
#     -v, --verbose                    Enable verbose output (default: False)
#     -i, --input <path>               Folder of graph files (searched recursively) or one graph file
#     -o, --out <model file>           Model file (default: model.pdgnn)
#     -f, --filter <spec>              Filter spec or comma-separated list (default: degree)
#         --centers <ids>              Centers of ricci-dist (default: 0)
#         --engine <engine>            Exact engine for the targets (default: unionfind)
#         --variant <name>             pdgnn, gat, gat_min or pdgnn_no_ew (default: pdgnn)
#         --head_mode <mode>           ordered or symmetric (default: ordered)
#         --hidden <width>             Hidden width (default: 32)
#         --layers <count>             Message-passing layers (default: 4)
#         --epochs <count>             Epochs (default: 20)
#         --batch_size <count>         Graphs per batch (default: 10)
#         --lr <rate>                  Learning rate (default: 0.002)
#         --weight_decay <value>       Decoupled weight decay (default: 0.01)
#         --dropout <rate>             Dropout between layers (default: 0)
#         --loss <mode>                forced or per-edge (default: forced)
#         --train_fraction <f>         Fraction of the training graphs used (default: 1)
#         --test_size <f>              Fraction of test graphs (default: 0.2)
#         --resolution <r>             Image resolution of the test PIE (default: 5)
#         --init_model <file>          Start from a saved model
#         --history <file>             History file (default: <model>_history.txt)
#         --cache <file>               Store/reuse the prepared dataset
#         --format <text|binary>       Model file format (default: text)
#         --seed <seed>                Seed (default: 0)
#     -j, --threads <count>            Number of simultaneous jobs and torch threads (default: 1)
#         --log <logFile>              Redirect stdout to a log file
#         --new_log                    Overwrite previous log file if it exists
#
# Help:
#     train.py -h

import sys, getopt, os
import joblib
import torch
from datetime import datetime
from graph_epd.engines import ENGINES
from graph_epd.errors import DataFormatError, GraphEpdError, UsageError, EXIT_USAGE
from graph_epd.filtration import build_filtration, expand_filter_specs, filter_values
from graph_epd.io import RunConfig, read_graph, write_history, list_graph_files, artifact_stem
from graph_epd.pdgnn import (ModelConfig, TrainConfig, MODEL_FORMATS, make_sample, train as train_model,
                             load_model, save_model, describe)
from utils import hprint_msg_box, hprint, die, error, warning, redirect_log, configure_logging, run_pool, progress, base

def main(argv):
    inpath = ''
    outpath = 'model.pdgnn'
    filters = 'degree'
    centers = [0]
    engine = 'unionfind'
    variant = 'pdgnn'
    head_mode = 'ordered'
    hidden = 32
    layers = 4
    epochs = 20
    batch_size = 10
    lr = 0.002
    weight_decay = 0.01
    dropout = 0.0
    loss = 'forced'
    train_fraction = 1.0
    test_size = 0.2
    resolution = 5
    init_model = ''
    history = ''
    cache = ''
    fmt = 'text'
    seed = 0
    n_jobs = 1
    verbose = False
    log = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "hvi:o:f:j:",["log=","new_log","verbose","help","input=","out=","filter=","centers=","engine=","variant=","head_mode=","hidden=","layers=","epochs=","batch_size=","lr=","weight_decay=","dropout=","loss=","train_fraction=","test_size=","resolution=","init_model=","history=","cache=","format=","seed=","threads="])
    except getopt.GetoptError as e:
        error(f"{e} (train.py -h for help)")
        sys.exit(EXIT_USAGE)
    try:
        for opt,arg in opts:
            if opt in ("-h", "--help"):
                print("NAME")
                print("\ttrain.py\n")
                print("SYNOPSIS")
                print("\ttrain.py [-h|--help][-v|--verbose][-i|--input <path>][-o|--out <model file>][-f|--filter <spec>][--variant <name>][--epochs <count>][--batch_size <count>][--lr <rate>][--weight_decay <value>][--loss <mode>][--train_fraction <f>][--init_model <file>][--cache <file>][--format <text|binary>][--seed <seed>][-j|--threads <count>]\n")
                print("DESRIPTION")
                print("\tTrain a PDGNN model on the exact extended persistence diagrams of a folder of graphs\n")
                print("OPTIONS")
                print("\t -h, --help: print this help page")
                print("\t -v, --verbose: False by default")
                print("\t -i, --input: folder of graph files (subfolders included) or one graph file")
                print("\t -o, --out: model file (default: model.pdgnn)")
                print("\t -f, --filter: filter spec or comma-separated list, one training graph per graph and filter (default: degree)")
                print("\t --centers: comma-separated centers of ricci-dist (default: 0)")
                print(f"\t --engine: exact engine for the targets, {' or '.join(ENGINES)} (default: unionfind)")
                print("\t --variant: pdgnn, gat, gat_min or pdgnn_no_ew (default: pdgnn)")
                print("\t --head_mode: ordered (smaller endpoint id first) or symmetric (default: ordered)")
                print("\t --hidden: hidden width (default: 32)")
                print("\t --layers: number of message-passing layers (default: 4)")
                print("\t --epochs: number of epochs (default: 20)")
                print("\t --batch_size: graphs per batch (default: 10)")
                print("\t --lr: learning rate (default: 0.002)")
                print("\t --weight_decay: decoupled weight decay (default: 0.01)")
                print("\t --dropout: dropout between message-passing layers (default: 0)")
                print("\t --loss: forced (optimal pairing) or per-edge (default: forced)")
                print("\t --train_fraction: fraction of the training graphs used (default: 1)")
                print("\t --test_size: fraction of test graphs (default: 0.2)")
                print("\t --resolution: persistence image resolution of the test PIE (default: 5)")
                print("\t --init_model: start from the parameters of a saved model")
                print("\t --history: history file (default: <model name>_history.txt)")
                print("\t --cache: file where the prepared dataset is stored and reused")
                print("\t --format: text or binary model file (default: text)")
                print("\t --seed: seed of the split, the initialization and the batch order (default: 0)")
                print("\t -j, --threads: number of simultaneous jobs and torch threads (default: 1)")
                print("\t --log: stdout redirect to log file")
                print("\t --new_log: overwrite previous log file", flush=True)
                sys.exit()
            elif opt in ("-i", "--input"):
                inpath = arg
            elif opt in ("-o", "--out"):
                outpath = arg
            elif opt in ("-f", "--filter"):
                filters = arg
            elif opt == "--centers":
                centers = [int(c) for c in arg.strip("[]").split(',') if c.strip()]
            elif opt == "--engine":
                engine = arg
            elif opt == "--variant":
                variant = arg
            elif opt == "--head_mode":
                head_mode = arg
            elif opt == "--hidden":
                hidden = int(arg)
            elif opt == "--layers":
                layers = int(arg)
            elif opt == "--epochs":
                epochs = int(arg)
            elif opt == "--batch_size":
                batch_size = int(arg)
            elif opt == "--lr":
                lr = float(arg)
            elif opt == "--weight_decay":
                weight_decay = float(arg)
            elif opt == "--dropout":
                dropout = float(arg)
            elif opt == "--loss":
                loss = arg
            elif opt == "--train_fraction":
                train_fraction = float(arg)
            elif opt == "--test_size":
                test_size = float(arg)
            elif opt == "--resolution":
                resolution = int(arg)
            elif opt == "--init_model":
                init_model = arg
            elif opt == "--history":
                history = arg
            elif opt == "--cache":
                cache = arg
            elif opt == "--format":
                fmt = arg
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

    if history == '':
        history = os.path.splitext(outpath)[0] + "_history.txt"

    try:
        if inpath == '':
            raise UsageError("no input specified (use -i)")
        if engine not in ENGINES:
            raise UsageError(f"unknown engine '{engine}' (expected one of: {', '.join(ENGINES)})")
        if fmt not in MODEL_FORMATS:
            raise UsageError(f"unknown model format '{fmt}' (expected text or binary)")
        specs = expand_filter_specs(filters)
        cfg = TrainConfig(learning_rate=lr, weight_decay=weight_decay, batch_size=batch_size, epochs=epochs,
                          dropout=dropout, seed=seed, loss_mode=loss, train_fraction=train_fraction,
                          test_size=test_size, resolution=resolution)
        if init_model:
            model = load_model(init_model)
            model_config = model.config
        else:
            model = None
            model_config = ModelConfig.from_variant(variant, hidden=hidden, layers=layers, head_mode=head_mode)
        graphs = list_graph_files(inpath, recursive=True) if os.path.isdir(inpath) else [inpath]
        if not graphs:
            raise UsageError(f"no graph file found in {inpath}")
    except GraphEpdError as e:
        die(e)

    if verbose:
        msg = (
            f"Input: {inpath}\n"
            f"Graphs: {len(graphs)}\n"
            f"Model file: {outpath}\n"
            f"History file: {history}\n"
            f"Filters: {', '.join(str(s) for s in specs)}\n"
            f"Target engine: {engine}\n"
            f"Architecture: {model_config.variant} ({model_config.layers} x {model_config.hidden}, {model_config.head_mode} head)\n"
            f"Initial model: {init_model}\n"
            f"Epochs: {epochs}\n"
            f"Batch size: {batch_size}\n"
            f"Learning rate: {lr}\n"
            f"Weight decay: {weight_decay}\n"
            f"Dropout: {dropout}\n"
            f"Loss: {loss}\n"
            f"Train fraction: {train_fraction}\n"
            f"Test size: {test_size}\n"
            f"Cache: {cache}\n"
            f"Format: {fmt}\n"
            f"Seed: {seed}\n"
            f"n_jobs: {n_jobs}\n"
            f"Log: {log}\n"
            f"Overwrite previous log file: {new_log}\n"
            f"Verbose: {verbose}\n"
            )
        hprint_msg_box(msg=msg, indent=2, title=f"TRAIN {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    root = inpath if os.path.isdir(inpath) else os.path.dirname(inpath)
    try:
        data_config = RunConfig(input=base(inpath), graphs=len(graphs), filter=[str(s) for s in specs], centers=centers,
                                engine=engine, fingerprint=fingerprint(graphs, root))
        dataset = load_cache(cache, data_config, verbose) if cache else None
        if dataset is None:
            jobs = [(path, os.path.relpath(path, root or '.'), spec, centers, engine, len(specs))
                    for path in graphs for spec in specs]
            dataset = run_pool(prepare, jobs, n_jobs, "Exact diagrams", verbose)
            if cache:
                if os.path.dirname(cache):
                    os.makedirs(os.path.dirname(cache), exist_ok=True)
                joblib.dump({"run_config": dict(data_config), "samples": dataset}, cache)
                if verbose:
                    hprint("Prepared dataset cached", os.path.abspath(cache))

        result = train_model(cfg, dataset, model=model, model_config=model_config,
                             progress=lambda epochs: progress(epochs, "Training", verbose, colour="green"))
    except GraphEpdError as e:
        die(e)

    run_config = RunConfig(data_config)
    run_config.update(epochs=epochs, batch_size=batch_size, learning_rate=lr, weight_decay=weight_decay,
                      dropout=dropout, loss=loss, train_fraction=train_fraction, test_size=test_size,
                      resolution=resolution, init_model=base(init_model), seed=seed)
    for path in (outpath, history):
        if os.path.dirname(path):
            os.makedirs(os.path.dirname(path), exist_ok=True)
    save_model(outpath, result.model, fmt, run_config)
    write_history(history, result.history, run_config)

    last = result.history.iloc[-1]
    print(f"epoch {int(last['epoch'])}: train loss {last['train_loss']:.6g}, test W2 {last['test_w2']:.6g}, test PIE {last['test_pie']:.6g}", flush=True)
    if verbose:
        print(f"Model: {describe(result.model)}", flush=True)
        hprint("Model saved", os.path.abspath(outpath))
        hprint("History saved", os.path.abspath(history))

def prepare(path, name, spec, centers, engine, n_specs):
    g = read_graph(path)
    fg = build_filtration(g, filter_values(g, spec, centers))
    if n_specs > 1:
        name = f"{os.path.splitext(name)[0]}_{spec.tag}"
    return make_sample(name, fg, engine)

#hash of the relative paths and contents of the graph files
def fingerprint(graphs, root):
    contents = []
    for path in graphs:
        try:
            with open(path, "rb") as f:
                contents.append((os.path.relpath(path, root or '.'), f.read()))
        except OSError as e:
            raise DataFormatError(f"cannot read graph file ({e.strerror})", path) from None
    return joblib.hash(contents)

def load_cache(cache, data_config, verbose):
    """Cached samples when the cache was prepared with the same data parameters."""
    if not os.path.exists(cache):
        return None
    stored = joblib.load(cache)
    if stored.get("run_config") != dict(data_config):
        warning(f"the cache {cache} was prepared with other parameters, it will be rebuilt")
        return None
    if verbose:
        hprint(f"Reusing {len(stored['samples'])} prepared graphs", os.path.abspath(cache))
    return stored["samples"]

if __name__ == "__main__":
    main(sys.argv[1:])
