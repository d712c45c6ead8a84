#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
graph2epd computes, approximates and compares extended persistence diagrams of graphs.

It runs one module directly (``g2e.py <subcommand> [options]``) or follows the
instructions of a PIPELINE file (``g2e.py -c <configFile>``).

Usage: g2e.py <subcommand> [options]
       g2e.py -c <configFile> [-i <inputPath>]
Help: g2e.py -h
"""

import os,sys, getopt
import importlib
import pandas as pd
import subprocess
import time
from datetime import datetime

SRC = os.path.join(os.path.dirname(os.path.abspath(__file__)), "src")
if os.path.isdir(SRC) and SRC not in sys.path:
    sys.path.insert(0, SRC)

from graph_epd.errors import EXIT_USAGE
from utils import eprint, error, print_params

#subcommand -> script of src/
SUBCOMMANDS = {
    "compute": "epd_multiprocessing",
    "vicinity": "vicinity_multiprocessing",
    "gen-sbm": "gen_sbm",
    "dist": "diagram_distance",
    "image": "diagram2image",
    "pie": "image_error",
    "train": "train",
    "infer": "predict",
    "bench": "benchmark",
}

#PIPELINE block -> script of src/
BLOCKS = {
    "GEN-SBM": "gen_sbm",
    "VICINITY": "vicinity_multiprocessing",
    "COMPUTE": "epd_multiprocessing",
    "TRAIN": "train",
    "INFER": "predict",
    "DIST": "diagram_distance",
    "IMAGE": "diagram2image",
    "PIE": "image_error",
    "BENCH": "benchmark",
}


def main(argv):
    if argv and argv[0] in SUBCOMMANDS:
        run_subcommand(argv[0], argv[1:])
        return

    configFile = ''
    configs=[] #list of blocks of the PIPELINE file
    verbose = False
    log = ''
    inputPath = ''
    global_params = {}
    params = {}
    previous_outFolder = ''
    previous_model = ''
    new_log = False

    try:
        opts, args = getopt.getopt(argv, "vhc:i:",["log=","new_log","verbose","help","config=","input="])
    except getopt.GetoptError as e:
        error(f"{e} (g2e.py -h for help)")
        sys.exit(EXIT_USAGE)
    for opt,arg in opts:
        if opt in ("-h", "--help"):
            print("NAME")
            print("\tg2e.py\n")
            print("SYNOPSIS")
            print("\tg2e.py <subcommand> [options]")
            print("\tg2e.py [-h|--help][-v|--verbose][-c|--config <configFile>][-i|--input <inputPath>][--log <logFile>][--new_log]\n")
            print("DESRIPTION")
            print("\tgraph2epd computes exact extended persistence diagrams of filtered graphs, approximates them with a PDGNN model and compares diagrams\n")
            print("SUBCOMMANDS")
            for name, script in SUBCOMMANDS.items():
                print(f"\t {name}: src/{script}.py (g2e.py {name} -h for its options)")
            print("\nOPTIONS")
            print("\t -h, --help: print this help page")
            print("\t -v, --verbose: False by default")
            print("\t -c, --config: specify the path to the PIPELINE file (see PIPELINES/PIPELINE_EXAMPLE)")
            print("\t -i, --input: specify the path to an input folder; to use this option, the path for the input folder in the PIPELINE file needs to be set to '.'")
            print("\t --log: stdout redirect to log file")
            print("\t --new_log: overwrite previous log file", flush=True)
            sys.exit()
        elif opt in ("-c", "--config"):
            configFile = arg
        elif opt in ("-i", "--input"):
            inputPath = arg
        elif opt in ("-v", "--verbose"):
            verbose = True
        elif opt == "--log":
            log = arg
        elif opt == "--new_log":
            new_log = True

    if args:
        error(f"unknown subcommand '{args[0]}' (expected one of: {', '.join(SUBCOMMANDS)})")
        sys.exit(EXIT_USAGE)
    if not configFile:
        error("Missing configuration file. Use -c or --config to specify the path to the PIPELINE file.")
        sys.exit(EXIT_USAGE)
    if not os.path.isfile(configFile):
        error(f"Configuration file '{configFile}' not found.")
        sys.exit(EXIT_USAGE)

    if log != '':
        if new_log:
            f = open(log,'w+')
        else:
            f = open(log,'a+')
        sys.stdout = f

    if verbose:
        print("-" * 50,flush=True)
        print(datetime.now().strftime("%Y-%m-%d %H:%M:%S"),flush=True)
        print("Configuration file: "+configFile,flush=True)
        print("Verbose "+str(verbose),flush=True)
        print("log:",str(log),flush=True)
        print("Overwrite previous log file: ",str(new_log),flush=True)
        print("\n",flush=True)

    read_config_file(configFile,configs,verbose)

    #Check for default parameters
    for cfg in configs:
        if cfg["function"]=='GLOBAL_PARAMETERS':
            for i in cfg.index:
                if i != 'function':
                    global_params[i]=parse(cfg[i])
            if verbose:
                print("\033[1m\nGLOBAL_PARAMETERS: \033[0m",flush=True)
                print_params(global_params)

    #run pipeline
    for cfg in configs:
        if cfg["function"]=='GLOBAL_PARAMETERS':
            continue
        params = global_params.copy()
        for i in cfg.index:
            params[i]=parse(cfg[i])
        common_defaults(params)

        ###########
        # GEN-SBM #
        ###########
        if cfg["function"] == 'GEN-SBM':
            require(params, 'outputFolder', "No output folder specified")
            if not 'vertices' in params.keys():
                params['vertices']=250
            if not 'clusters' in params.keys():
                params['clusters']=5
            if not 'p_intra' in params.keys():
                params['p_intra']=0.4
            if not 'p_inter' in params.keys():
                params['p_inter']=0.1
            if not 'graphs' in params.keys():
                params['graphs']=1
            if not 'largest' in params.keys():
                params['largest']=False

            flags =["-o", str(params['outputFolder'])]
            flags.extend(["-n", str(params['vertices']), "-k", str(params['clusters'])])
            flags.extend(["--p_intra", str(params['p_intra']), "--p_inter", str(params['p_inter'])])
            flags.extend(["--graphs", str(params['graphs'])])
            if params['largest']:
                flags.append("--largest")

        ############
        # VICINITY #
        ############
        elif cfg["function"] == 'VICINITY':
            input_folder(params, inputPath, previous_outFolder)
            output_folder(params)
            if not 'k' in params.keys():
                params['k']=1

            flags =["-i", str(params['inputFolder'])]
            flags.extend(["-o", str(params['outputFolder'])])
            flags.extend(["-k", str(params['k'])])

        ###########
        # COMPUTE #
        ###########
        elif cfg["function"] == 'COMPUTE':
            input_folder(params, inputPath, previous_outFolder)
            output_folder(params, required=False)
            if not 'filter' in params.keys():
                params['filter']='degree'
            if not 'engine' in params.keys():
                params['engine']='unionfind'
            if not 'drop_zero' in params.keys():
                params['drop_zero']=False

            flags =["-i", str(params['inputFolder'])]
            if params['outputFolder'] != '':
                flags.extend(["-o", str(params['outputFolder'])])
            flags.extend(["-f", flag_value(params['filter'])])
            flags.extend(["-e", str(params['engine'])])
            if 'centers' in params.keys():
                flags.extend(["--centers", flag_value(params['centers'])])
            if params['drop_zero']:
                flags.append("--drop_zero")

        #########
        # TRAIN #
        #########
        elif cfg["function"] == 'TRAIN':
            input_folder(params, inputPath, previous_outFolder)
            output_folder(params)
            if not 'model_filename' in params.keys():
                params['model_filename']='model.pdgnn'
            if not 'filter' in params.keys():
                params['filter']='degree'

            previous_model = os.path.join(str(params['outputFolder']), str(params['model_filename']))
            flags =["-i", str(params['inputFolder'])]
            flags.extend(["-o", previous_model])
            flags.extend(["-f", flag_value(params['filter'])])
            for key, flag in (('variant', "--variant"), ('head_mode', "--head_mode"), ('hidden', "--hidden"),
                              ('layers', "--layers"), ('epochs', "--epochs"), ('batch_size', "--batch_size"),
                              ('learning_rate', "--lr"), ('weight_decay', "--weight_decay"),
                              ('dropout', "--dropout"), ('loss', "--loss"), ('train_fraction', "--train_fraction"),
                              ('test_size', "--test_size"), ('resolution', "--resolution"),
                              ('init_model', "--init_model"), ('cache', "--cache"), ('format', "--format"),
                              ('engine', "--engine"), ('centers', "--centers")):
                if key in params.keys():
                    flags.extend([flag, flag_value(params[key])])

        #########
        # INFER #
        #########
        elif cfg["function"] == 'INFER':
            input_folder(params, inputPath, previous_outFolder)
            output_folder(params, required=False)
            if not 'model_filename' in params.keys():
                params['model_filename']='model.pdgnn'
            if not 'filter' in params.keys():
                params['filter']='degree'
            if not 'epsilon' in params.keys():
                params['epsilon']=0
            if 'modelFolder' in params.keys():
                model = os.path.join(str(params['modelFolder']), str(params['model_filename']))
            elif previous_model != '':
                model = previous_model
            else:
                error("No model folder specified (modelFolder) and no TRAIN block before INFER")
                sys.exit(EXIT_USAGE)

            flags =["-m", model]
            flags.extend(["-i", str(params['inputFolder'])])
            if params['outputFolder'] != '':
                flags.extend(["-o", str(params['outputFolder'])])
            flags.extend(["-f", flag_value(params['filter'])])
            flags.extend(["--epsilon", str(params['epsilon'])])
            if 'centers' in params.keys():
                flags.extend(["--centers", flag_value(params['centers'])])

        #######################
        # DIST / PIE (tables) #
        #######################
        elif cfg["function"] in ('DIST', 'PIE'):
            input_folder(params, inputPath, previous_outFolder)
            require(params, 'referenceFolder', "No reference folder specified")
            output_folder(params, required=False)
            if not 'table_filename' in params.keys():
                params['table_filename']='w2.csv' if cfg["function"] == 'DIST' else 'pie.csv'

            flags =["-i", str(params['inputFolder'])]
            flags.extend(["-r", str(params['referenceFolder'])])
            if params['outputFolder'] != '':
                os.makedirs(str(params['outputFolder']), exist_ok=True)
                flags.extend(["-o", os.path.join(str(params['outputFolder']), str(params['table_filename']))])
            if cfg["function"] == 'DIST':
                for key in ('dim', 'internal_p'):
                    if key in params.keys():
                        flags.extend([f"--{key}", str(params[key])])

        #########
        # IMAGE #
        #########
        elif cfg["function"] == 'IMAGE':
            input_folder(params, inputPath, previous_outFolder)
            output_folder(params, required=False)
            if not 'resolution' in params.keys():
                params['resolution']=5

            flags =["-i", str(params['inputFolder'])]
            if params['outputFolder'] != '':
                flags.extend(["-o", str(params['outputFolder'])])
            flags.extend(["-r", str(params['resolution'])])
            for key in ('sigma', 'bounds', 'reference'):
                if key in params.keys():
                    flags.extend([f"--{key}", flag_value(params[key])])

        #########
        # BENCH #
        #########
        elif cfg["function"] == 'BENCH':
            output_folder(params, required=False)
            if not 'report_filename' in params.keys():
                params['report_filename']='bench.csv'

            flags = []
            if params['outputFolder'] != '':
                os.makedirs(str(params['outputFolder']), exist_ok=True)
                flags.extend(["-o", os.path.join(str(params['outputFolder']), str(params['report_filename']))])
            for key, flag in (('sweep', "--sweep"), ('sizes', "--sizes"), ('clusters', "-k"),
                              ('p_intra', "--p_intra"), ('p_inter', "--p_inter"), ('graphs', "--graphs"),
                              ('repetitions', "--repetitions"), ('engines', "-e"), ('model', "-m"),
                              ('filter', "-f"), ('machine', "--machine")):
                if key in params.keys():
                    flags.extend([flag, flag_value(params[key])])

        if verbose:
            print(f"\033[1m\n{params['function']}\033[0m",flush=True)
            print_params(params)

        #FLAGS common to every module
        flags.extend(["--log", str(params['log'])])
        flags.extend(["--seed", str(params['seed'])])
        flags.extend(["-j", str(params['multiprocessing'])])
        if params['verbose']:
            flags.append("-v")
        if params['new_log_file']:
            flags.append("--new_log")

        run_block(params, BLOCKS[cfg["function"]], flags)

        if 'outputFolder' in params.keys():
            if params['outputFolder'] != '':
                previous_outFolder=params['outputFolder']
            elif 'inputFolder' in params.keys():
                previous_outFolder=params['inputFolder']  #outputs written next to the inputs


def run_subcommand(name, argv):
    """Run the main of the script of a subcommand in this process."""
    importlib.import_module(SUBCOMMANDS[name]).main(argv)


def run_block(params, script, flags):
    """Run a block in a subprocess; a failing block stops the pipeline with its exit code."""
    env = os.environ.copy()
    env["PYTHONPATH"] = os.pathsep.join(p for p in (SRC, env.get("PYTHONPATH", '')) if p)
    prog = [sys.executable, "-m", script] + flags
    sys.stdout.flush()
    if params['timer']:
        tic = time.perf_counter()
    result = subprocess.run(prog, env=env)
    if params['timer']:
        toc = time.perf_counter()
        print(f"{params['function']} - Timer: {toc-tic:0.4f} seconds",flush=True)
    if result.returncode != 0:
        error(f"{params['function']} failed (src/{script}.py exited with code {result.returncode})")
        sys.exit(result.returncode)


#default values of the parameters shared by every block
def common_defaults(params):
    if not 'timer' in params.keys():
        params['timer']=False
    if not 'log' in params.keys():
        params['log']=''
    if not 'verbose' in params.keys():
        params['verbose']=False
    if not 'new_log_file' in params.keys():
        params['new_log_file']=False
    if not 'multiprocessing' in params.keys():
        params['multiprocessing']=1
    if not 'seed' in params.keys():
        params['seed']=0


def require(params, key, message):
    if not key in params.keys():
        error(f"{params['function']}: {message}")
        sys.exit(EXIT_USAGE)


def input_folder(params, inputPath, previous_outFolder):
    require(params, 'inputFolder', "No input folder specified")
    if params['inputFolder'] == '.':
        if inputPath != '':
            params['inputFolder']=inputPath
        else:
            error("If inputFolder is set to '.' g2e.py needs to be used with -i option to select the input path")
            sys.exit(EXIT_USAGE)
    if params['inputFolder'] == 'PREVIOUS_BLOCK_OUTPUT_FOLDER':
        if previous_outFolder == '':
            error(f"{params['function']}: no previous block with an output folder")
            sys.exit(EXIT_USAGE)
        params['inputFolder'] = previous_outFolder


def output_folder(params, required=True):
    if not 'outputFolder' in params.keys():
        if 'outputFolderSuffix' in params.keys():
            params['outputFolder']=str(params['inputFolder']).rstrip('/')+'_'+str(params['outputFolderSuffix'])
        elif required:
            require(params, 'outputFolder', "No output folder specified")
        else:
            params['outputFolder']=''


#value of a pipeline parameter as a command-line value
def flag_value(value):
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def read_config_file(config_File,configs,verbose):
    begin_param_list = False
    config=pd.Series(dtype=object)
    with open(config_File, 'r') as infile:
        for number, raw_line in enumerate(infile, start=1):
            line=raw_line.strip()
            if not line: #skip empty line
                continue
            elif line[0] == '#':  #skip comment lines
                continue
            elif 'function' in config.index:
                if line[0]=='{':
                    begin_param_list = True
                elif begin_param_list == True:
                    if line[0]=='}':
                        configs.append(config)
                        if verbose:
                            print("\033[1mThe following instruction was found in",config_File,"\033[0m",flush=True)
                            print_params(config)
                        config=pd.Series(dtype=object)
                        begin_param_list = False
                    else:
                        line=line.split('#')[0].replace(' ','').replace('\t','')
                        key, sep, value = line.partition(':')
                        if not sep or not key or not value:
                            eprint(f"ERROR in the PIPELINE file {config_File}:{number} ({line})")
                            print(f"\033[31mERROR in the PIPELINE file\033[0m (\033[36m{line}\033[0m)",flush=True)
                            sys.exit(EXIT_USAGE)
                        config=pd.concat([config,pd.Series(value, index=[key])])
            else:
                name = line.split('#')[0].strip().rstrip(':').strip()
                if name != 'GLOBAL_PARAMETERS' and name not in BLOCKS:
                    error(f"{config_File}:{number}: the module {name} does not exist (expected one of: GLOBAL_PARAMETERS, {', '.join(BLOCKS)})")
                    sys.exit(EXIT_USAGE)
                config=pd.concat([config,pd.Series(name,index=["function"])])
    if 'function' in config.index:
        error(f"{config_File}: block {config['function']} is not closed")
        sys.exit(EXIT_USAGE)

#Take a string and try to parse it to a list, a float, a int or a bool
def parse(i):
    if i in ['True','true']:        #Bool True
        return True
    elif i in ['False','false']:    #Bool False
        return False
    else:
        try:                        #int
            return int(i)
        except ValueError:
            try:                    #float
                return float(i)
            except ValueError:
                if not i.startswith('['): #string
                    return i
                split=i.strip('[]').split(',')
                return [parse(s) for s in split if s != '']

if __name__ == "__main__":
    main(sys.argv[1:])
