#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os,sys
import re
import logging
import multiprocessing
from tqdm import tqdm

BAR_FORMAT = "{l_bar}{bar} [time left: {remaining}, time spent: {elapsed}]"

#print in stderr
def eprint(*args, **kwargs):
    print(*args, file=sys.stderr, **kwargs)

#print with hyperlink
def hprint(text,path):
        print(f"{text} (\033]8;;file://{os.path.abspath(path)}\033\\{path}\033]8;;\033\\)",flush=True)

#print an error on stdout (log file) and stderr
def error(msg):
    print(f"\033[31mERROR: {msg}\033[0m",flush=True)
    eprint(f"ERROR: {msg}")

#print a warning
def warning(msg):
    print(f"\033[33mWARNING: {msg}\033[0m",flush=True)

#print an error and exit with the code of a graph_epd exception (or the given code)
def die(err, code=None):
    error(str(err))
    sys.exit(code if code is not None else getattr(err, "exit_code", 2))

#redirect stdout to a log file
def redirect_log(log, new_log=False):
    if log != '':
        if new_log:
            f = open(log,'w+')
        else:
            f = open(log,'a+')
        sys.stdout = f

#graph_epd library messages: ERROR by default, INFO in verbose mode
def configure_logging(verbose=False):
    logger = logging.getLogger("graph_epd")
    logger.setLevel(logging.INFO if verbose else logging.ERROR)
    for handler in list(logger.handlers):
        if getattr(handler, "_g2e", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    handler._g2e = True
    logger.addHandler(handler)
    return logger

#progress bar shown in verbose mode only
def progress(iterable, desc, verbose, total=None, colour="yellow"):
    if not verbose:
        return iterable
    return tqdm(iterable, total=total, ncols=100, desc=desc, bar_format=BAR_FORMAT, colour=colour)

#apply func to every tuple of args, in a pool when n_jobs > 1; results keep the order of args
def run_pool(func, args, n_jobs=1, desc="", verbose=False):
    args = list(args)
    if n_jobs <= 1 or len(args) <= 1:
        return [func(*a) for a in progress(args, desc, verbose)]
    with multiprocessing.Pool(n_jobs) as pool:
        return list(progress(pool.starmap(func, args), desc, verbose, total=len(args)))

#path recorded in artifact headers
def base(path):
    return os.path.basename(os.path.normpath(path)) if path else ''

#print a msg_box with hyperlink
def hprint_msg_box(msg, indent=1, width=None, title=None):
    """Print a message box with clickable hyperlinks for file and directory paths."""
    lines = msg.split('\n')
    space = " " * indent

    if not width:
        width = max(len(line) for line in lines)
        if title:
            width = max(width, len(title))

    box = f'╔{"═" * (width + indent * 2)}╗\n'
    if title:
        box += f'║{space}{title:<{width}}{space}║\n'
        box += f'║{space}{"-" * len(title):<{width}}{space}║\n'

    for line in lines:
        # padding is computed on the plain text, links are added afterwards
        paths = re.findall(r'(/\S+)', line)
        padded_line = f"{line}{' ' * (width - len(line))}"
        for path in paths:
            if os.path.exists(path) and (os.path.isdir(path) or path.endswith((".txt", ".log", ".out", ".csv"))):
                clickable_path = f"\033]8;;file://{path}\033\\{path}\033]8;;\033\\"
                padded_line = padded_line.replace(path, clickable_path)
        box += f'║{space}{padded_line}{space}║\n'

    box += f'╚{"═" * (width + indent * 2)}╝'
    print(box, flush=True)



def format_list_multiline(items, items_per_line=5):
    """Format a list into multiple lines with a comma at the end of each line except the last.
       Returns a single line if the list has fewer items than items_per_line."""
    items = [str(i) for i in items]
    if len(items) <= items_per_line:
        return ", ".join(items)
    formatted_output = []
    total_items = len(items)
    for i in range(0, total_items, items_per_line):
        line = ", ".join(items[i:i + items_per_line])
        if i + items_per_line < total_items:
            line += ","
        formatted_output.append(line)
    return "\n".join(formatted_output)


#print data with keys and values
def print_params(data):
    formatted_output = "Configuration:\n"
    for key, value in data.items():
        if isinstance(value, str) and (value.endswith((".txt", ".log", ".out")) or os.path.isdir(value)):
            # clickable paths
            formatted_output += f"{key}: \033]8;;file://{os.path.abspath(value)}\033\\{value}\033]8;;\033\\\n"
        else:
            formatted_output += f"{key}: {value}\n"
    print(formatted_output, flush=True)
