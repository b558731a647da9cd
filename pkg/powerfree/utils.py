import itertools
import json
import os
import sys
import threading
import time
from contextlib import contextmanager

import pandas as pd

from powerfree import __version__


"""
    Utility functions: exceptions, progress output, provenance and file
    input/output shared by the library and the command line
"""

THREADS_ENV_VAR = "POWER_FREE_THREADS"

# marker returned by checkers whose hypotheses do not hold
PRECONDITION_FAILED = "precondition-failed"


class InvalidArgumentError(ValueError):
    def __init__(self, message="Invalid argument"):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return self.message


class UncertifiedGraphError(InvalidArgumentError):
    def __init__(self, certificate):
        super().__init__(f"graph is not certified '{certificate}'; run the "
                         "matching certifier before using it")
        self.certificate = certificate


class ResourceLimitError(Exception):
    def __init__(self, what, limit, value):
        super().__init__()
        self.message = f"'{what}' = {value} exceeds the supported limit of " \
            f"{limit}"

    def __str__(self):
        return self.message


class MalformedInputError(Exception):
    def __init__(self, filepath, reason):
        super().__init__()
        self.message = f"cannot read '{filepath}': {reason}"

    def __str__(self):
        return self.message


def process_print(print_message):
    t = threading.current_thread()
    try:
        for c in itertools.cycle(['|', '/', '-', '\\']):
            if not getattr(t, "running", True):
                sys.stderr.write("\n")
                break
            sys.stderr.write(f"\r {print_message} {c}")
            sys.stderr.flush()
            time.sleep(0.1)
    except KeyboardInterrupt:
        sys.exit(1)


@contextmanager
def spinner(print_message):
    """
        Runs process_print in a separate thread for the duration of the
        block; silent unless stderr is a terminal
    """
    if not sys.stderr.isatty():
        yield
        return
    t = threading.Thread(target=process_print, args=(print_message,),
                         daemon=True)
    t.start()
    try:
        yield
    finally:
        t.running = False
        t.join()


def progress(message):
    """
        Prints a progress message to stderr, keeping stdout free for
        results
    """
    print(message, file=sys.stderr)


def format_warning(message, category, filename, lineno, file=None, line=None):
    return '%s:%s: %s:%s\n' % (filename, lineno, category.__name__, message)


def default_threads():
    """
        Number of worker processes taken from the environment, 1 if
        unset
    """
    value = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        threads = int(value)
    except ValueError:
        raise InvalidArgumentError(f"Invalid {THREADS_ENV_VAR} '{value}': "
                                   "must be a positive integer")
    if threads < 1:
        raise InvalidArgumentError(f"Invalid {THREADS_ENV_VAR} '{value}': "
                                   "must be a positive integer")
    return threads


def provenance(command, seed=None):
    """
        Header attached to every output: command line, seed and
        library version. No timestamps so that reruns are byte-identical.
    """
    return {"command": command, "seed": seed, "version": __version__}


def to_json_str(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(obj, filepath=None):
    """
        Writes obj as JSON with sorted keys to filepath, or to stdout if
        filepath is None
    """
    text = to_json_str(obj)
    if filepath is None:
        sys.stdout.write(text)
    else:
        with open(filepath, "w") as f:
            f.write(text)


def write_text(lines, filepath=None):
    text = "".join(f"{line}\n" for line in lines)
    if filepath is None:
        sys.stdout.write(text)
    else:
        with open(filepath, "w") as f:
            f.write(text)


def df_to_csv(df, filepath=None, header=None):
    """
        Save df to csv, optionally preceded by a '# ' comment line. Use
        csv_to_df to read it back.
    """
    text = df.to_csv(index=False, lineterminator="\n")
    if header is not None:
        text = f"# {json.dumps(header, sort_keys=True)}\n" + text
    if filepath is None:
        sys.stdout.write(text)
    else:
        with open(filepath, "w") as f:
            f.write(text)


def csv_to_df(filepath):
    return pd.read_csv(filepath, comment="#")


def read_set_file(filepath):
    """
        Reads a candidate set written by the 'construct' command: either
        the set JSON document or newline-delimited integers.

        Parameters:
            filepath (str): path to the file

        Returns:
            document (dict): at least an 'elements' key holding a sorted
            list of distinct positive integers
    """
    try:
        with open(filepath) as f:
            text = f.read()
    except OSError as e:
        raise MalformedInputError(filepath, e.strerror)
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            document = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise MalformedInputError(filepath, f"invalid JSON ({e.msg})")
        if not isinstance(document, dict) or "elements" not in document:
            raise MalformedInputError(filepath, "missing 'elements' key")
        elements = document["elements"]
    else:
        document = {}
        try:
            elements = [int(line) for line in stripped.splitlines()
                        if line.strip() and not line.startswith("#")]
        except ValueError:
            raise MalformedInputError(filepath, "expected one integer per line")
    if not isinstance(elements, list) or \
            not all(isinstance(a, int) and not isinstance(a, bool) and a >= 1
                    for a in elements):
        raise MalformedInputError(filepath,
                                  "'elements' must be positive integers")
    document["elements"] = sorted(set(elements))
    return document
