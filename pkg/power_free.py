import argparse
import json
import math
import shlex
import sys
import warnings

import mpmath
import pandas as pd

import powerfree.utils as utils
import powerfree.capset as capset
import powerfree.constants as constants
import powerfree.constructions as constructions
import powerfree.graphs as graphs
import powerfree.verify as verify

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_WITNESS = 10

# command line spellings of the verify/oracle modes
MODE_ALIASES = {"f": "gamma", "gamma": "gamma", "F": "P", "P": "P"}
GRAPH_KINDS = ("incidence", "polarity", "brown", "greedy", "k33free")
MAX_GIRTH_REPORT_VERTICES = 2000


def _mode(mode):
    try:
        return MODE_ALIASES[mode]
    except KeyError:
        raise utils.InvalidArgumentError(
            f"Invalid mode '{mode}': must be one of: "
            f"{', '.join(MODE_ALIASES)}")


def _threads(threads):
    return utils.default_threads() if threads is None else int(threads)


def _require(**kwargs):
    missing = [key for key, val in kwargs.items() if val is None]
    if missing:
        raise utils.InvalidArgumentError(
            f"missing required argument(s): {', '.join(missing)}")


def cmd_constants(argv, which=None, r=None, format="json", out=None,
                  **kwargs):
    """
        Enclosures of c_{3,3} (which='c33') and C_{3,3} ('C33'), the
        constant c0 and the Euler product tail ('tail')

        Returns:
            exit code (int)
    """
    print("\n## Constants ##\n", file=sys.stderr)
    _require(which=which)
    r = 4 if r is None else r
    report = {"provenance": utils.provenance(argv),
              "digits": constants.DIGITS}
    if which in ("c33", "C33"):
        lower_name, upper_name = ("beta", "gamma") if which == "c33" \
            else ("B", "Gamma")
        with utils.spinner(f"computing {which} bounds for r = {r}"):
            bounds = constants.enclosures(r)
        lower, upper = bounds[lower_name], bounds[upper_name]
        report.update({"name": which, "r": r,
                       "lower": float(lower.lower),
                       "upper": float(upper.upper),
                       "lower_digits": mpmath.nstr(lower.lower,
                                                   constants.DIGITS),
                       "upper_digits": mpmath.nstr(upper.upper,
                                                   constants.DIGITS),
                       "bounds": {name: bound.to_dict()
                                  for name, bound in bounds.items()}})
    elif which == "c0":
        alpha, value = constants.c0_by_max()
        closed = constants.c0_closed_form()
        report.update({"name": which, "value": float(closed),
                       "value_digits": mpmath.nstr(closed, constants.DIGITS),
                       "maximised_value": float(value),
                       "argmax": float(alpha),
                       "alpha_star": float(constants.alpha_star())})
    elif which == "tail":
        tail = constants.euler_product_tail(r)
        report.update({"name": which, "r": r, "value": float(tail.mid)})
        report.update(tail.to_dict())
    else:
        raise utils.InvalidArgumentError(
            f"Invalid which '{which}': must be one of: c33, C33, c0, tail")
    if format == "text":
        if which in ("c33", "C33"):
            utils.write_text([report["lower"], report["upper"]], out)
        else:
            utils.write_text([report["value"]], out)
    else:
        utils.write_json(report, out)
    return EXIT_OK


def cmd_table(argv, which=None, r=None, i_max=None, format="csv", out=None,
              report=False, threads=None, **kwargs):
    """
        Threshold table of s_r (which='s') or S_r ('S') as i_lo, i_hi,
        value rows; with report, the saturation report instead
    """
    print("\n## Threshold table ##\n", file=sys.stderr)
    _require(which=which)
    if which not in ("s", "S"):
        raise utils.InvalidArgumentError(
            f"Invalid which '{which}': must be one of: s, S")
    r = 4 if r is None else r
    weighted = which == "S"
    threads = _threads(threads)
    header = {"provenance": utils.provenance(argv)}
    if report:
        with utils.spinner(f"locating saturation of {which}_{r}"):
            summary = capset.saturation_report(r, weighted, threads)
        summary["provenance"] = header["provenance"]
        utils.write_json(summary, out)
        return EXIT_OK
    print(f"\tsolving {which}_{r}(i) ... \n", file=sys.stderr)
    with utils.spinner(f"solving {which}_{r}(i)"):
        df = capset.threshold_table(r, weighted, i_max, threads)
    if i_max is not None and not df.empty and \
            df["i_hi"].notna().iloc[-1]:
        warnings.warn(f"table of {which}_{r} stops at i = {i_max}, before "
                      "saturation")
    if format == "json":
        header["rows"] = [{"i_lo": int(row.i_lo),
                           "i_hi": None if pd.isna(row.i_hi)
                           else int(row.i_hi),
                           "value": int(row.value)}
                          for row in df.itertuples()]
        utils.write_json(header, out)
    else:
        utils.df_to_csv(df, out, header=header)
    return EXIT_OK


def cmd_oracle(argv, n=None, k=None, d=None, mode=None, witness=False,
               format="text", out=None, threads=None, **kwargs):
    """
        Exact F_{k,d}(n) (mode F or P) or f_{k,d}(n) (mode f or gamma)
    """
    print("\n## Oracle ##\n", file=sys.stderr)
    _require(n=n, k=k)
    d = 3 if d is None else d
    mode = _mode("f" if mode is None else mode)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        with utils.spinner(f"solving the {mode} oracle at n = {n}"):
            result = verify.oracle(n, k, d, mode, _threads(threads))
    if format == "json":
        document = result.to_dict()
        if not witness:
            document.pop("witness_set", None)
        document["provenance"] = utils.provenance(argv)
        utils.write_json(document, out)
    else:
        lines = [result.value]
        if witness:
            lines.append(" ".join(str(a) for a in result.witness_set))
        utils.write_text(lines, out)
    return EXIT_OK


def cmd_construct(argv, family=None, n=None, out=None, format="json",
                  report=False, seed=None, threads=None, **params):
    """
        Builds a candidate set and writes it as the set JSON document or
        as newline-delimited integers; with report, the density report
    """
    print("\n## Construct ##\n", file=sys.stderr)
    _require(family=family, n=n)
    seed = 0 if seed is None else seed
    threads = _threads(threads)
    header = {"provenance": utils.provenance(argv, seed)}
    params = {key: val for key, val in params.items() if val is not None}
    if report:
        df = constructions.density_report(family, n, threads)
        utils.df_to_csv(df, out, header=header)
        return EXIT_OK
    print(f"\tbuilding {family} up to {n} ... \n", file=sys.stderr)
    with utils.spinner(f"building {family}"):
        candidate = constructions.build(family, n, seed=seed,
                                        threads=threads, **params)
    if format == "text":
        utils.write_text(candidate.to_lines(), out)
    else:
        document = candidate.to_dict()
        document.update(header)
        utils.write_json(document, out)
    return EXIT_OK


def cmd_verify(argv, input=None, k=None, d=None, mode=None, method=None,
               format="json", out=None, **kwargs):
    """
        Checks a set file for property P_{k,d} or gamma_{k,d} using only
        the file; exit code 10 when a witness is found
    """
    print("\n## Verify ##\n", file=sys.stderr)
    _require(input=input, k=k)
    d = 3 if d is None else d
    mode = _mode("P" if mode is None else mode)
    method = method or "search"
    elements = utils.read_set_file(input)["elements"]
    print(f"\tchecking {len(elements)} elements ... \n", file=sys.stderr)
    with utils.spinner("searching for a solution"):
        if mode == "P":
            found = verify.has_property_P(elements, k, d, method)
        else:
            found = verify.has_property_gamma(elements, k, d, method)
    if found is not None and \
            not verify.reverify(found, elements, k, d, mode):
        raise utils.InvalidArgumentError(
            "internal error: witness failed the independent re-check")
    if format == "text":
        lines = ["holds" if found is None else "witness"]
        if found is not None:
            lines.append(" ".join(str(a) for a in found.elements))
        utils.write_text(lines, out)
    else:
        utils.write_json({"input": input, "k": k, "d": d, "mode": mode,
                          "size": len(elements), "holds": found is None,
                          "witness": None if found is None
                          else found.to_dict(),
                          "provenance": utils.provenance(argv)}, out)
    return EXIT_OK if found is None else EXIT_WITNESS


def cmd_graph(argv, kind=None, q=None, t=None, girth=None, n=None, seed=None,
              format="json", out=None, **kwargs):
    """
        Builds and certifies one of the graphs behind the constructions
    """
    print("\n## Graph ##\n", file=sys.stderr)
    _require(kind=kind)
    seed = 0 if seed is None else seed
    if kind in ("incidence", "polarity", "brown"):
        _require(q=q)
        builder = {"incidence": graphs.incidence_graph_pg,
                   "polarity": graphs.polarity_graph,
                   "brown": graphs.brown_graph}[kind]
        G = builder(q)
    elif kind == "greedy":
        _require(t=t, girth=girth)
        G = graphs.greedy_high_girth(t, girth, seed)
    elif kind == "k33free":
        _require(n=n)
        G = constructions.k33_free_prime_graph(n, seed)
    else:
        raise utils.InvalidArgumentError(
            f"Invalid kind '{kind}': must be one of: "
            f"{', '.join(GRAPH_KINDS)}")
    if format == "dot":
        utils.write_text([graphs.to_dot(G).rstrip("\n")], out)
    else:
        document = graphs.graph_to_dict(G)
        document["name"] = G.graph.get("name", kind)
        if G.number_of_nodes() <= MAX_GIRTH_REPORT_VERTICES:
            shortest = graphs.girth(G)
            document["girth"] = None if shortest == math.inf \
                else int(shortest)
        document["provenance"] = utils.provenance(argv, seed)
        utils.write_json(document, out)
    return EXIT_OK


class _ConfigParser(argparse.ArgumentParser):
    """
        Parser for the options read from a config file; a bad option
        becomes an InvalidArgumentError instead of a usage exit
    """
    def error(self, message):
        raise utils.InvalidArgumentError(f"config: {message}")


def _add_common(subparser, formats, default_format, threads=False,

                seed=False):
    subparser.add_argument("--config", default=None, help="path to \
        configuration file, a JSON object keyed by option name")
    subparser.add_argument("--format", choices=formats, default=None,
                           help=f"output format (default {default_format})")
    subparser.add_argument("--out", "-o", default=None,
                           help="output file (default stdout)")
    if threads:
        subparser.add_argument("--threads", "-j", type=int, default=None,
                               help=f"worker processes (default \
                               ${utils.THREADS_ENV_VAR} or 1)")
    if seed:
        subparser.add_argument("--seed", type=int, default=None,
                               help="random seed (default 0)")


def build_parser(parser_class=argparse.ArgumentParser):
    """
        Parser with one sub-command per computation
    """
    parser = parser_class(prog="power-free")
    subparsers = parser.add_subparsers(help="sub-command help",
                                       dest="subcommand",
                                       parser_class=parser_class)

    # constants
    subparser = subparsers.add_parser('constants', help='enclosures of \
        c_{3,3}, C_{3,3}, c0 and the Euler product tail')
    subparser.add_argument("--which", choices=("c33", "C33", "c0", "tail"),
                           default=None)
    subparser.add_argument("--r", type=int, default=None,
                           help="number of primes (default 4)")
    _add_common(subparser, ("json", "text"), "json")
    subparser.set_defaults(func=cmd_constants)

    # threshold tables
    subparser = subparsers.add_parser('table', help='threshold table of \
        s_r or S_r')
    subparser.add_argument("--which", choices=("s", "S"), default=None)
    subparser.add_argument("--r", type=int, default=None,
                           help="number of primes (default 4)")
    subparser.add_argument("--i-max", dest="i_max", type=int, default=None,
                           help="last i covered (default N, or 8N for S)")
    subparser.add_argument("--report", action="store_true", default=None,
                           help="saturation report instead of the table")
    _add_common(subparser, ("csv", "json"), "csv", threads=True)
    subparser.set_defaults(func=cmd_table)

    # oracle
    subparser = subparsers.add_parser('oracle', help='exact F_{k,d}(n) or \
        f_{k,d}(n) for small n')
    subparser.add_argument("--n", type=int, default=None)
    subparser.add_argument("--k", type=int, default=None)
    subparser.add_argument("--d", type=int, default=None,
                           help="exponent (default 3)")
    subparser.add_argument("--mode", choices=tuple(MODE_ALIASES),
                           default=None, help="f/gamma or F/P (default f)")
    subparser.add_argument("--witness", action="store_true", default=None,
                           help="also print an extremal set")
    _add_common(subparser, ("text", "json"), "text", threads=True)
    subparser.set_defaults(func=cmd_oracle)

    # constructions
    subparser = subparsers.add_parser('construct', help='builds a \
        candidate set')
    subparser.add_argument("--family", choices=tuple(constructions.FAMILIES),
                           default=None)
    subparser.add_argument("--n", type=int, default=None)
    subparser.add_argument("--r", type=int, default=None, help="k3")
    subparser.add_argument("--weighted", action="store_true", default=None,
                           help="k3")
    subparser.add_argument("--exponent", type=float, default=None,
                           help="k4 window exponent (default 16)")
    subparser.add_argument("--k", type=int, default=None,
                           help="k3kf, bc, alpha, divisor_removal")
    subparser.add_argument("--d", type=int, default=None,
                           help="k1, alpha, divisor_removal")
    subparser.add_argument("--alpha", type=float, default=None,
                           help="alpha (default 1/(1+sqrt e))")
    subparser.add_argument("--mode", choices=("f", "F"), default=None,
                           help="k2")
    subparser.add_argument("--q", type=int, default=None,
                           help="k3kf projective plane order")
    subparser.add_argument("--report", action="store_true", default=None,
                           help="density report instead of the set")
    _add_common(subparser, ("json", "text"), "json", threads=True,
                seed=True)
    subparser.set_defaults(func=cmd_construct)

    # verification
    subparser = subparsers.add_parser('verify', help='checks a set file \
        for P_{k,d} or gamma_{k,d}; exit code 10 on a witness')
    subparser.add_argument("--input", "-i", default=None,
                           help="set JSON or newline-delimited integers")
    subparser.add_argument("--k", type=int, default=None)
    subparser.add_argument("--d", type=int, default=None,
                           help="exponent (default 3)")
    subparser.add_argument("--mode", choices=tuple(MODE_ALIASES),
                           default=None, help="P/F or gamma/f (default P)")
    subparser.add_argument("--method", choices=verify.METHODS, default=None,
                           help="search engine (default search)")
    _add_common(subparser, ("json", "text"), "json")
    subparser.set_defaults(func=cmd_verify)

    # graphs
    subparser = subparsers.add_parser('graph', help='builds and certifies \
        a graph')
    subparser.add_argument("--kind", choices=GRAPH_KINDS, default=None)
    subparser.add_argument("--q", type=int, default=None,
                           help="field order (incidence, polarity, brown)")
    subparser.add_argument("--t", type=int, default=None,
                           help="vertex count (greedy)")
    subparser.add_argument("--girth", type=int, default=None,
                           help="forbidden cycle bound (greedy)")
    subparser.add_argument("--n", type=int, default=None,
                           help="range bound (k33free)")
    _add_common(subparser, ("json", "dot"), "json", seed=True)
    subparser.set_defaults(func=cmd_graph)
    return parser


def parse_args(argv):
    parser = build_parser()
    kwargs = vars(parser.parse_args(argv))
    if "func" not in kwargs:
        parser.print_help(sys.stderr)
        sys.exit(EXIT_ERROR)
    return kwargs


def _config_options(subcommand, options, known):
    """
        Converts config file options with the sub-command's own parser,
        so they get the same types and choices as on the command line
    """
    unknown = sorted(set(options) - known)
    if unknown:
        raise utils.InvalidArgumentError(
            f"config: unknown option(s) for '{subcommand}': "
            f"{', '.join(map(str, unknown))}")
    tokens = [subcommand]
    for key, val in options.items():
        flag = "--" + key.replace("_", "-")
        if val is True:
            tokens.append(flag)
        elif val is not None and val is not False:
            tokens.extend([flag, str(val)])
    kwargs = vars(build_parser(_ConfigParser).parse_args(tokens))
    kwargs.pop("config")
    return kwargs


def resolve_config(config=None, **kwargs):
    """
        Replaces the options by the contents of the config file, which is
        incompatible with any option given explicitly
    """
    func = kwargs.pop("func")
    subcommand = kwargs.pop("subcommand")
    if config:
        error_keys = [key for key, val in kwargs.items() if val is not None]
        # if any arguments provided with --config
        if any(error_keys):
            raise utils.InvalidArgumentError(
                f"arguments '{', '.join(error_keys)}' are incompatible "
                "with the 'config' argument")
        try:
            with open(config) as f:
                options = json.load(f)
        except OSError as e:
            raise utils.MalformedInputError(config, e.strerror)
        except json.JSONDecodeError as e:
            raise utils.MalformedInputError(config, f"invalid JSON ({e.msg})")
        if not isinstance(options, dict):
            raise utils.MalformedInputError(config, "expected a JSON object")
        kwargs = _config_options(subcommand, options, set(kwargs))
        kwargs.pop("func")
        kwargs.pop("subcommand")
    # remove unset options so the defaults of func apply
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return func, kwargs


def main(argv=None):
    """
        Runs one sub-command

        Returns:
            exit code (int): 0 on success, 10 when verify finds a
            witness, 2 on errors
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    warnings.formatwarning = utils.format_warning
    kwargs = parse_args(argv)
    command = " ".join(["power-free"] + [shlex.quote(a) for a in argv])
    try:
        func, kwargs = resolve_config(**kwargs)
        return func(command, **kwargs)
    except (utils.InvalidArgumentError, utils.ResourceLimitError,
            utils.MalformedInputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
