"""Command-line client for the snapilp service.

Every subcommand is a thin wrapper over one or two HTTP endpoints.  By
default the app runs in-process, so no server needs to be up; pass
``--server http://host:port`` to talk to a remote instance instead.

Task arguments accept either a bundled task name or a directory holding
bk.pl, exs.pl and bias.toml.  Directories are read here, client-side, and
shipped as inline text, so a remote server never sees local paths.

Exit codes: 0 success, 1 usage error, 2 task/data error, 3 resource-limit
abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .parser import TASK_FILES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RESOURCE = 3

COST_NAMES = ("mdl", "errorsize", "lexfnsize")
FILTER_NAMES = ("full", "optimal", "final")


class CliError(Exception):
    """Carries an exit code alongside the message."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; our contract reserves 2 for
    # task/data problems, so usage errors are remapped to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


class Client:
    """Uniform POST/GET wrapper over in-process and remote transports."""

    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._http = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                # the in-process transport is an implementation detail;
                # its import-time deprecation chatter is not the user's
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._http = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        return self._handle(self._http.post(path, json=payload))

    def get(self, path: str) -> dict:
        return self._handle(self._http.get(path))

    @staticmethod
    def _handle(response) -> dict:
        if response.status_code == 200:
            return response.json()
        if response.status_code == 422:
            raise CliError(
                "invalid request: %s" % response.text, EXIT_USAGE
            )
        try:
            error = response.json()["error"]
        except Exception:
            raise CliError(
                "server returned %d: %s" % (response.status_code, response.text),
                EXIT_USAGE,
            )
        code = EXIT_RESOURCE if error.get("kind") == "resource" else EXIT_DATA
        raise CliError(error.get("message", "unknown error"), code)


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers")


def _task_payload(value: str) -> dict:
    """Turn a task argument into a request payload.

    A directory is read here and sent inline; anything else is passed
    through as a bundled task name for the server to resolve.
    """
    if os.path.isdir(value):
        texts = {}
        for fname in TASK_FILES:
            path = os.path.join(value, fname)
            if not os.path.isfile(path):
                raise CliError(
                    "task directory %r is missing %s" % (value, fname),
                    EXIT_DATA,
                )
            with open(path, "r", encoding="utf-8") as fh:
                texts[fname] = fh.read()
        return {
            "name": os.path.basename(os.path.normpath(value)),
            "bk": texts["bk.pl"],
            "exs": texts["exs.pl"],
            "bias": texts["bias.toml"],
        }
    return {"name": value}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(payload: dict, out: Optional[str]) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", out)


_GLOBAL_DEFAULTS = {
    "server": None,
    "out": None,
    "seed": 1,
    "timeout": 10.0,
    "jobs": 1,
}


def _global_flags(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a flag given before the subcommand from being
    # clobbered by the subparser's default; real defaults are filled in
    # after parsing.
    parser.add_argument("--server", default=argparse.SUPPRESS,
                        help="base URL of a running service "
                             "(default: run in-process)")
    parser.add_argument("--out", default=argparse.SUPPRESS, metavar="PATH",
                        help="write output to this file instead of stdout")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="default trial seed (default: 1)")
    parser.add_argument("--timeout", type=float, default=argparse.SUPPRESS,
                        metavar="SEC",
                        help="search budget per run in seconds (default: 10)")
    parser.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="parallel workers for bench (default: 1)")


def build_parser() -> _Parser:
    parser = _Parser(prog="snapilp",
                     description="Snapshot-ensemble rule learning toolkit.")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text, description=help_text)
        _global_flags(p)
        return p

    p = add("learn", "run one search and print the best hypothesis")
    p.add_argument("--task", required=True,
                   help="bundled task name or task directory")
    p.add_argument("--cost", choices=COST_NAMES, default="mdl")

    p = add("ensemble", "pool snapshots from one search and weight them")
    p.add_argument("--task", required=True)
    p.add_argument("--cost", choices=COST_NAMES, default="mdl")
    p.add_argument("--alpha", type=float, default=None,
                   help="cost weighting strength (default: 0.0017)")
    p.add_argument("--beta", type=float, default=None,
                   help="coverage exponent (default: 2)")
    p.add_argument("--filter", choices=FILTER_NAMES, default="full",
                   help="pool filter before weighting")

    p = add("bag", "train a bootstrap-resampling ensemble")
    p.add_argument("--task", required=True)
    p.add_argument("--cost", choices=COST_NAMES, default="mdl")
    p.add_argument("--bags", type=int, default=3)
    p.add_argument("--seeds", type=_int_list, default=None, metavar="A,B,...",
                   help="one bootstrap seed per bag (default: 43,44,...)")

    p = add("bench", "sweep tasks x cost functions x seeds and report")
    p.add_argument("--tasks", nargs="+", required=True, metavar="TASK")
    p.add_argument("--costs", nargs="+", choices=COST_NAMES,
                   default=["mdl"], metavar="FN")
    p.add_argument("--seeds", type=_int_list, default=None, metavar="A,B,...",
                   help="trial seeds (default: the global --seed)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--filter", choices=FILTER_NAMES, default="full")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("sweep-alpha", "score the weighting-strength grid on "
                           "validation accuracy")
    p.add_argument("--tasks", nargs="+", required=True, metavar="TASK")
    p.add_argument("--costs", nargs="+", choices=COST_NAMES,
                   default=["mdl"], metavar="FN")
    p.add_argument("--seeds", type=_int_list, default=None, metavar="A,B,...")
    p.add_argument("--alphas", type=_float_list, default=None,
                   metavar="A,B,...",
                   help="grid to sweep (default: the built-in grid)")

    p = add("report", "render benchmark rows as CSV or JSON")
    p.add_argument("--rows", required=True, metavar="PATH",
                   help="JSON file: an array of rows, or an object "
                        "with a 'rows' key")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("serve", "run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    p = add("export-tasks", "write bundled tasks out as task directories")
    p.add_argument("--dest", required=True, metavar="DIR")
    p.add_argument("--names", nargs="*", default=None, metavar="NAME",
                   help="bundled tasks to export (default: all)")

    return parser


def _cmd_learn(client: Client, args) -> None:
    result = client.post("/learn", {
        "task": _task_payload(args.task),
        "cost_fn": args.cost,
        "timeout": args.timeout,
    })
    _emit_json(result, args.out)


def _cmd_ensemble(client: Client, args) -> None:
    payload = {
        "task": _task_payload(args.task),
        "cost_fn": args.cost,
        "timeout": args.timeout,
        "pool_filter": args.filter,
    }
    if args.alpha is not None:
        payload["alpha"] = args.alpha
    if args.beta is not None:
        payload["beta"] = args.beta
    _emit_json(client.post("/ensemble", payload), args.out)


def _cmd_bag(client: Client, args) -> None:
    payload = {
        "task": _task_payload(args.task),
        "cost_fn": args.cost,
        "timeout": args.timeout,
        "bags": args.bags,
    }
    if args.seeds is not None:
        payload["seeds"] = args.seeds
    _emit_json(client.post("/bag", payload), args.out)


def _cmd_bench(client: Client, args) -> None:
    payload = {
        "tasks": [_task_payload(t) for t in args.tasks],
        "cost_fns": args.costs,
        "seeds": args.seeds if args.seeds is not None else [args.seed],
        "timeout": args.timeout,
        "pool_filter": args.filter,
        "jobs": args.jobs,
    }
    if args.alpha is not None:
        payload["alpha"] = args.alpha
    if args.beta is not None:
        payload["beta"] = args.beta
    rows = client.post("/bench", payload)["rows"]
    rendered = client.post("/report", {"rows": rows, "fmt": args.format})
    _emit(rendered["content"], args.out)


def _cmd_sweep_alpha(client: Client, args) -> None:
    payload = {
        "tasks": [_task_payload(t) for t in args.tasks],
        "cost_fns": args.costs,
        "seeds": args.seeds if args.seeds is not None else [args.seed],
        "timeout": args.timeout,
    }
    if args.alphas is not None:
        payload["alphas"] = args.alphas
    _emit_json(client.post("/sweep-alpha", payload), args.out)


def _cmd_report(client: Client, args) -> None:
    try:
        with open(args.rows, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise CliError("cannot read rows file: %s" % e, EXIT_DATA)
    except json.JSONDecodeError as e:
        raise CliError("rows file is not valid JSON: %s" % e, EXIT_DATA)
    rows = data.get("rows") if isinstance(data, dict) else data
    if not isinstance(rows, list):
        raise CliError(
            "rows file must hold a JSON array or an object with a "
            "'rows' key", EXIT_DATA)
    rendered = client.post("/report", {"rows": rows, "fmt": args.format})
    _emit(rendered["content"], args.out)


def _cmd_serve(args) -> None:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)


def _cmd_export_tasks(args) -> None:
    from .logic import SnapilpError
    from .tasks import BUNDLED_NAMES, bundled_files, export_task

    names = args.names if args.names else list(BUNDLED_NAMES)
    try:
        for name in names:
            export_task(bundled_files(name), os.path.join(args.dest, name))
    except SnapilpError as e:
        raise CliError(str(e), EXIT_DATA)
    _emit("exported %d task(s) to %s\n" % (len(names), args.dest), args.out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)

    try:
        if args.command == "serve":
            _cmd_serve(args)
            return EXIT_OK
        if args.command == "export-tasks":
            _cmd_export_tasks(args)
            return EXIT_OK

        client = Client(args.server)
        handler = {
            "learn": _cmd_learn,
            "ensemble": _cmd_ensemble,
            "bag": _cmd_bag,
            "bench": _cmd_bench,
            "sweep-alpha": _cmd_sweep_alpha,
            "report": _cmd_report,
        }[args.command]
        handler(client, args)
    except CliError as e:
        print("snapilp: error: %s" % e, file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
