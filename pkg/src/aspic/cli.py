"""Command line entry point: interactive shell by default, session service
with --serve."""

from __future__ import annotations

import argparse
from typing import Optional, Sequence


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="aspic",
        description="Interactive answer-set-programming shell and session service.",
    )
    parser.add_argument("files", nargs="*", help="program files loaded at startup")
    parser.add_argument(
        "--serve", action="store_true", help="run the JSON session service"
    )
    parser.add_argument(
        "--host", default="127.0.0.1", help="service bind address (default %(default)s)"
    )
    parser.add_argument(
        "--port", type=int, default=8750, help="HTTP/WebSocket port (default %(default)s)"
    )
    parser.add_argument(
        "--tcp-port",
        type=int,
        default=None,
        help="newline-delimited JSON TCP port (default: --port + 1)",
    )
    parser.add_argument(
        "--assets", default=None, help="directory of web console files to serve"
    )
    args = parser.parse_args(argv)
    if args.serve:
        from .service import run_server

        run_server(args.host, args.port, args.tcp_port, args.assets, preload=args.files)
        return 0
    from .shell import run_repl

    return run_repl(args.files)


if __name__ == "__main__":
    raise SystemExit(main())
