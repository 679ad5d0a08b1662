"""Command-line launcher for the embedding sidecar."""

from __future__ import annotations

import argparse
import sys

import uvicorn

from embedsidecar.app import DEFAULT_MAX_TEXT_LENGTH, create_app
from embedsidecar.models import DEFAULT_MODEL_ID, SidecarStartupError, create_model


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-sidecar",
        description=(
            "Serve POST /embed and GET /health over HTTP using a "
            "sentence-embedding model."
        ),
    )
    parser.add_argument(
        "--model",
        default=DEFAULT_MODEL_ID,
        help=(
            "model id: a sentence-transformers name, or 'hash'/'hash:<dim>' "
            f"for the offline hash model (default: {DEFAULT_MODEL_ID})"
        ),
    )
    parser.add_argument("--host", default="127.0.0.1", help="bind address")
    parser.add_argument("--port", type=int, default=8601, help="bind port")
    parser.add_argument(
        "--max-text-length",
        type=int,
        default=DEFAULT_MAX_TEXT_LENGTH,
        help=f"reject longer texts with 400 (default: {DEFAULT_MAX_TEXT_LENGTH})",
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.max_text_length < 1:
        parser.error("--max-text-length must be >= 1")
    try:
        model = create_model(args.model)
    except SidecarStartupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    app = create_app(model, max_text_length=args.max_text_length)
    print(
        f"serving model {model.model_id} (dim={model.dim}) "
        f"on http://{args.host}:{args.port}",
        file=sys.stderr,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
