"""framebridge command line: embed, score, serve.

Exit codes: 0 success, 1 usage or validation failure, 2 missing model
weights, 3 decode or file I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .embed import make_embed_backend, write_embeddings
from .errors import BridgeError, UsageError
from .score import make_score_backend, write_scores
from .serve import build_model, serve


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def parse_indices(spec: str) -> list[int]:
    """Comma-separated frame indices; a token may be a start:stop[:step]
    range (half-open, like python slices)."""
    out: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            raise UsageError(f"empty token in indices spec {spec!r}")
        try:
            if ":" in token:
                parts = [int(p) for p in token.split(":")]
                if len(parts) == 2:
                    parts.append(1)
                if len(parts) != 3 or parts[2] <= 0:
                    raise ValueError
                out.extend(range(parts[0], parts[1], parts[2]))
            else:
                out.append(int(token))
        except ValueError:
            raise UsageError(f"bad indices token {token!r}") from None
    return out


def build_parser() -> _Parser:
    parser = _Parser(prog="framebridge", description=__doc__)
    commands = parser.add_subparsers(dest="command", metavar="command")

    embed = commands.add_parser("embed", help="write a per-frame embedding file")
    embed.add_argument("--video", required=True)
    embed.add_argument(
        "--indices", required=True, help="pool frame indices, e.g. 0,10,20 or 0:1000:2"
    )
    embed.add_argument("--out", required=True, help="output .emb.femb path")
    embed.add_argument("--backend", default="pixel", choices=["pixel", "clip"])
    embed.add_argument("--weights", default=None, help="local weights directory (clip)")
    embed.set_defaults(func=cmd_embed)

    score = commands.add_parser("score", help="write a per-frame importance score file")
    score.add_argument("--video", required=True)
    score.add_argument("--indices", required=True)
    score.add_argument("--out", required=True, help="output .score.femb path")
    score.add_argument("--backend", default="motion", choices=["motion", "csta"])
    score.add_argument("--weights", default=None, help="local checkpoint file (csta)")
    score.set_defaults(func=cmd_score)

    server = commands.add_parser("serve", help="speak the adapter wire protocol on stdio")
    server.add_argument("--model", required=True, help="model spec, e.g. fixed:A")
    server.set_defaults(func=cmd_serve)
    return parser


def cmd_embed(args: argparse.Namespace) -> int:
    indices = parse_indices(args.indices)
    backend = make_embed_backend(args.backend, args.weights)
    write_embeddings(args.video, indices, args.out, backend)
    print(f"wrote {args.out} ({len(indices)} frames, backend {backend.name})")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    indices = parse_indices(args.indices)
    backend = make_score_backend(args.backend, args.weights)
    write_scores(args.video, indices, args.out, backend)
    print(f"wrote {args.out} ({len(indices)} frames, backend {backend.name})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    serve(build_model(args.model))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.error("a command is required (embed, score, serve)")
        return args.func(args)
    except BridgeError as exc:
        print(f"framebridge: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"framebridge: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
