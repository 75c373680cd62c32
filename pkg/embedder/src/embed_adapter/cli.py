"""Console entry point: embed a JSONL file of titles and abstracts."""

from __future__ import annotations

import argparse
import json
import sys

from embed_adapter.adapter import InputError, TextInput, embed_batch, write_embeddings
from embed_adapter.encoder import DEFAULT_MODEL_ID, ModelLoadError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2


def _read_inputs(path) -> list[TextInput]:
    out: list[TextInput] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{line_no}: invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict) or "paper_id" not in obj or "title" not in obj:
                raise InputError(f"{path}:{line_no}: need paper_id and title keys")
            out.append(
                TextInput(
                    paper_id=obj["paper_id"],
                    title=obj["title"],
                    abstract=obj.get("abstract"),
                )
            )
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed",
        description="Embed paper titles and abstracts into an embeddings file.",
    )
    parser.add_argument("--in", dest="inputs", required=True, metavar="TEXTS_JSONL")
    parser.add_argument("--out", required=True, metavar="EMBEDDINGS_JSONL")
    parser.add_argument("--model-id", default=DEFAULT_MODEL_ID)
    parser.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inputs = _read_inputs(args.inputs)
        vectors, report = embed_batch(
            inputs, model_id=args.model_id, batch_size=args.batch_size
        )
        write_embeddings(args.out, inputs, vectors, report)
    except (InputError, ModelLoadError, OSError) as exc:
        print(f"embed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(
        f"embedded {report.n_inputs} documents with {report.model_id} "
        f"(dim {report.dim}); {len(report.title_only)} title-only"
    )
    return EXIT_OK


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
