"""Line-oriented embedding worker for :class:`SubprocessEmbeddingProvider`.

    python -m kgstress.embed_worker --model all-MiniLM-L6-v2

Loads ``sentence-transformers`` lazily; it is not a package dependency.
``--hashing`` serves the offline hashing embedder instead.
"""
from __future__ import annotations

import argparse
import json
import sys


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="all-MiniLM-L6-v2")
    ap.add_argument("--hashing", action="store_true")
    ap.add_argument("--dimension", type=int, default=384)
    args = ap.parse_args(argv)

    if args.hashing:
        from .embeddings import HashingEmbedder

        hasher = HashingEmbedder(args.dimension)
        model_name, dimension = args.model, args.dimension

        def encode(texts):
            return hasher.embed(texts).tolist()
    else:
        try:
            from sentence_transformers import SentenceTransformer

            st = SentenceTransformer(args.model)
        except Exception as exc:  # model download or import failure
            print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), flush=True)
            return 3
        model_name, dimension = args.model, int(st.get_sentence_embedding_dimension())

        def encode(texts):
            return st.encode(list(texts), convert_to_numpy=True).tolist()

    print(json.dumps({"model": model_name, "dimension": dimension}), flush=True)
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            print(json.dumps({"vectors": encode(req["texts"])}), flush=True)
        except Exception as exc:
            print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
