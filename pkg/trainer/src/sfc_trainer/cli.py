"""Command line driver: train a classifier, export golden vectors."""

import argparse
import json
import logging
import sys
import time

from sfc_trainer.data import DatasetFormatError
from sfc_trainer.goldens import export_goldens
from sfc_trainer.sfcw import WeightFormatError
from sfc_trainer.train import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfc-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a dataset file, write weights")
    p.add_argument("--data", required=True, help="dataset file (.sfcd)")
    p.add_argument("--out", default="sfc.sfcw", help="weight file to write")
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--split", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-decay", type=float, default=1e-3)
    p.add_argument("--input-noise", type=float, default=0.0)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--metrics", help="also write the metrics report as JSON")

    p = sub.add_parser("goldens", help="export golden vectors for parity checks")
    p.add_argument("--weights", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--out", default="goldens.json")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = TrainConfig(
                epochs=args.epochs,
                batch_size=args.batch,
                lr=args.lr,
                split=args.split,
                seed=args.seed,
                weight_decay=args.weight_decay,
                input_noise=args.input_noise,
                dropout=args.dropout,
            )
            started = time.perf_counter()
            metrics = train(args.data, cfg, args.out)
            elapsed = time.perf_counter() - started
            for key, value in metrics.items():
                print(f"{key}={value}")
            print(f"wall_time_s={elapsed:.1f}")
            print(f"wrote {args.out}")
            if args.metrics:
                with open(args.metrics, "w") as f:
                    json.dump(metrics, f, indent=2)
        else:
            doc = export_goldens(args.weights, args.data, args.k, args.out)
            labels = [r["label"] for r in doc["records"]]
            print(f"wrote {args.out}: {doc['count']} records, "
                  f"{sum(labels)} spilled / {len(labels) - sum(labels)} safe")
    except (DatasetFormatError, WeightFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
