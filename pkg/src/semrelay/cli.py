"""Command-line client for the simulator service.

Every subcommand builds a JSON request (from ``--config`` plus flag
overrides) and POSTs it to the service: an in-process instance by default,
or a remote one via ``--server``. Sweep CSVs returned by the service are
written to ``--out``. Failures print ``ErrorName: detail`` on stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .experiments import gnuplot_script


class ServiceClient:
    """HTTP client over a remote server or an in-process app."""

    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                # keep stderr clean for the exit-code/error-name contract
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        body = response.json()
        if response.status_code != 200:
            if isinstance(body, dict) and "error" in body:
                raise CliError(body["error"], body.get("detail", ""))
            raise CliError("RequestValidationError", json.dumps(body))
        return body


class CliError(Exception):
    def __init__(self, name: str, detail: str):
        self.name = name
        self.detail = detail
        super().__init__(f"{name}: {detail}")


def _parse_float_list(text: str) -> list[float]:
    parts = text.replace(",", " ").split()
    return [float(p) for p in parts]


def _load_config(path: Optional[str]) -> dict[str, Any]:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _merge(config: dict, overrides: dict) -> dict:
    out = dict(config)
    for key, value in overrides.items():
        if value is not None:
            out[key] = value
    return out


def _models_from_args(config: dict, args: argparse.Namespace) -> dict:
    models = dict(config.get("models", {}))
    for key, arg in (("ae_model", "ae_model"), ("source_codec", "source_codec"),
                     ("source_sentences", "source_sentences"),
                     ("dest_codec", "dest_codec"),
                     ("dest_sentences", "dest_sentences"),
                     ("lexicon", "lexicon")):
        value = getattr(args, arg, None)
        if value is not None:
            models[key] = value
    return models


def _write_sweep_outputs(body: dict, args: argparse.Namespace) -> None:
    if args.out:
        Path(args.out).write_text(body["csv"], encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(body["csv"])
    if getattr(args, "gnuplot_script", None):
        target = args.out or "sweep.csv"
        Path(args.gnuplot_script).write_text(
            gnuplot_script(target, body["axis"]), encoding="utf-8")
        print(f"wrote {args.gnuplot_script}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--server", default=None,
                   help="service URL; default runs the service in-process")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ae-model", dest="ae_model")
    p.add_argument("--source-codec", dest="source_codec")
    p.add_argument("--source-sentences", dest="source_sentences")
    p.add_argument("--dest-codec", dest="dest_codec")
    p.add_argument("--dest-sentences", dest="dest_sentences")
    p.add_argument("--lexicon", dest="lexicon")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semrelay",
        description="semantic relay channel simulator (service client)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate paired corpora and lexicon")
    _add_common(p)
    p.add_argument("--out", required=False, help="output directory")
    p.add_argument("--n-sentences", type=int, dest="n_sentences")
    p.add_argument("--divergence", type=float)

    p = sub.add_parser("train-ae", help="train the channel autoencoder")
    _add_common(p)
    p.add_argument("--out", help="model file path")
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", type=float)

    p = sub.add_parser("train-sem", help="train a semantic codec over a frozen autoencoder")
    _add_common(p)
    p.add_argument("--out", help="model file path")
    p.add_argument("--ae-model", dest="ae_model")
    p.add_argument("--sentences")
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--lr", type=float)

    p = sub.add_parser("eval", help="aggregate trials at one SNR pair")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--strategy", choices=["af", "df", "df-semantic", "sf"])
    p.add_argument("--snr1-db", dest="snr1_db", type=float)
    p.add_argument("--snr2-db", dest="snr2_db", type=float)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("sweep-snr", help="BLEU/cosine versus per-hop SNR")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--strategy", choices=["af", "df", "df-semantic", "sf"])
    p.add_argument("--snr-db", dest="snr_db", type=_parse_float_list,
                   help="comma/space separated SNR list in dB")
    p.add_argument("--fixed-snr1-db", dest="fixed_snr1_db", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--gnuplot-script", dest="gnuplot_script",
                   help="also emit a companion gnuplot script")

    p = sub.add_parser("sweep-placement", help="BLEU/cosine versus relay position")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--strategy", choices=["af", "df", "df-semantic", "sf"])
    p.add_argument("--d", type=_parse_float_list, help="relay positions in (0,1)")
    p.add_argument("--p1-db", dest="p1_db", type=float)
    p.add_argument("--p2-db", dest="p2_db", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--gnuplot-script", dest="gnuplot_script")

    p = sub.add_parser("serve", help="run the service under uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    config = _load_config(args.config)
    client = ServiceClient(args.server or config.get("server"))

    if args.command == "gen-corpus":
        payload = _merge(config, {
            "seed": args.seed, "out_dir": args.out,
            "n_sentences": args.n_sentences, "divergence": args.divergence})
        body = client.post("/corpus/generate", payload)
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "train-ae":
        payload = _merge(config, {
            "seed": args.seed, "out_path": args.out, "snr_db": args.snr_db,
            "steps": args.steps, "batch_size": args.batch_size, "lr": args.lr})
        body = client.post("/train/autoencoder", payload)
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "train-sem":
        payload = _merge(config, {
            "seed": args.seed, "out_path": args.out, "ae_model": args.ae_model,
            "sentences": args.sentences, "snr_db": args.snr_db,
            "steps": args.steps, "lr": args.lr})
        body = client.post("/train/semantic", payload)
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "eval":
        payload = _merge(config, {
            "seed": args.seed, "strategy": args.strategy, "trials": args.trials,
            "snr1_db": args.snr1_db, "snr2_db": args.snr2_db})
        payload["models"] = _models_from_args(config, args)
        body = client.post("/eval", payload)
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "sweep-snr":
        payload = _merge(config, {
            "seed": args.seed, "trials": args.trials, "snr_db": args.snr_db,
            "fixed_snr1_db": args.fixed_snr1_db})
        if args.strategy:
            payload["strategies"] = [args.strategy]
        payload["models"] = _models_from_args(config, args)
        body = client.post("/sweep/snr", payload)
        _write_sweep_outputs(body, args)
        return 0

    if args.command == "sweep-placement":
        payload = _merge(config, {
            "seed": args.seed, "trials": args.trials, "d": args.d})
        if args.strategy:
            payload["strategies"] = [args.strategy]
        budget = dict(config.get("budget", {}))
        for key in ("p1_db", "p2_db", "gamma", "sigma2"):
            value = getattr(args, key, None)
            if value is not None:
                budget[key] = value
        if budget:
            payload["budget"] = budget
        payload["models"] = _models_from_args(config, args)
        body = client.post("/sweep/placement", payload)
        _write_sweep_outputs(body, args)
        return 0

    raise CliError("ConfigError", f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except CliError as exc:
        print(f"{exc.name}: {exc.detail}", file=sys.stderr)
        return 1
    except Exception as exc:  # filesystem errors, bad JSON, connection failures
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
