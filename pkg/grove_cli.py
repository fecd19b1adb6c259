#!/usr/bin/env python
"""
Interfejs wiersza poleceń systemu weryfikacji własności modeli GNN

Przykłady:
    python grove_cli.py dataset synth --name synthetic-small --path datasets/small
    python grove_cli.py train-target --dataset synthetic-small --architecture GAT
    python grove_cli.py attack --target target --attack-type TypeII --architecture GIN
    python grove_cli.py experiment run --config experiment.json --repeats 2
"""
import argparse
import json
import logging
import sys
from typing import Dict, Any, List, Optional

from config.settings import Config, configure_logging
from core.exceptions import GroveError
from fingerprint import FingerprintTrainingSet, SimilarityClassifier
from grove_system import GroveSystem
from harness import ExperimentConfig, run_experiment
from utils import GraphVisualizer

logger = logging.getLogger(__name__)

EMOJI = Config.STATUS_EMOJIS


def _print_json(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _system(args) -> GroveSystem:
    return GroveSystem(
        out_dir=args.out_dir or Config.OUT_DIR,
        registry_dir=args.registry_dir,
        seed=Config.SEED if args.seed is None else args.seed,
    )


def _named_models(system: GroveSystem, names: List[str]):
    return [(name, system.load(name)) for name in names or []]


# Polecenia

def cmd_dataset(args) -> int:
    system = _system(args)
    if args.action == "synth":
        dataset = system.synthesize(args.name, args.path, **_load_config_file(args.config).get("synthetic", {}))
    else:
        dataset = system.dataset(args.path)
    print(f"{EMOJI['ok']} Zbiór: ")
    _print_json(dataset.summary())
    return 0


def cmd_train_target(args) -> int:
    system = _system(args)
    graph = system.dataset(args.dataset)
    overrides = {k: v for k, v in {"hidden_dim": args.hidden_dim, "max_epochs": args.epochs}.items() if v is not None}
    print(f"{EMOJI['model']} Trenuję {args.architecture} na {graph.name}...")
    model, report, test_accuracy = system.train_target(graph, args.architecture, name=args.name, **overrides)
    print(f"{EMOJI['ok']} Zapisano {system.model_path(args.name)} (dokładność testowa {test_accuracy:.3f})")
    _print_json(report.to_dict())
    return 0


def cmd_attack(args) -> int:
    system = _system(args)
    graph = system.dataset(args.dataset)
    target = system.load(args.target)
    print(f"{EMOJI['attack']} Atak {args.attack_type} surogatem {args.architecture}...")
    surrogate = system.attack(target, graph, args.attack_type, args.architecture, name=args.name,
                              epochs=args.epochs or Config.MAX_EPOCHS, oracle_url=args.oracle_url)
    print(f"{EMOJI['ok']} Zapisano {system.model_path(args.name)}")
    _print_json(surrogate.summary())
    return 0


def cmd_cohort(args) -> int:
    system = _system(args)
    graph = system.dataset(args.dataset)
    target = system.load(args.target)
    training_set, path = system.cohort(target, graph, _named_models(system, args.surrogates),
                                       _named_models(system, args.independents),
                                       prune_ratios=args.prune_ratios or (), name=args.name)
    print(f"{EMOJI['ok']} Zbiór treningowy C_sim: {path}")
    _print_json(training_set.counts())
    return 0


def cmd_fingerprint(args) -> int:
    system = _system(args)
    if args.action == "train":
        csim, path = system.fingerprint_train(FingerprintTrainingSet.from_csv(args.training_set), name=args.name)
        print(f"{EMOJI['ok']} C_sim zapisany w {path}")
        _print_json(csim.describe())
        return 0

    graph = system.dataset(args.dataset)
    report, path = system.fingerprint_verify(SimilarityClassifier.load(args.csim), system.load(args.target),
                                             system.load(args.suspect), graph, name=args.name)
    print(f"{EMOJI['verdict']} Werdykt: {report.verdict.value} (podobne pary: {report.similar_fraction:.3f})")
    print(f"   Zapisano {path}")
    return 0


def cmd_registry(args) -> int:
    system = _system(args)
    if args.action == "serve":
        graph = system.dataset(args.dataset) if args.dataset else None
        server = system.serve(graph, host=args.host, port=args.port)
        print(f"{EMOJI['start']} Rejestr na {server.url} (Ctrl+C kończy)")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            print("\n👋 Do zobaczenia!")
        finally:
            server.httpd.server_close()
        return 0

    if args.action == "register":
        csim = SimilarityClassifier.load(args.csim) if args.csim else None
        record = system.register(system.load(args.model), args.owner, csim=csim)
        print(f"{EMOJI['ok']} Zarejestrowano {record.model_id}")
        _print_json(record.to_dict())
        return 0

    graph = system.dataset(args.dataset) if args.dataset else None
    dispute = system.dispute(args.accuser_id, args.responder_id, system.load(args.target_model),
                             system.load(args.suspect_model), graph=graph)
    marker = EMOJI["ok"] if dispute.status.verified else EMOJI["warning"]
    print(f"{marker} Spór {dispute.dispute_id}: {dispute.status.value}")
    _print_json(dispute.to_dict())
    return 0


def cmd_experiment(args) -> int:
    overrides = {
        "out_dir": args.out_dir,
        "seed": args.seed,
        "repeats": args.repeats,
        "dataset": args.dataset,
        "max_epochs": args.epochs,
        "parallel": True if args.parallel else None,
        "workers": args.workers,
    }
    cfg = (ExperimentConfig.from_json(args.config, **overrides) if args.config
           else ExperimentConfig().replace(**overrides))
    print(f"{EMOJI['start']} Eksperyment {cfg.dataset}: {cfg.repeats} powtórzeń -> {cfg.out_dir}")
    table = run_experiment(cfg)
    print(f"{EMOJI['table']} Wyniki:")
    print(table.to_markdown())
    return 0


def cmd_plot(args) -> int:
    system = _system(args)
    if args.action == "workflow":
        path = GraphVisualizer.export_to_html(args.path)
        print(f"{EMOJI['ok']} Diagram sporu: {path}")
        return 0

    graph = system.dataset(args.dataset)
    if args.action == "projection":
        models = dict(_named_models(system, args.models))
        png, csv = system.plot_projection(models, graph, method=args.method, name=args.name)
    else:
        others = [(name, "surrogate", model) for name, model in _named_models(system, args.surrogates)]
        others += [(name, "independent", model) for name, model in _named_models(system, args.independents)]
        png, csv = system.plot_distances(system.load(args.target), others, graph, name=args.name)
    print(f"{EMOJI['ok']} Wykres {png} (dane: {csv})")
    return 0


# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grove", description="Weryfikacja własności modeli GNN")
    parser.add_argument("--out-dir", help=f"katalog wyników (domyślnie {Config.OUT_DIR})")
    parser.add_argument("--registry-dir", default=Config.REGISTRY_DIR)
    parser.add_argument("--seed", type=int, help=f"ziarno (domyślnie {Config.SEED})")
    parser.add_argument("--log-level", default=Config.LOG_LEVEL)
    commands = parser.add_subparsers(dest="command", required=True)

    dataset = commands.add_parser("dataset", help="wczytaj lub wygeneruj zbiór")
    dataset.add_argument("action", choices=["load", "synth"])
    dataset.add_argument("--path", required=True, help="katalog zbioru (load: źródło, synth: cel)")
    dataset.add_argument("--name", default="synthetic", help="nazwany zbiór syntetyczny")
    dataset.add_argument("--config", help="JSON z kluczem 'synthetic' (nadpisania generatora)")
    dataset.set_defaults(handler=cmd_dataset)

    train_target = commands.add_parser("train-target", help="wytrenuj model celu na D_t")
    train_target.add_argument("--dataset", default="synthetic")
    train_target.add_argument("--architecture", default="GraphSAGE")
    train_target.add_argument("--name", default="target")
    train_target.add_argument("--hidden-dim", type=int)
    train_target.add_argument("--epochs", type=int)
    train_target.set_defaults(handler=cmd_train_target)

    attack = commands.add_parser("attack", help="ekstrakcja surogatu")
    attack.add_argument("--dataset", default="synthetic")
    attack.add_argument("--target", required=True, help="nazwa lub ścieżka modelu celu")
    attack.add_argument("--attack-type", default="TypeI")
    attack.add_argument("--architecture", default="GraphSAGE")
    attack.add_argument("--name", default="surrogate")
    attack.add_argument("--epochs", type=int)
    attack.add_argument("--oracle-url", help="zdalna wyrocznia (POST /models/{id}/query)")
    attack.set_defaults(handler=cmd_attack)

    cohort = commands.add_parser("cohort", help="zbiór treningowy C_sim z kohorty modeli")
    cohort.add_argument("--dataset", default="synthetic")
    cohort.add_argument("--target", required=True)
    cohort.add_argument("--surrogates", nargs="+", required=True)
    cohort.add_argument("--independents", nargs="+", required=True)
    cohort.add_argument("--prune-ratios", nargs="*", type=float)
    cohort.add_argument("--name", default="csim-training-set")
    cohort.set_defaults(handler=cmd_cohort)

    fingerprint = commands.add_parser("fingerprint", help="trening C_sim albo werdykt")
    fingerprint.add_argument("action", choices=["train", "verify"])
    fingerprint.add_argument("--training-set", help="CSV zbioru treningowego (train)")
    fingerprint.add_argument("--csim", help="plik C_sim (verify)")
    fingerprint.add_argument("--dataset", default="synthetic")
    fingerprint.add_argument("--target")
    fingerprint.add_argument("--suspect")
    fingerprint.add_argument("--name", default=None)
    fingerprint.set_defaults(handler=cmd_fingerprint)

    registry = commands.add_parser("registry", help="rejestr modeli i spory")
    registry.add_argument("action", choices=["serve", "register", "dispute"])
    registry.add_argument("--dataset", help="zbiór weryfikatora (rozstrzyganie sporów)")
    registry.add_argument("--host", default=Config.HOST)
    registry.add_argument("--port", type=int, default=Config.PORT)
    registry.add_argument("--model")
    registry.add_argument("--owner", default="")
    registry.add_argument("--csim", help="C_sim dołączany do rejestrowanego modelu")
    registry.add_argument("--accuser-id")
    registry.add_argument("--responder-id")
    registry.add_argument("--target-model")
    registry.add_argument("--suspect-model")
    registry.set_defaults(handler=cmd_registry)

    experiment = commands.add_parser("experiment", help="pełny przebieg eksperymentu")
    experiment.add_argument("action", choices=["run"])
    experiment.add_argument("--config", help="plik JSON z ExperimentConfig")
    experiment.add_argument("--dataset")
    experiment.add_argument("--repeats", type=int)
    experiment.add_argument("--epochs", type=int)
    experiment.add_argument("--parallel", action="store_true")
    experiment.add_argument("--workers", type=int)
    experiment.set_defaults(handler=cmd_experiment)

    plot = commands.add_parser("plot", help="wykresy projekcji i odległości")
    plot.add_argument("action", choices=["projection", "distances", "workflow"])
    plot.add_argument("--dataset", default="synthetic")
    plot.add_argument("--models", nargs="+", help="modele do projekcji")
    plot.add_argument("--method", default="pca", choices=["pca", "tsne"])
    plot.add_argument("--target")
    plot.add_argument("--surrogates", nargs="*")
    plot.add_argument("--independents", nargs="*")
    plot.add_argument("--path", default="dispute_flow.html")
    plot.add_argument("--name", default=None)
    plot.set_defaults(handler=cmd_plot)
    return parser


_REQUIRED = {
    ("fingerprint", "train"): ["training_set"],
    ("fingerprint", "verify"): ["csim", "target", "suspect"],
    ("registry", "register"): ["model"],
    ("registry", "dispute"): ["accuser_id", "responder_id", "target_model", "suspect_model"],
    ("plot", "projection"): ["models"],
    ("plot", "distances"): ["target"],
}

_DEFAULT_NAMES = {"fingerprint": {"train": "csim", "verify": "verdict"},
                  "plot": {"projection": "projection", "distances": "distances"}}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    action = getattr(args, "action", None)
    missing = [name for name in _REQUIRED.get((args.command, action), []) if not getattr(args, name)]
    if missing:
        parser.error(f"{args.command} {action} requires: " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if getattr(args, "name", "") is None:
        args.name = _DEFAULT_NAMES.get(args.command, {}).get(action, action)
    try:
        return args.handler(args)
    except GroveError as e:
        print(f"{EMOJI['error']} Błąd: {e}")
        return 1
    except (OSError, ValueError) as e:
        logger.debug("Szczegóły błędu", exc_info=True)
        print(f"{EMOJI['error']} Błąd: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
