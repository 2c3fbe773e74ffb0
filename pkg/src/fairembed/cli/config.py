"""Run configuration: INI-style files with presets, strict key validation,
deterministic resolution, and content hashing for run-directory naming.

Precedence: schema defaults < preset (the `defaults` key) < file values
< command-line overrides. The fully resolved config is written into every
run directory and round-trips: re-running from it reproduces the run.
"""
import configparser
import hashlib
import io
import os

from ..errors import ConfigError

ENV_DATA_ROOT = "FAIREMBED_DATA_ROOT"

# section -> key -> (type, default, help)
SCHEMA = {
    "run": {
        "defaults": (str, "", "preset to start from: knowledge-graph | rating | bipartite"),
        "out": (str, "runs", "output root directory"),
    },
    "dataset": {
        "edges": (str, "", "edge file (required)"),
        "format": (str, "bipartite-edge", "tsv-triple | movielens-rating | bipartite-edge"),
        "test_edges": (str, "", "optional provided test split (pass-through)"),
        "split_ratio": (float, 0.9, "train fraction for the random edge split"),
        "split_seed": (int, 0, "seed for the random edge split"),
        "kcore": (int, 0, "k-core to apply before splitting (0 = off)"),
        "attributes": (str, "", "node attribute file (node<TAB>attr<TAB>value)"),
        "sensitive_nodes": (str, "", "comma-separated node names whose edges define binary attributes"),
        "sensitive_sample": (int, 0, "instead sample this many sensitive nodes by degree"),
        "sensitive_top": (int, 100, "degree-rank pool upper bound for sampling"),
        "sensitive_exclude_top": (int, 5, "exclude this many highest-degree nodes"),
        "sensitive_seed": (int, 0, "seed for sensitive-node sampling"),
        "data_dir": (str, "", "explicit materialized-dataset directory"),
    },
    "model": {
        "family": (str, "dot", "dot | rating | transd"),
        "dim": (int, 50, "embedding dimension"),
        "batchnorm": (bool, False, "batch-normalize embedding lookups"),
    },
    "fairness": {
        "lambda": (float, 0.0, "adversarial strength (0 disables adversaries)"),
        "mask_p": (float, 0.5, "per-attribute Bernoulli inclusion probability"),
        "encoder_steps": (int, 1, "encoder minibatch updates per round (T)"),
        "disc_steps": (int, 5, "discriminator minibatch updates per round (T')"),
        "heldout_fraction": (float, 0.0, "fraction of mask combinations held out of training"),
        "heldout_seed": (int, 0, "seed for held-out combination choice"),
        "noncompositional": (bool, False, "train K single-attribute adversaries instead"),
        "filter_layers": (int, 2, "filter MLP layer count"),
        "filter_hidden": (int, 0, "filter hidden width (0 = 2*dim)"),
        "filter_dropout": (float, 0.0, "filter dropout rate"),
        "disc_layers": (int, 9, "discriminator MLP layer count"),
        "disc_hidden": (int, 0, "discriminator hidden width (0 = 2*dim)"),
        "disc_dropout": (float, 0.3, "discriminator dropout rate"),
    },
    "training": {
        "epochs": (int, 50, "training epochs"),
        "batch_size": (int, 512, "minibatch size"),
        "seed": (int, 0, "master seed; every random stream derives from it"),
        "learning_rate": (float, 1e-3, "Adam learning rate"),
        "negatives": (int, 1, "negative samples per positive (margin families)"),
        "corruption": (str, "both", "slot to corrupt: head | tail | both"),
        "filtered_negatives": (bool, False, "reject negatives present in the training set"),
        "type_constrained": (bool, True, "corrupt within the node type observed per slot"),
    },
    "evaluation": {
        "probe_epochs": (int, 100, "leakage-probe training epochs"),
        "probe_batch": (int, 256, "leakage-probe batch size"),
        "probe_seed": (int, 0, "seed for probe splits and init"),
        "heldout_seen_limit": (int, 64, "max seen masks probed exhaustively"),
        "bias": (str, "auto", "prediction-bias report: auto | on | off"),
    },
}

PRESETS = {
    "knowledge-graph": {
        "dataset.format": "tsv-triple",
        "model.family": "transd",
        "model.dim": 20,
        "training.epochs": 100,
        "training.negatives": 20,
        "training.type_constrained": False,
        "fairness.lambda": 1000.0,
        "fairness.disc_layers": 4,
        "fairness.disc_dropout": 0.0,
        "fairness.filter_layers": 2,
        "evaluation.probe_epochs": 50,
    },
    "rating": {
        "dataset.format": "movielens-rating",
        "model.family": "rating",
        "model.dim": 30,
        "model.batchnorm": True,
        "training.epochs": 200,
        "fairness.lambda": 1000.0,
        "fairness.disc_layers": 9,
        "fairness.disc_dropout": 0.3,
        "evaluation.probe_epochs": 200,
    },
    "bipartite": {
        "dataset.format": "bipartite-edge",
        "model.family": "dot",
        "model.dim": 50,
        "training.epochs": 50,
        "training.negatives": 1,
        "fairness.lambda": 1000.0,
        "fairness.disc_layers": 9,
        "fairness.disc_dropout": 0.3,
        "evaluation.probe_epochs": 100,
    },
}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(section, key, raw):
    typ = SCHEMA[section][key][0]
    raw = str(raw).strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key} = {raw!r} is not a valid {typ.__name__}") from None


class RunConfig:
    """Resolved configuration: attribute access via cfg['section']['key']."""

    def __init__(self, values):
        self._values = values

    def __getitem__(self, section):
        return self._values[section]

    def get(self, section, key):
        return self._values[section][key]

    def content_hash(self):
        # identifies the experiment, so the output root does not participate
        canon = "\n".join(f"{s}.{k}={self._values[s][k]!r}"
                          for s in sorted(self._values) if s != "run"
                          for k in sorted(self._values[s]))
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_ini(self):
        out = io.StringIO()
        parser = configparser.ConfigParser()
        for section in SCHEMA:
            parser[section] = {}
            for key in SCHEMA[section]:
                if section == "run" and key == "defaults":
                    continue  # already applied; resolved values are explicit
                parser[section][key] = str(self._values[section][key])
        parser.write(out)
        return out.getvalue()

    def run_name(self):
        return (f"{self.get('model', 'family')}-"
                f"seed{self.get('training', 'seed')}-"
                f"{self.content_hash()[:12]}")

    def dataset_hash(self):
        canon = "\n".join(f"dataset.{k}={self._values['dataset'][k]!r}"
                          for k in sorted(self._values["dataset"])
                          if k != "data_dir")
        return hashlib.sha256(canon.encode()).hexdigest()

    def data_dir(self):
        explicit = self.get("dataset", "data_dir")
        if explicit:
            return resolve_path(explicit)
        root = os.environ.get(ENV_DATA_ROOT, self.get("run", "out"))
        return os.path.join(root, "data", self.dataset_hash()[:12])

    def out_dir(self):
        return os.path.join(self.get("run", "out"), self.run_name())


def resolve_path(path):
    """Relative data paths resolve against the global cache root if set."""
    if not path or os.path.isabs(path):
        return path
    root = os.environ.get(ENV_DATA_ROOT)
    if root and not os.path.exists(path) and os.path.exists(os.path.join(root, path)):
        return os.path.join(root, path)
    return path


def _defaults():
    return {s: {k: spec[1] for k, spec in keys.items()}
            for s, keys in SCHEMA.items()}


def load_config(path, overrides=None):
    """Parse, validate, and resolve a config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if not read:
        raise ConfigError(f"config file not found: {path}")

    values = _defaults()
    file_sections = {s: dict(parser[s]) for s in parser.sections()}
    for section in file_sections:
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in file_sections[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")

    preset_name = file_sections.get("run", {}).get("defaults", "").strip()
    if preset_name:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset_name!r}; choose from "
                f"{sorted(PRESETS)}")
        for dotted, value in PRESETS[preset_name].items():
            section, key = dotted.split(".")
            values[section][key] = value

    for section, keys in file_sections.items():
        for key, raw in keys.items():
            if section == "run" and key == "defaults":
                continue
            values[section][key] = _coerce(section, key, raw)

    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".")
        values[section][key] = _coerce(section, key, value)

    _validate(values)
    return RunConfig(values)


def _validate(values):
    if not values["dataset"]["edges"]:
        raise ConfigError("[dataset] edges is required")
    if values["dataset"]["format"] not in ("tsv-triple", "movielens-rating",
                                           "bipartite-edge"):
        raise ConfigError(f"unknown dataset format "
                          f"{values['dataset']['format']!r}")
    if values["model"]["family"] not in ("dot", "rating", "transd"):
        raise ConfigError(f"unknown model family "
                          f"{values['model']['family']!r}")
    if values["fairness"]["lambda"] < 0:
        raise ConfigError("[fairness] lambda must be >= 0")
    if not 0.0 <= values["fairness"]["mask_p"] <= 1.0:
        raise ConfigError("[fairness] mask_p must be in [0, 1]")
    if values["training"]["corruption"] not in ("head", "tail", "both"):
        raise ConfigError("[training] corruption must be head, tail or both")
    if values["evaluation"]["bias"] not in ("auto", "on", "off"):
        raise ConfigError("[evaluation] bias must be auto, on or off")


def schema_help():
    lines = ["configuration keys (every key has a default):", ""]
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (typ, default, help_text) in keys.items():
            lines.append(f"  {key} = {default!r:<18} {help_text}")
        lines.append("")
    lines.append("presets (the run.defaults key): "
                 + ", ".join(sorted(PRESETS)))
    lines.append(f"environment: {ENV_DATA_ROOT} is the global data-cache "
                 "root for relative paths and prepared datasets")
    return "\n".join(lines)
