"""Configuration management for RUBI runs.

Settings live in pydantic models. On disk they are a flat ``key=value`` file
where nested fields use dotted keys::

    seed=7
    wproc.batch_size=500
    train.hidden=256,128,64
    embeddings.en=/data/wiki.en.vec
    dictionaries.en-fr=/data/en-fr.txt
"""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .alignment import RcslsConfig, WProcConfig
from .embeddings import Normalization
from .errors import InputError
from .ltr import RelevanceMode, TrainConfig
from .retrieval import Criterion

DEFAULT_OUTPUT_DIR = Path("runs") / "default"
LEDGER_FILE = "ledger.db"


class PipelineConfig(BaseModel):
    """Everything a RUBI or baseline run needs besides the language tags."""

    model_config = ConfigDict(extra="forbid")

    # language tag -> path of its .vec file
    embeddings: dict[str, Path] = Field(default_factory=dict)
    # "src-tgt" -> path of a gold dictionary
    dictionaries: dict[str, Path] = Field(default_factory=dict)
    output_dir: Path = DEFAULT_OUTPUT_DIR
    max_vocab: int = Field(200_000, ge=1)
    normalization: Normalization = Normalization.CENTER_L2
    train_dict_size: int = Field(5000, ge=0)
    cv_dict_size: int = Field(1500, ge=0)
    # evaluation words taken from the gold source-target dictionary; None uses every key
    eval_dict_size: Optional[int] = Field(None, ge=1)
    query_size: int = Field(10, ge=1)
    k_max: int = Field(10, ge=0)
    relevance: RelevanceMode = RelevanceMode.SEMI_BINARY
    candidate_criterion: Criterion = Criterion.NN
    csls_k: int = Field(10, ge=1)
    isf_beta: float = Field(30.0, gt=0)
    # RCSLS refinement of the pivot alignment with the training dictionary
    refine: bool = False
    resume: bool = False
    seed: int = 0
    wproc: WProcConfig = Field(default_factory=WProcConfig)
    rcsls: RcslsConfig = Field(default_factory=RcslsConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)

    @field_validator("normalization")
    @classmethod
    def _not_raw(cls, value: Normalization) -> Normalization:
        if value is Normalization.RAW:
            raise ValueError("pipelines need 'l2' or 'center_l2' normalisation")
        return value

    def with_seed(self, seed: int) -> "PipelineConfig":
        """Copy with ``seed`` pushed into every nested model."""
        return self.model_copy(update={
            "seed": seed,
            "wproc": self.wproc.model_copy(update={"seed": seed}),
            "train": self.train.model_copy(update={"seed": seed}),
        })

    def seeds(self) -> dict[str, int]:
        return {"pipeline": self.seed, "wproc": self.wproc.seed, "train": self.train.seed}

    def embedding_path(self, lang: str) -> Path:
        try:
            return self.embeddings[lang]
        except KeyError:
            raise InputError(f"no embeddings configured for language {lang!r}") from None

    def dictionary_path(self, source: str, target: str) -> Optional[Path]:
        return self.dictionaries.get(f"{source}-{target}")


def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    return None if raw == "" or raw.lower() == "none" else raw


def _nest(pairs: Iterable[tuple[str, Any]], into: Optional[dict] = None) -> dict:
    tree: dict[str, Any] = into if into is not None else {}
    for key, value in pairs:
        node = tree
        # language tags and pair names are leaf keys even when they contain dots
        maxsplit = 1 if key.startswith(("embeddings.", "dictionaries.")) else -1
        *parents, leaf = key.split(".", maxsplit)
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise InputError(f"config key {key!r} conflicts with a plain value")
            node = child
        node[leaf] = value
    return tree


# "#" opens a comment at the start of a line or after whitespace
COMMENT = re.compile(r"(?:^|\s)#.*$")


def parse_assignments(lines: Iterable[str], source: str = "<config>") -> list[tuple[str, Any]]:
    """``key=value`` lines to pairs, skipping comments and blank lines."""
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        line = COMMENT.sub("", line).strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InputError(f"{source}:{lineno}: expected key=value, got {line!r}")
        pairs.append((key.strip(), _parse_value(value)))
    return pairs


def build_config(
    pairs: Iterable[tuple[str, Any]],
    base: Optional[PipelineConfig] = None,
) -> PipelineConfig:
    """Validate dotted-key pairs, layered over ``base`` when given."""
    tree = base.model_dump(mode="json") if base is not None else {}
    tree = _nest(pairs, tree)
    try:
        return PipelineConfig.model_validate(tree)
    except ValidationError as exc:
        raise InputError(f"invalid configuration: {exc}") from exc


def load_config(
    path: Optional[Path | str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
    """Read a key=value file (or start from defaults) and apply ``overrides``."""
    pairs: list[tuple[str, Any]] = []
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        pairs = parse_assignments(text.splitlines(), source=path.name)
        base = path.parent
        pairs = [(k, _resolve(k, v, base)) for k, v in pairs]
    if overrides:
        pairs += list(overrides.items())
    return build_config(pairs)


def _resolve(key: str, value: Any, base: Path) -> Any:
    # relative data paths are taken relative to the config file
    if value is None or not key.startswith(("embeddings.", "dictionaries.", "output_dir")):
        return value
    path = Path(value)
    return str(path if path.is_absolute() else base / path)


def config_hash(cfg: PipelineConfig) -> str:
    """First 16 hex digits of SHA-256 over the canonical JSON dump.

    ``output_dir`` and ``resume`` are left out: they do not change any result.
    """
    dumped = cfg.model_dump(mode="json", exclude={"output_dir", "resume"})
    canonical = json.dumps(dumped, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def dump_config(cfg: PipelineConfig) -> str:
    """Render ``cfg`` back into the key=value format."""
    lines: list[str] = []

    def walk(prefix: str, node: Any) -> None:
        if isinstance(node, dict):
            for key in sorted(node):
                walk(f"{prefix}{key}.", node[key])
            return
        key = prefix[:-1]
        if node is None:
            lines.append(f"{key}=")
        elif isinstance(node, list):
            lines.append(f"{key}={','.join(str(v) for v in node)}")
        else:
            lines.append(f"{key}={str(node).lower() if isinstance(node, bool) else node}")

    walk("", cfg.model_dump(mode="json"))
    return "\n".join(lines) + "\n"
