"""Run and sweep configuration files.

The format is flat structured text: `[section]` headers and `key = value`
lines, with `#`/`;` comments and blank lines ignored.  Every key has a
default; unknown sections or keys are rejected with a file:line diagnostic,
as are duplicate keys and type errors.  The full schema (with defaults) is
printed by `wolfsheep --help`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .cognition import CognitionParams
from .engine import Species
from .metrics import ExperimentConfig
from .model import ModelParams, SpeciesParams
from .rng import ALGORITHM
from .sweep import SweepSpec


class ConfigError(Exception):
    """Invalid configuration; message carries the file/line/field context."""


@dataclass(frozen=True)
class Key:
    kind: str  # int | float | bool | str | ints
    default: object
    help: str


RUN_SCHEMA: dict[str, dict[str, Key]] = {
    "world": {
        "width": Key("int", 51, "world width in patches"),
        "height": Key("int", 51, "world height in patches"),
        "wrap": Key("bool", True, "toroidal wrapping (false clamps at edges)"),
        "grass_fraction": Key("float", 0.5, "initial live-grass probability per patch"),
        "regrowth_time": Key("int", 30, "ticks for eaten grass to regrow"),
        "move_cost": Key("float", 1.0, "energy cost of a unit step"),
    },
    "sheep": {
        "count": Key("int", 100, "initial sheep"),
        "gain": Key("float", 4.0, "energy gained eating grass"),
        "reproduce": Key("float", 0.04, "per-tick reproduction probability"),
    },
    "wolves": {
        "count": Key("int", 50, "initial wolves"),
        "gain": Key("float", 20.0, "energy gained eating a sheep"),
        "reproduce": Key("float", 0.05, "per-tick reproduction probability"),
    },
    "sheep.cognition": {
        "enabled": Key("bool", False, "plan with rollouts instead of the random walk"),
        "n_rollouts": Key("int", 20, "rollouts per decision"),
        "rollout_length": Key("int", 3, "simulated ticks per rollout"),
        "vision_radius": Key("float", 5.0, "observation radius in patch lengths"),
        "discount": Key("float", 0.9, "per-tick reward discount in (0, 1]"),
        "death_reward": Key("float", -1000.0, "reward on dying inside a rollout"),
    },
    "wolves.cognition": {
        "enabled": Key("bool", False, "plan with rollouts instead of the random walk"),
        "n_rollouts": Key("int", 20, "rollouts per decision"),
        "rollout_length": Key("int", 3, "simulated ticks per rollout"),
        "vision_radius": Key("float", 5.0, "observation radius in patch lengths"),
        "discount": Key("float", 0.9, "per-tick reward discount in (0, 1]"),
        "death_reward": Key("float", -1000.0, "reward on dying inside a rollout"),
    },
    "run": {
        "ticks": Key("int", 2000, "ticks to simulate"),
        "warmup": Key("int", 500, "first tick included in population means"),
        "seed": Key("int", 42, "master seed; the only entropy source"),
        "out": Key("str", "out", "output directory"),
        "threads": Key("int", 0, "worker threads (0 = machine parallelism)"),
        "rng": Key("str", ALGORITHM, f"stream algorithm; only '{ALGORITHM}' is supported"),
    },
    "explain": {
        "agent": Key("int", -1, "agent id to trace (-1 = none)"),
        "tick": Key("int", -1, "tick at which to trace the decision (-1 = none)"),
    },
}

SWEEP_SCHEMA: dict[str, dict[str, Key]] = {
    "sweep": {
        "species": Key("str", "sheep", "planning species: sheep or wolves"),
        "rollouts": Key("ints", (1, 5, 20), "comma list of rollout counts"),
        "lengths": Key("ints", (3,), "comma list of rollout lengths"),
        "reps": Key("int", 20, "repetitions per grid cell"),
        "ticks": Key("int", 2000, "ticks per run"),
        "warmup": Key("int", 500, "first tick included in population means"),
        "base_seed": Key("int", 0, "run seed = base_seed XOR run index"),
    },
    "cognition": {
        "vision_radius": Key("float", 5.0, "observation radius in patch lengths"),
        "discount": Key("float", 0.9, "per-tick reward discount in (0, 1]"),
        "death_reward": Key("float", -1000.0, "reward on dying inside a rollout"),
    },
    "world": RUN_SCHEMA["world"],
    "sheep": RUN_SCHEMA["sheep"],
    "wolves": RUN_SCHEMA["wolves"],
    "run": {
        "out": Key("str", "out", "output directory"),
        "threads": Key("int", 0, "parallel runs (0 = machine parallelism)"),
        "rng": Key("str", ALGORITHM, f"stream algorithm; only '{ALGORITHM}' is supported"),
    },
}


def _parse_value(raw: str, kind: str, where: str) -> object:
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == "ints":
            return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
        return raw
    except ValueError:
        raise ConfigError(f"{where}: expected {kind}, got {raw!r}") from None


def parse_file(path: Path, schema: dict[str, dict[str, Key]]) -> dict[str, dict[str, object]]:
    """Read a config file into {section: {key: typed value}} with defaults filled."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, dict[str, object]] = {
        sec: {k: key.default for k, key in keys.items()} for sec, keys in schema.items()
    }
    seen: set[tuple[str, str]] = set()
    section = None
    for lineno, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith(("#", ";")):
            continue
        where = f"{path}:{lineno}"
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{where}: malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in schema:
                raise ConfigError(
                    f"{where}: unknown section [{section}] "
                    f"(known: {', '.join(sorted(schema))})")
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"{where}: key outside any [section]")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in schema[section]:
            raise ConfigError(
                f"{where}: unknown key '{key}' in [{section}] "
                f"(known: {', '.join(sorted(schema[section]))})")
        if (section, key) in seen:
            raise ConfigError(f"{where}: duplicate key '{key}' in [{section}]")
        seen.add((section, key))
        values[section][key] = _parse_value(raw_value, schema[section][key].kind,
                                            f"{where}: [{section}] {key}")
    return values


def apply_overrides(values: dict[str, dict[str, object]],
                    schema: dict[str, dict[str, Key]],
                    overrides: list[str]) -> None:
    """Apply `section.key=value` strings (CLI --set) on top of parsed values."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        target, _, raw_value = item.partition("=")
        section, _, key = target.strip().rpartition(".")
        if section not in schema or key not in schema.get(section, {}):
            raise ConfigError(f"--set: unknown option {target.strip()!r}")
        values[section][key] = _parse_value(raw_value.strip(), schema[section][key].kind,
                                            f"--set {target.strip()}")


def _model_params(values: dict[str, dict[str, object]]) -> ModelParams:
    world = values["world"]
    sheep = values["sheep"]
    wolves = values["wolves"]
    try:
        return ModelParams(
            sheep=SpeciesParams(sheep["count"], sheep["gain"], sheep["reproduce"]),
            wolves=SpeciesParams(wolves["count"], wolves["gain"], wolves["reproduce"]),
            grass_regrowth_time=world["regrowth_time"],
            move_cost=world["move_cost"],
            width=world["width"],
            height=world["height"],
            wrap=world["wrap"],
            initial_grass_fraction=world["grass_fraction"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _cognition(values: dict[str, dict[str, object]], section: str) -> CognitionParams | None:
    cog = values[section]
    if not cog["enabled"]:
        return None
    try:
        return CognitionParams(cog["n_rollouts"], cog["rollout_length"],
                               cog["vision_radius"], cog["discount"],
                               cog["death_reward"])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def _check_rng(values: dict[str, dict[str, object]]) -> None:
    if values["run"]["rng"] != ALGORITHM:
        raise ConfigError(
            f"[run] rng: unsupported algorithm {values['run']['rng']!r}; "
            f"only {ALGORITHM!r} is available")


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig
    seed: int
    out: str
    threads: int
    explain_agent: int | None
    explain_tick: int | None


def load_run_config(path: Path, overrides: list[str] | None = None) -> RunConfig:
    values = parse_file(path, RUN_SCHEMA)
    apply_overrides(values, RUN_SCHEMA, overrides or [])
    _check_rng(values)
    run = values["run"]
    try:
        experiment = ExperimentConfig(
            model=_model_params(values),
            sheep_cognition=_cognition(values, "sheep.cognition"),
            wolf_cognition=_cognition(values, "wolves.cognition"),
            ticks=run["ticks"],
            warmup=min(run["warmup"], run["ticks"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    explain = values["explain"]
    return RunConfig(
        experiment=experiment,
        seed=run["seed"],
        out=run["out"],
        threads=run["threads"],
        explain_agent=None if explain["agent"] < 0 else explain["agent"],
        explain_tick=None if explain["tick"] < 0 else explain["tick"],
    )


@dataclass(frozen=True)
class SweepConfig:
    spec: SweepSpec
    out: str
    threads: int


def load_sweep_config(path: Path, overrides: list[str] | None = None) -> SweepConfig:
    values = parse_file(path, SWEEP_SCHEMA)
    apply_overrides(values, SWEEP_SCHEMA, overrides or [])
    _check_rng(values)
    sw = values["sweep"]
    cog = values["cognition"]
    if sw["species"] not in ("sheep", "wolves"):
        raise ConfigError(f"[sweep] species must be 'sheep' or 'wolves', got {sw['species']!r}")
    try:
        spec = SweepSpec(
            species=Species.SHEEP if sw["species"] == "sheep" else Species.WOLF,
            n_rollouts_values=sw["rollouts"],
            rollout_lengths=sw["lengths"],
            repetitions=sw["reps"],
            ticks=sw["ticks"],
            warmup=sw["warmup"],
            base_seed=sw["base_seed"],
            model=_model_params(values),
            vision_radius=cog["vision_radius"],
            discount=cog["discount"],
            death_reward=cog["death_reward"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return SweepConfig(spec=spec, out=values["run"]["out"], threads=values["run"]["threads"])


def _format_section(sec: str, keys: dict[str, Key]) -> list[str]:
    lines = [f"  [{sec}]"]
    for name, key in keys.items():
        default = ",".join(map(str, key.default)) if isinstance(key.default, tuple) \
            else key.default
        lines.append(f"    {name} = {default}  # {key.help}")
    return lines


def schema_help() -> str:
    """Human-readable listing of every config key with its default."""
    lines = ["run config keys (wolfsheep run / explain):"]
    for sec, keys in RUN_SCHEMA.items():
        lines.extend(_format_section(sec, keys))
    lines.append("")
    lines.append("sweep spec keys (wolfsheep sweep; [world]/[sheep]/[wolves] as above):")
    for sec in ("sweep", "cognition", "run"):
        lines.extend(_format_section(sec, SWEEP_SCHEMA[sec]))
    return "\n".join(lines)
