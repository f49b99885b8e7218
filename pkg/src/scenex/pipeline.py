"""Pipeline orchestration: configuration, staged runs, cached artifacts.

A run executes input -> filter -> pfa -> grids -> cluster -> validate and
leaves a self-describing artifact directory behind:

    input/                 canonical recording CSVs (+ label set, if any)
    recording_summary.json recording id, frame rate, extent, class counts
    scenarios.json         accepted scenarios with full trajectory slices
    pfa.json               per-class feature selection and channel choice
    keyframes.json         chosen key frame per scenario
    grids/{id}.json        scenario tensors
    cluster_input.json     PCA-reduced rows forming M_c
    dendrogram.json        merge list of the hierarchical clustering
    metrics.json           accuracy reports over the threshold sweep
    run_manifest.json      config, stage signatures, artifact hashes

All artifacts are JSON or CSV with shortest round-trip float formatting,
so byte-identical reruns are the expected behavior, not an accident.
Every stage records a signature (parameters + input hashes); a rerun
skips stages whose signatures and outputs are unchanged, so parameter
tweaks recompute only the stages downstream of the change.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from scenex import __version__, grids, hac, synth, validation
from scenex.petfilter import (
    CATEGORIES,
    ConcreteScenario,
    FilterParams,
    InteractionRecord,
    extract_scenarios,
)
from scenex.pfa import principal_feature_analysis
from scenex.trajectory import (
    MOTION_COLUMNS,
    Trajectory,
    _COLUMN_FIELDS,
    parse_recording,
    write_recording,
)

STAGES = ("input", "filter", "pfa", "grids", "cluster", "validate")

ARTIFACT_VERSION = 1

_AUTO_THRESHOLD_COUNT = 30

#: Small demonstration traffic mix used when no config is supplied.
DEFAULT_SYNTH_MIX = (
    (synth.BICYCLE_CROSSING, 3),
    (synth.LEFT_TURN_ONCOMING, 3),
    (synth.PEDESTRIAN_CROSSING, 3),
    (synth.STRAIGHT_FOLLOW, 3),
    (synth.STRAIGHT_UNINVOLVED, 2),
)


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    """Flat run configuration; numeric key names carry their units.

    Exactly one input mode must be set: ``synth_templates`` (generated
    traffic) or the three recording CSV paths. Defaults follow the
    reference parametrization (t_PET 3 s, d_traj 1 m, var_PFA 0.95,
    a_gr 30 m, 1 px/m, var_PCA 0.99, ward linkage).
    """

    synth_templates: tuple[tuple[str, int], ...] | None = DEFAULT_SYNTH_MIX
    synth_frame_rate: float = 25.0
    tracks_path: str | None = None
    tracks_meta_path: str | None = None
    recording_meta_path: str | None = None
    labels_path: str | None = None
    t_pet_s: float = 3.0
    d_traj_m: float = 1.0
    var_pfa: float = 0.95
    q_offset: int = 1
    pfa_superset: str = "union"
    a_gr_m: float = 30.0
    r_gr_px_per_m: tuple[float, float] = (1.0, 1.0)
    include_others_dynamics: bool = False
    var_pca: float = 0.99
    linkage: str = "ward"
    seed: int = 0
    thresholds: tuple[float, ...] | None = None
    category: str = "all"
    workers: int = 1

    def __post_init__(self):
        csv_paths = (self.tracks_path, self.tracks_meta_path, self.recording_meta_path)
        if self.synth_templates is not None and any(p is not None for p in csv_paths):
            raise ValueError("choose either synth_templates or recording CSV paths, not both")
        if self.synth_templates is None and not all(p is not None for p in csv_paths):
            raise ValueError("no input: set synth_templates or all three recording CSV paths")
        if self.synth_templates is not None:
            object.__setattr__(
                self,
                "synth_templates",
                tuple(sorted((str(n), int(c)) for n, c in self.synth_templates)),
            )
            for name, count in self.synth_templates:
                if name not in synth.TEMPLATES:
                    raise ValueError(f"unknown synthetic template {name!r}")
                if count < 0:
                    raise ValueError("negative template count")
        if self.synth_frame_rate <= 0.0:
            raise ValueError("synth_frame_rate must be positive")
        if self.t_pet_s <= 0.0 or self.d_traj_m <= 0.0:
            raise ValueError("filter parameters must be positive")
        if not 0.0 < self.var_pfa < 1.0:
            raise ValueError("var_pfa must lie in (0, 1)")
        if not 0.0 < self.var_pca <= 1.0:
            raise ValueError("var_pca must lie in (0, 1]")
        if self.q_offset < 1:
            raise ValueError("q_offset must be at least 1")
        if self.pfa_superset not in ("union", "pedestrian"):
            raise ValueError("pfa_superset must be 'union' or 'pedestrian'")
        if self.a_gr_m <= 0.0:
            raise ValueError("a_gr_m must be positive")
        r = tuple(float(v) for v in self.r_gr_px_per_m)
        if len(r) != 2 or r[0] <= 0.0 or r[1] <= 0.0:
            raise ValueError("r_gr_px_per_m must be two positive values")
        object.__setattr__(self, "r_gr_px_per_m", r)
        if self.linkage not in hac.LINKAGES:
            raise ValueError(f"linkage must be one of {hac.LINKAGES}")
        if self.category not in CATEGORIES + ("all",):
            raise ValueError(f"category must be one of {CATEGORIES + ('all',)}")
        if self.thresholds is not None:
            ts = tuple(float(t) for t in self.thresholds)
            if not ts:
                raise ValueError("thresholds must be nonempty when given")
            if any(t < 0.0 for t in ts):
                raise ValueError("thresholds must be >= 0")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("thresholds must be strictly ascending")
            object.__setattr__(self, "thresholds", ts)
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def config_to_dict(cfg: PipelineConfig) -> dict:
    return {
        "synth_templates": None
        if cfg.synth_templates is None
        else {name: count for name, count in cfg.synth_templates},
        "synth_frame_rate": cfg.synth_frame_rate,
        "tracks_path": cfg.tracks_path,
        "tracks_meta_path": cfg.tracks_meta_path,
        "recording_meta_path": cfg.recording_meta_path,
        "labels_path": cfg.labels_path,
        "t_pet_s": cfg.t_pet_s,
        "d_traj_m": cfg.d_traj_m,
        "var_pfa": cfg.var_pfa,
        "q_offset": cfg.q_offset,
        "pfa_superset": cfg.pfa_superset,
        "a_gr_m": cfg.a_gr_m,
        "r_gr_px_per_m": list(cfg.r_gr_px_per_m),
        "include_others_dynamics": cfg.include_others_dynamics,
        "var_pca": cfg.var_pca,
        "linkage": cfg.linkage,
        "seed": cfg.seed,
        "thresholds": None if cfg.thresholds is None else list(cfg.thresholds),
        "category": cfg.category,
        "workers": cfg.workers,
    }


def config_from_dict(obj: dict) -> PipelineConfig:
    known = set(config_to_dict(PipelineConfig()))
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(obj)
    if "synth_templates" in kwargs and kwargs["synth_templates"] is not None:
        st = kwargs["synth_templates"]
        if isinstance(st, dict):
            kwargs["synth_templates"] = tuple(sorted((k, int(v)) for k, v in st.items()))
        else:
            kwargs["synth_templates"] = tuple((str(n), int(c)) for n, c in st)
    if "r_gr_px_per_m" in kwargs:
        kwargs["r_gr_px_per_m"] = tuple(kwargs["r_gr_px_per_m"])
    if "thresholds" in kwargs and kwargs["thresholds"] is not None:
        kwargs["thresholds"] = tuple(kwargs["thresholds"])
    return PipelineConfig(**kwargs)


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def _dump_json(obj, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def _file_hash(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _signature(parts) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True).encode("utf-8")).hexdigest()


def track_to_dict(t: Trajectory) -> dict:
    out = {
        "track_id": t.track_id,
        "class": t.ru_class,
        "width": t.width,
        "length": t.length,
        "frames": [int(f) for f in t.frames],
    }
    for col, fieldname in _COLUMN_FIELDS.items():
        out[col] = [float(v) for v in getattr(t, fieldname)]
    return out


def track_from_dict(obj: dict) -> Trajectory:
    arrays = {"frames": np.asarray(obj["frames"], dtype=np.int64)}
    for col, fieldname in _COLUMN_FIELDS.items():
        arrays[fieldname] = np.asarray(obj[col], dtype=np.float64)
    return Trajectory(
        track_id=int(obj["track_id"]),
        ru_class=obj["class"],
        width=float(obj["width"]),
        length=float(obj["length"]),
        **arrays,
    )


def scenario_to_dict(s: ConcreteScenario) -> dict:
    return {
        "scenario_id": s.scenario_id,
        "recording_id": s.recording_id,
        "frame_rate": s.frame_rate,
        "category": s.category,
        "frame_start": s.frame_start,
        "frame_end": s.frame_end,
        "interaction": {
            "ego_id": s.interaction.ego_id,
            "challenger_id": s.interaction.challenger_id,
            "min_distance": s.interaction.min_distance,
            "pet": s.interaction.pet,
            "ego_frame_at_min": s.interaction.ego_frame_at_min,
            "challenger_frame_at_min": s.interaction.challenger_frame_at_min,
        },
        "ego": track_to_dict(s.ego),
        "challenger": track_to_dict(s.challenger),
        "others": [track_to_dict(o) for o in s.others],
    }


def scenario_from_dict(obj: dict) -> ConcreteScenario:
    rec = obj["interaction"]
    return ConcreteScenario(
        scenario_id=obj["scenario_id"],
        recording_id=obj["recording_id"],
        frame_rate=float(obj["frame_rate"]),
        ego=track_from_dict(obj["ego"]),
        challenger=track_from_dict(obj["challenger"]),
        others=tuple(track_from_dict(o) for o in obj["others"]),
        interaction=InteractionRecord(
            ego_id=int(rec["ego_id"]),
            challenger_id=int(rec["challenger_id"]),
            min_distance=float(rec["min_distance"]),
            pet=float(rec["pet"]),
            ego_frame_at_min=int(rec["ego_frame_at_min"]),
            challenger_frame_at_min=int(rec["challenger_frame_at_min"]),
        ),
        category=obj["category"],
        frame_start=int(obj["frame_start"]),
        frame_end=int(obj["frame_end"]),
    )


def load_scenarios(out_dir) -> list[ConcreteScenario]:
    obj = _load_json(Path(out_dir) / "scenarios.json")
    return [scenario_from_dict(s) for s in obj["scenarios"]]


def _label_file(out: Path) -> Path | None:
    for name in ("input/ground_truth.json", "input/labels.json"):
        p = out / name
        if p.exists():
            return p
    return None


def _stage_input(cfg: PipelineConfig, out: Path) -> list[str]:
    input_dir = out / "input"
    rels = ["input/tracks.csv", "input/tracksMeta.csv", "input/recordingMeta.csv"]
    if cfg.synth_templates is not None:
        rec, gt = synth.generate(cfg.synth_templates, cfg.seed, cfg.synth_frame_rate)
        write_recording(rec, input_dir)
        _dump_json(
            {"labels": gt.labels, "source": "ground_truth_synthetic"},
            input_dir / "ground_truth.json",
        )
        rels.append("input/ground_truth.json")
    else:
        rec = parse_recording(cfg.tracks_path, cfg.tracks_meta_path, cfg.recording_meta_path)
        write_recording(rec, input_dir)
        if cfg.labels_path is not None:
            obj = json.loads(Path(cfg.labels_path).read_text(encoding="utf-8"))
            labels = validation.LabelSet(
                labels={str(k): str(v) for k, v in obj["labels"].items()},
                source=obj.get("source", "manual"),
            )
            _dump_json({"labels": labels.labels, "source": labels.source}, input_dir / "labels.json")
            rels.append("input/labels.json")
    by_class: dict[str, int] = {}
    for t in rec.trajectories:
        by_class[t.ru_class] = by_class.get(t.ru_class, 0) + 1
    _dump_json(
        {
            "recording_id": rec.recording_id,
            "frame_rate": rec.frame_rate,
            "n_trajectories": len(rec.trajectories),
            "trajectories_by_class": by_class,
            "background_extent": list(rec.background_extent),
            "traffic_space_name": rec.traffic_space_name,
        },
        out / "recording_summary.json",
    )
    rels.append("recording_summary.json")
    return rels


def _stage_filter(cfg: PipelineConfig, out: Path) -> list[str]:
    rec = parse_recording(
        out / "input" / "tracks.csv",
        out / "input" / "tracksMeta.csv",
        out / "input" / "recordingMeta.csv",
    )
    params = FilterParams(d_traj=cfg.d_traj_m, t_pet=cfg.t_pet_s)
    scenarios = extract_scenarios(rec, params, workers=cfg.workers)
    if cfg.category != "all":
        scenarios = [s for s in scenarios if s.category == cfg.category]
    _dump_json(
        {
            "recording_id": rec.recording_id,
            "frame_rate": rec.frame_rate,
            "params": {"d_traj_m": cfg.d_traj_m, "t_pet_s": cfg.t_pet_s, "category": cfg.category},
            "n_scenarios": len(scenarios),
            "scenarios": [scenario_to_dict(s) for s in scenarios],
        },
        out / "scenarios.json",
    )
    return ["scenarios.json"]


def _stage_pfa(cfg: PipelineConfig, out: Path) -> list[str]:
    scenarios = load_scenarios(out)
    by_class: dict[str, list[np.ndarray]] = {}
    for s in scenarios:
        for t in (s.ego, s.challenger):
            by_class.setdefault(t.ru_class, []).append(t.motion_matrix())
    per_class = {}
    selected_by_class: dict[str, list[str]] = {}
    for ru_class in sorted(by_class):
        data = np.vstack(by_class[ru_class])
        if data.shape[0] < 2:
            per_class[ru_class] = {"skipped": "fewer than two samples"}
            continue
        try:
            result = principal_feature_analysis(
                data, var_pfa=cfg.var_pfa, q_offset=cfg.q_offset, seed=cfg.seed
            )
            names = [MOTION_COLUMNS[i] for i in result.selected_features]
            per_class[ru_class] = {
                "selected_features": names,
                "s": result.s,
                "q": result.q,
                "clamped": False,
                "feature_clusters": {
                    str(c): [MOTION_COLUMNS[m] for m in members]
                    for c, members in result.feature_clusters.items()
                },
                "cumulative_variance": list(result.cumulative_variance),
            }
        except ValueError as exc:
            if "exceeds the feature count" not in str(exc):
                raise
            # Retained dimension leaves no room for extra clusters; fall
            # back to keeping every feature for this class.
            names = list(MOTION_COLUMNS)
            per_class[ru_class] = {
                "selected_features": names,
                "s": len(MOTION_COLUMNS),
                "q": len(MOTION_COLUMNS),
                "clamped": True,
                "feature_clusters": {str(i): [n] for i, n in enumerate(MOTION_COLUMNS)},
                "cumulative_variance": None,
            }
        selected_by_class[ru_class] = names

    if not selected_by_class:
        raise ValueError("no road-user class provided enough samples for feature analysis")
    if cfg.pfa_superset == "pedestrian" and "pedestrian" in selected_by_class:
        superset = list(selected_by_class["pedestrian"])
        superset_mode = "pedestrian"
    else:
        merged = set()
        for names in selected_by_class.values():
            merged.update(names)
        superset = [c for c in MOTION_COLUMNS if c in merged]
        superset_mode = "union"
    channels = grids.channels_for_features(superset)
    _dump_json(
        {
            "var_pfa": cfg.var_pfa,
            "q_offset": cfg.q_offset,
            "per_class": per_class,
            "superset_mode": superset_mode,
            "superset": superset,
            "channels": list(channels),
        },
        out / "pfa.json",
    )
    return ["pfa.json"]


def _stage_grids(cfg: PipelineConfig, out: Path) -> list[str]:
    scenarios = sorted(load_scenarios(out), key=lambda s: s.scenario_id)
    channels = tuple(_load_json(out / "pfa.json")["channels"])
    gp = grids.GridParams(
        a_gr=cfg.a_gr_m,
        r_gr=cfg.r_gr_px_per_m,
        channels=channels,
        include_others_dynamics=cfg.include_others_dynamics,
    )
    rels = []
    keyframes = {}
    tensors = []
    for s in scenarios:
        kf, tensor = grids.build_tensor(s, gp)
        keyframes[s.scenario_id] = {
            "frame": kf.frame,
            "source": kf.source,
            "ego_pose": [float(v) for v in kf.ego_pose],
            "clamped": kf.clamped,
        }
        rel = f"grids/{s.scenario_id}.json"
        _dump_json(grids.tensor_to_dict(tensor), out / rel)
        rels.append(rel)
        tensors.append(tensor)
    _dump_json(keyframes, out / "keyframes.json")
    rels.append("keyframes.json")

    ci = grids.cluster_input_from_tensors(tensors, cfg.var_pca)
    h, w = gp.shape
    pca = None
    if ci.pca_model is not None:
        pca = {
            "s": ci.pca_model.s,
            "total_variance": ci.pca_model.total_variance,
            "retained_variance": ci.pca_model.retained_variance,
            "eigenvalues": [float(v) for v in ci.pca_model.eigenvalues],
        }
    _dump_json(
        {
            "height": h,
            "width": w,
            "channels": list(channels),
            "var_pca": cfg.var_pca,
            "row_ids": list(ci.row_ids),
            "kept_pixels": list(ci.kept_pixels),
            "pca_model": pca,
            "rows": [[float(v) for v in row] for row in ci.rows],
        },
        out / "cluster_input.json",
    )
    rels.append("cluster_input.json")
    return rels


def _stage_cluster(cfg: PipelineConfig, out: Path) -> list[str]:
    obj = _load_json(out / "cluster_input.json")
    matrix = SimpleNamespace(
        rows=np.asarray(obj["rows"], dtype=float),
        row_ids=tuple(obj["row_ids"]),
    )
    dend = hac.hac(matrix, linkage=cfg.linkage)
    _dump_json(hac.dendrogram_to_dict(dend), out / "dendrogram.json")
    return ["dendrogram.json"]


def auto_thresholds(dend: hac.Dendrogram, count: int = _AUTO_THRESHOLD_COUNT) -> tuple[float, ...]:
    """Evenly spaced cut heights from just above zero to the root height."""
    heights = dend.heights()
    top = float(heights.max()) if heights.size else 0.0
    if top <= 0.0:
        top = 1.0
    return tuple(top * (i + 1) / count for i in range(count))


def _stage_validate(cfg: PipelineConfig, out: Path) -> list[str]:
    dend = hac.dendrogram_from_dict(_load_json(out / "dendrogram.json"))
    label_path = _label_file(out)
    if label_path is None:
        _dump_json(
            {"skipped": "no label set available", "reports": []},
            out / "metrics.json",
        )
        return ["metrics.json"]
    obj = _load_json(label_path)
    labels = validation.LabelSet(labels=obj["labels"], source=obj["source"])
    thresholds = cfg.thresholds if cfg.thresholds is not None else auto_thresholds(dend)
    reports = validation.accuracy_curve(dend, labels, thresholds)
    _dump_json(
        {
            "label_source": labels.source,
            "thresholds": list(thresholds),
            "reports": [validation.report_to_dict(r) for r in reports],
        },
        out / "metrics.json",
    )
    return ["metrics.json"]


@dataclass(frozen=True)
class RunResult:
    status: str
    out_dir: Path
    manifest: dict = field(repr=False)


def _stage_signature(cfg: PipelineConfig, stage: str, hashes: dict[str, str]) -> str:
    if stage == "input":
        if cfg.synth_templates is not None:
            parts = {
                "mode": "synth",
                "templates": {n: c for n, c in cfg.synth_templates},
                "seed": cfg.seed,
                "frame_rate": cfg.synth_frame_rate,
            }
        else:
            parts = {
                "mode": "ingest",
                "tracks": _file_hash(Path(cfg.tracks_path)),
                "tracks_meta": _file_hash(Path(cfg.tracks_meta_path)),
                "recording_meta": _file_hash(Path(cfg.recording_meta_path)),
                "labels": _file_hash(Path(cfg.labels_path)) if cfg.labels_path else None,
            }
    elif stage == "filter":
        parts = {
            "inputs": {k: v for k, v in hashes.items() if k.startswith("input/")},
            "t_pet_s": cfg.t_pet_s,
            "d_traj_m": cfg.d_traj_m,
            "category": cfg.category,
        }
    elif stage == "pfa":
        parts = {
            "scenarios": hashes["scenarios.json"],
            "var_pfa": cfg.var_pfa,
            "q_offset": cfg.q_offset,
            "pfa_superset": cfg.pfa_superset,
            "seed": cfg.seed,
        }
    elif stage == "grids":
        parts = {
            "scenarios": hashes["scenarios.json"],
            "pfa": hashes["pfa.json"],
            "a_gr_m": cfg.a_gr_m,
            "r_gr_px_per_m": list(cfg.r_gr_px_per_m),
            "include_others_dynamics": cfg.include_others_dynamics,
            "var_pca": cfg.var_pca,
        }
    elif stage == "cluster":
        parts = {"cluster_input": hashes["cluster_input.json"], "linkage": cfg.linkage}
    elif stage == "validate":
        label_rel = next(
            (r for r in ("input/ground_truth.json", "input/labels.json") if r in hashes),
            None,
        )
        parts = {
            "dendrogram": hashes["dendrogram.json"],
            "labels": hashes.get(label_rel) if label_rel else None,
            "thresholds": None if cfg.thresholds is None else list(cfg.thresholds),
        }
    else:
        raise ValueError(f"unknown stage {stage!r}")
    return _signature(parts)


_STAGE_FUNCS = {
    "input": _stage_input,
    "filter": _stage_filter,
    "pfa": _stage_pfa,
    "grids": _stage_grids,
    "cluster": _stage_cluster,
    "validate": _stage_validate,
}


def run(cfg: PipelineConfig, out_dir, stop_after: str | None = None) -> RunResult:
    """Execute the pipeline into ``out_dir`` with stage-level caching.

    Returns status "ok", "partial" (stopped early via ``stop_after``), or
    "no_relevant_scenarios" (empty filter result; downstream stages are
    not run). Any stage failure raises StageError naming the stage.
    """
    if stop_after is not None and stop_after not in STAGES:
        raise ValueError(f"unknown stage {stop_after!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "run_manifest.json"
    previous = {}
    if manifest_path.exists():
        try:
            previous = _load_json(manifest_path).get("stages", {})
        except (ValueError, OSError):
            previous = {}

    hashes: dict[str, str] = {}
    stages_out: dict[str, dict] = {}
    status = "ok"

    def record(stage: str, signature: str, rels: list[str], was_cached: bool):
        outputs = {}
        for rel in sorted(rels):
            outputs[rel] = _file_hash(out / rel)
        hashes.update(outputs)
        stages_out[stage] = {
            "signature": signature,
            "cached": was_cached,
            "outputs": outputs,
        }

    def cached(stage: str, signature: str) -> bool:
        prev = previous.get(stage)
        if not prev or prev.get("signature") != signature:
            return False
        for rel, digest in prev.get("outputs", {}).items():
            p = out / rel
            if not p.exists() or _file_hash(p) != digest:
                return False
        return True

    for stage in STAGES:
        try:
            signature = _stage_signature(cfg, stage, hashes)
            if cached(stage, signature):
                record(stage, signature, list(previous[stage]["outputs"]), True)
            else:
                rels = _STAGE_FUNCS[stage](cfg, out)
                record(stage, signature, rels, False)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, exc) from exc
        if stage == "filter":
            if _load_json(out / "scenarios.json")["n_scenarios"] == 0:
                status = "no_relevant_scenarios"
                break
        if stage == stop_after:
            if stage != STAGES[-1]:
                status = "partial"
            break

    manifest = {
        "artifact_version": ARTIFACT_VERSION,
        "package_version": __version__,
        "status": status,
        "stop_after": stop_after,
        "config": config_to_dict(cfg),
        "stages": stages_out,
    }
    _dump_json(manifest, manifest_path)
    return RunResult(status=status, out_dir=out, manifest=manifest)
