"""Pipeline orchestration tests: config handling, staged runs, caching,
artifact determinism, and the command line wrapper."""
from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from scenex import cli, grids, pipeline, synth
from scenex.petfilter import ConcreteScenario, InteractionRecord
from scenex.pipeline import (
    PipelineConfig,
    RunResult,
    StageError,
    auto_thresholds,
    config_from_dict,
    config_to_dict,
    load_config,
    load_scenarios,
    run,
    scenario_from_dict,
    scenario_to_dict,
    track_from_dict,
    track_to_dict,
)

from conftest import make_traj

MIX = (
    (synth.LEFT_TURN_ONCOMING, 2),
    (synth.PEDESTRIAN_CROSSING, 2),
    (synth.STRAIGHT_FOLLOW, 2),
)


def _tree(root: Path, exclude: tuple[str, ...] = ()) -> dict[str, bytes]:
    out = {}
    for p in sorted(Path(root).rglob("*")):
        if p.is_file():
            rel = str(p.relative_to(root))
            if rel not in exclude:
                out[rel] = p.read_bytes()
    return out


@pytest.fixture(scope="module")
def base_run(tmp_path_factory):
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    out = tmp_path_factory.mktemp("base")
    result = run(cfg, out)
    assert result.status == "ok"
    return cfg, Path(out), result


# ------------------------------------------------------------ configuration


def test_config_rejects_both_input_modes(tmp_path):
    with pytest.raises(ValueError, match="not both"):
        PipelineConfig(
            synth_templates=MIX,
            tracks_path="a.csv",
            tracks_meta_path="b.csv",
            recording_meta_path="c.csv",
        )


def test_config_rejects_missing_input():
    with pytest.raises(ValueError, match="no input"):
        PipelineConfig(synth_templates=None)
    with pytest.raises(ValueError, match="no input"):
        PipelineConfig(synth_templates=None, tracks_path="a.csv")


def test_config_rejects_bad_values():
    bad = [
        {"synth_templates": (("imaginary_conflict", 1),)},
        {"synth_templates": ((synth.STRAIGHT_FOLLOW, -1),)},
        {"synth_frame_rate": 0.0},
        {"t_pet_s": 0.0},
        {"d_traj_m": -1.0},
        {"var_pfa": 1.0},
        {"var_pfa": 0.0},
        {"var_pca": 0.0},
        {"var_pca": 1.5},
        {"q_offset": 0},
        {"pfa_superset": "intersection"},
        {"a_gr_m": 0.0},
        {"r_gr_px_per_m": (1.0,)},
        {"r_gr_px_per_m": (1.0, 0.0)},
        {"linkage": "median"},
        {"category": "e_to_moose"},
        {"thresholds": ()},
        {"thresholds": (-1.0, 2.0)},
        {"thresholds": (2.0, 2.0)},
        {"thresholds": (3.0, 1.0)},
        {"workers": 0},
    ]
    for overrides in bad:
        with pytest.raises(ValueError):
            PipelineConfig(**overrides)


def test_config_canonicalizes_template_order():
    cfg = PipelineConfig(
        synth_templates=((synth.STRAIGHT_FOLLOW, 1), (synth.BICYCLE_CROSSING, 2))
    )
    assert cfg.synth_templates == (
        (synth.BICYCLE_CROSSING, 2),
        (synth.STRAIGHT_FOLLOW, 1),
    )


def test_config_dict_round_trip():
    cfg = PipelineConfig(
        synth_templates=MIX,
        t_pet_s=2.0,
        r_gr_px_per_m=(2.0, 0.5),
        thresholds=(0.5, 1.5, 9.0),
        seed=11,
        workers=2,
    )
    again = config_from_dict(config_to_dict(cfg))
    assert again == cfg


def test_config_from_dict_accepts_template_mapping():
    obj = config_to_dict(PipelineConfig(synth_templates=MIX))
    assert isinstance(obj["synth_templates"], dict)
    cfg = config_from_dict(obj)
    assert cfg.synth_templates == tuple(sorted(MIX))


def test_config_from_dict_rejects_unknown_keys():
    obj = config_to_dict(PipelineConfig())
    obj["grid_size"] = 64
    with pytest.raises(ValueError, match="grid_size"):
        config_from_dict(obj)


def test_load_config_reads_json_file(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=4, linkage="average")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(cfg)), encoding="utf-8")
    assert load_config(path) == cfg


# -------------------------------------------------------- dict round trips


def test_track_dict_round_trip():
    t = make_traj(7, np.linspace(0.0, 5.0, 9), np.linspace(0.0, 1.0, 9))
    again = track_from_dict(track_to_dict(t))
    assert again.track_id == 7 and again.ru_class == t.ru_class
    np.testing.assert_array_equal(again.frames, t.frames)
    np.testing.assert_allclose(again.x, t.x, rtol=0, atol=0)
    np.testing.assert_allclose(again.lat_vel, t.lat_vel, rtol=0, atol=0)


def test_scenario_dict_round_trip():
    ego = make_traj(1, np.linspace(0.0, 10.0, 12), np.zeros(12))
    ch = make_traj(2, np.full(12, 5.0), np.linspace(-4.0, 4.0, 12), heading=np.pi / 2)
    s = ConcreteScenario(
        scenario_id="e_to_v_000001_000002",
        recording_id="recX",
        frame_rate=25.0,
        ego=ego,
        challenger=ch,
        others=(make_traj(3, np.full(12, 20.0), np.full(12, 20.0)),),
        interaction=InteractionRecord(
            ego_id=1,
            challenger_id=2,
            min_distance=0.4,
            pet=0.2,
            ego_frame_at_min=6,
            challenger_frame_at_min=5,
        ),
        category="e_to_v",
        frame_start=0,
        frame_end=11,
    )
    again = scenario_from_dict(scenario_to_dict(s))
    assert again.scenario_id == s.scenario_id
    assert again.interaction == s.interaction
    assert len(again.others) == 1
    np.testing.assert_allclose(again.challenger.heading, ch.heading, rtol=0, atol=0)


# ------------------------------------------------------------- staged runs


def test_run_produces_expected_artifacts(base_run):
    _, out, result = base_run
    for rel in (
        "input/tracks.csv",
        "input/tracksMeta.csv",
        "input/recordingMeta.csv",
        "input/ground_truth.json",
        "recording_summary.json",
        "scenarios.json",
        "pfa.json",
        "keyframes.json",
        "cluster_input.json",
        "dendrogram.json",
        "metrics.json",
        "run_manifest.json",
    ):
        assert (out / rel).exists(), rel
    assert set(result.manifest["stages"]) == set(pipeline.STAGES)
    assert all(not s["cached"] for s in result.manifest["stages"].values())


def test_run_scenarios_match_ground_truth(base_run):
    _, out, _ = base_run
    gt = json.loads((out / "input" / "ground_truth.json").read_text())
    scen = json.loads((out / "scenarios.json").read_text())
    ids = [s["scenario_id"] for s in scen["scenarios"]]
    assert sorted(ids) == sorted(gt["labels"])
    assert scen["n_scenarios"] == len(ids) == 10
    keys = [(s["recording_id"], s["interaction"]["ego_id"], s["interaction"]["challenger_id"]) for s in scen["scenarios"]]
    assert keys == sorted(keys)
    loaded = load_scenarios(out)
    assert [s.scenario_id for s in loaded] == ids


def test_recording_summary_contents(base_run):
    _, out, _ = base_run
    summary = json.loads((out / "recording_summary.json").read_text())
    assert summary["n_trajectories"] == sum(summary["trajectories_by_class"].values())
    assert summary["n_trajectories"] == 12
    assert len(summary["background_extent"]) == 4
    assert summary["frame_rate"] == 25.0


def test_pfa_artifact_contents(base_run):
    _, out, _ = base_run
    pfa = json.loads((out / "pfa.json").read_text())
    assert set(pfa["per_class"]) == {"car", "pedestrian"}
    for entry in pfa["per_class"].values():
        assert entry["selected_features"]
        assert entry["q"] >= entry["s"]
    superset = pfa["superset"]
    assert superset == [c for c in pipeline.MOTION_COLUMNS if c in set(superset)]
    assert pfa["channels"] == list(grids.channels_for_features(tuple(superset)))
    assert pfa["superset_mode"] == "union"


def test_keyframes_and_grids_artifacts(base_run):
    _, out, _ = base_run
    scen_ids = [s["scenario_id"] for s in json.loads((out / "scenarios.json").read_text())["scenarios"]]
    keyframes = json.loads((out / "keyframes.json").read_text())
    assert sorted(keyframes) == sorted(scen_ids)
    for entry in keyframes.values():
        assert set(entry) == {"frame", "source", "ego_pose", "clamped"}
        assert len(entry["ego_pose"]) == 3
        assert entry["source"] in ("ego", "challenger")
    grid_files = sorted(p.name for p in (out / "grids").glob("*.json"))
    assert grid_files == [f"{sid}.json" for sid in sorted(scen_ids)]


def test_cluster_input_artifact(base_run):
    cfg, out, _ = base_run
    ci = json.loads((out / "cluster_input.json").read_text())
    scen_ids = sorted(
        s["scenario_id"] for s in json.loads((out / "scenarios.json").read_text())["scenarios"]
    )
    assert list(ci["row_ids"]) == scen_ids
    assert ci["height"] == 30 and ci["width"] == 30
    assert len(ci["rows"]) == len(scen_ids)
    width = len(ci["rows"][0])
    assert all(len(r) == width for r in ci["rows"])
    if ci["pca_model"] is not None:
        assert ci["pca_model"]["s"] == width


def test_metrics_use_auto_thresholds_by_default(base_run):
    _, out, _ = base_run
    metrics = json.loads((out / "metrics.json").read_text())
    from scenex import hac

    dend = hac.dendrogram_from_dict(json.loads((out / "dendrogram.json").read_text()))
    expect = auto_thresholds(dend)
    assert metrics["thresholds"] == pytest.approx(list(expect))
    assert len(metrics["reports"]) == len(expect) == 30
    assert metrics["label_source"] == "ground_truth_synthetic"
    counts = [r["n_clusters"] for r in metrics["reports"]]
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_auto_thresholds_shape():
    from scenex import hac

    rows = np.array([[0.0], [1.0], [3.0], [7.0]])
    dend = hac.hac(type("M", (), {"rows": rows, "row_ids": ("a", "b", "c", "d")})())
    ts = auto_thresholds(dend, count=5)
    assert len(ts) == 5
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert ts[-1] == pytest.approx(float(dend.heights().max()))


def test_explicit_thresholds_are_echoed(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=3, thresholds=(0.5, 2.0, 50.0))
    result = run(cfg, tmp_path / "run")
    assert result.status == "ok"
    metrics = json.loads((tmp_path / "run" / "metrics.json").read_text())
    assert metrics["thresholds"] == [0.5, 2.0, 50.0]
    assert len(metrics["reports"]) == 3


def test_run_is_deterministic_across_directories(base_run, tmp_path):
    cfg, out, _ = base_run
    result = run(cfg, tmp_path / "again")
    assert result.status == "ok"
    assert _tree(out) == _tree(tmp_path / "again")


def test_rerun_uses_cache_everywhere(base_run, tmp_path):
    cfg, _, _ = base_run
    out = tmp_path / "r"
    first = run(cfg, out)
    before = _tree(out, exclude=("run_manifest.json",))
    result = run(cfg, out)
    assert result.status == "ok"
    assert all(s["cached"] for s in result.manifest["stages"].values())
    # Only the cached flags may differ between the two manifests.
    for name, stage in result.manifest["stages"].items():
        assert stage["signature"] == first.manifest["stages"][name]["signature"]
        assert stage["outputs"] == first.manifest["stages"][name]["outputs"]
    assert _tree(out, exclude=("run_manifest.json",)) == before


def test_param_change_recomputes_downstream_only(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    out = tmp_path / "r"
    run(cfg, out)
    dend_before = (out / "dendrogram.json").read_bytes()
    result = run(replace(cfg, linkage="complete"), out)
    cached = {name: s["cached"] for name, s in result.manifest["stages"].items()}
    assert cached == {
        "input": True,
        "filter": True,
        "pfa": True,
        "grids": True,
        "cluster": False,
        "validate": False,
    }
    assert (out / "dendrogram.json").read_bytes() != dend_before


def test_filter_param_change_recomputes_from_filter(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    out = tmp_path / "r"
    run(cfg, out)
    result = run(replace(cfg, d_traj_m=1.5), out)
    cached = {name: s["cached"] for name, s in result.manifest["stages"].items()}
    assert cached["input"] is True
    assert cached["filter"] is False


def test_stop_after_partial_then_resume(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    out = tmp_path / "r"
    result = run(cfg, out, stop_after="filter")
    assert result.status == "partial"
    assert set(result.manifest["stages"]) == {"input", "filter"}
    assert (out / "scenarios.json").exists()
    assert not (out / "pfa.json").exists()
    resumed = run(cfg, out)
    assert resumed.status == "ok"
    assert resumed.manifest["stages"]["input"]["cached"]
    assert resumed.manifest["stages"]["filter"]["cached"]
    assert not resumed.manifest["stages"]["pfa"]["cached"]


def test_stop_after_last_stage_reports_ok(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    result = run(cfg, tmp_path / "r", stop_after="validate")
    assert result.status == "ok"


def test_stop_after_unknown_stage(tmp_path):
    cfg = PipelineConfig(synth_templates=MIX)
    with pytest.raises(ValueError, match="unknown stage"):
        run(cfg, tmp_path / "r", stop_after="polish")


def test_no_relevant_scenarios_short_circuits(tmp_path):
    cfg = PipelineConfig(synth_templates=((synth.STRAIGHT_UNINVOLVED, 2),), seed=1)
    result = run(cfg, tmp_path / "r")
    assert result.status == "no_relevant_scenarios"
    assert set(result.manifest["stages"]) == {"input", "filter"}
    assert not (tmp_path / "r" / "metrics.json").exists()
    manifest = json.loads((tmp_path / "r" / "run_manifest.json").read_text())
    assert manifest["status"] == "no_relevant_scenarios"


def test_manifest_matches_disk_and_config_round_trips(base_run):
    cfg, out, result = base_run
    on_disk = json.loads((out / "run_manifest.json").read_text())
    assert on_disk == result.manifest
    assert config_from_dict(on_disk["config"]) == cfg
    for stage in on_disk["stages"].values():
        for rel, digest in stage["outputs"].items():
            assert pipeline._file_hash(out / rel) == digest


# ----------------------------------------------------------- ingest parity


def test_ingest_mode_reproduces_synth_artifacts(base_run, tmp_path):
    _, synth_out, _ = base_run
    gt = json.loads((synth_out / "input" / "ground_truth.json").read_text())
    labels_path = tmp_path / "labels.json"
    labels_path.write_text(json.dumps(gt), encoding="utf-8")
    cfg = PipelineConfig(
        synth_templates=None,
        tracks_path=str(synth_out / "input" / "tracks.csv"),
        tracks_meta_path=str(synth_out / "input" / "tracksMeta.csv"),
        recording_meta_path=str(synth_out / "input" / "recordingMeta.csv"),
        labels_path=str(labels_path),
        seed=3,
    )
    out = tmp_path / "ingest"
    result = run(cfg, out)
    assert result.status == "ok"
    # The canonical CSV stores headings in degrees while the engine works
    # in radians, so re-parsing perturbs headings by a few ulps; the two
    # runs agree semantically rather than byte for byte.
    ours = json.loads((out / "scenarios.json").read_text())
    theirs = json.loads((synth_out / "scenarios.json").read_text())
    assert [s["scenario_id"] for s in ours["scenarios"]] == [
        s["scenario_id"] for s in theirs["scenarios"]
    ]
    assert [s["interaction"] for s in ours["scenarios"]] == [
        s["interaction"] for s in theirs["scenarios"]
    ]
    ci_a = json.loads((out / "cluster_input.json").read_text())
    ci_b = json.loads((synth_out / "cluster_input.json").read_text())
    assert ci_a["row_ids"] == ci_b["row_ids"]
    assert ci_a["kept_pixels"] == ci_b["kept_pixels"]
    np.testing.assert_allclose(ci_a["rows"], ci_b["rows"], atol=1e-9)
    d_a = json.loads((out / "dendrogram.json").read_text())
    d_b = json.loads((synth_out / "dendrogram.json").read_text())
    assert d_a["row_ids"] == d_b["row_ids"]
    assert [(l, r, s) for l, r, _, s in d_a["merges"]] == [
        (l, r, s) for l, r, _, s in d_b["merges"]
    ]
    np.testing.assert_allclose(
        [m[2] for m in d_a["merges"]], [m[2] for m in d_b["merges"]], atol=1e-9
    )
    m_a = json.loads((out / "metrics.json").read_text())
    m_b = json.loads((synth_out / "metrics.json").read_text())
    assert m_a["label_source"] == m_b["label_source"]
    assert [r["n_clusters"] for r in m_a["reports"]] == [
        r["n_clusters"] for r in m_b["reports"]
    ]
    assert [r["overall_accuracy"] for r in m_a["reports"]] == [
        r["overall_accuracy"] for r in m_b["reports"]
    ]


def test_ingest_without_labels_skips_validation(base_run, tmp_path):
    _, synth_out, _ = base_run
    cfg = PipelineConfig(
        synth_templates=None,
        tracks_path=str(synth_out / "input" / "tracks.csv"),
        tracks_meta_path=str(synth_out / "input" / "tracksMeta.csv"),
        recording_meta_path=str(synth_out / "input" / "recordingMeta.csv"),
    )
    out = tmp_path / "r"
    result = run(cfg, out)
    assert result.status == "ok"
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["reports"] == []
    assert "skipped" in metrics


def test_ingest_rejects_bad_label_source(base_run, tmp_path):
    _, synth_out, _ = base_run
    labels_path = tmp_path / "labels.json"
    labels_path.write_text(
        json.dumps({"labels": {"a": "b"}, "source": "vibes"}), encoding="utf-8"
    )
    cfg = PipelineConfig(
        synth_templates=None,
        tracks_path=str(synth_out / "input" / "tracks.csv"),
        tracks_meta_path=str(synth_out / "input" / "tracksMeta.csv"),
        recording_meta_path=str(synth_out / "input" / "recordingMeta.csv"),
        labels_path=str(labels_path),
    )
    with pytest.raises(StageError) as err:
        run(cfg, tmp_path / "r")
    assert err.value.stage == "input"


# ------------------------------------------------------------ stage errors


def test_malformed_csv_fails_in_input_stage(tmp_path):
    tracks = tmp_path / "tracks.csv"
    tracks.write_text("not,a,real,header\n1,2,3,4\n", encoding="utf-8")
    meta = tmp_path / "tracksMeta.csv"
    meta.write_text("also,bad\n1,2\n", encoding="utf-8")
    rec = tmp_path / "recordingMeta.csv"
    rec.write_text("nope\n1\n", encoding="utf-8")
    cfg = PipelineConfig(
        synth_templates=None,
        tracks_path=str(tracks),
        tracks_meta_path=str(meta),
        recording_meta_path=str(rec),
    )
    with pytest.raises(StageError) as err:
        run(cfg, tmp_path / "r")
    assert err.value.stage == "input"
    assert "stage 'input' failed" in str(err.value)


def test_stage_error_names_failing_stage(tmp_path, monkeypatch):
    def boom(cfg, out):
        raise RuntimeError("synthetic fault")

    monkeypatch.setitem(pipeline._STAGE_FUNCS, "grids", boom)
    cfg = PipelineConfig(synth_templates=MIX, seed=3)
    with pytest.raises(StageError) as err:
        run(cfg, tmp_path / "r")
    assert err.value.stage == "grids"
    assert isinstance(err.value.cause, RuntimeError)


# -------------------------------------------------------------------- cli


def _write_cfg(tmp_path, cfg) -> str:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(cfg)), encoding="utf-8")
    return str(path)


def test_cli_run_and_cache(tmp_path, capsys):
    cfg_path = _write_cfg(tmp_path, PipelineConfig(synth_templates=MIX, seed=3))
    out = tmp_path / "r"
    code = cli.main(["run", "--config", cfg_path, "--out", str(out)])
    assert code == 0
    assert "status ok" in capsys.readouterr().out
    assert (out / "metrics.json").exists()
    code = cli.main(["run", "--config", cfg_path, "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "ran nothing" in text


def test_cli_stage_subcommands_stop_early(tmp_path, capsys):
    cfg_path = _write_cfg(tmp_path, PipelineConfig(synth_templates=MIX, seed=3))
    out = tmp_path / "r"
    assert cli.main(["filter", "--config", cfg_path, "--out", str(out)]) == 0
    assert "status partial" in capsys.readouterr().out
    assert (out / "scenarios.json").exists()
    assert not (out / "dendrogram.json").exists()
    assert cli.main(["cluster", "--config", cfg_path, "--out", str(out)]) == 0
    capsys.readouterr()
    assert (out / "dendrogram.json").exists()
    assert not (out / "metrics.json").exists()


def test_cli_exit_code_when_no_scenarios(tmp_path, capsys):
    cfg = PipelineConfig(synth_templates=((synth.STRAIGHT_UNINVOLVED, 2),))
    cfg_path = _write_cfg(tmp_path, cfg)
    code = cli.main(["run", "--config", cfg_path, "--out", str(tmp_path / "r")])
    assert code == 3
    assert "no relevant scenarios" in capsys.readouterr().out


def test_cli_synth_command(tmp_path, capsys):
    out = tmp_path / "r"
    code = cli.main(
        [
            "synth",
            "--out",
            str(out),
            "--template",
            f"{synth.STRAIGHT_FOLLOW}=2",
            "--frame-rate",
            "10",
        ]
    )
    assert code == 0
    capsys.readouterr()
    assert (out / "input" / "tracks.csv").exists()
    assert (out / "input" / "ground_truth.json").exists()
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["config"]["synth_templates"] == {synth.STRAIGHT_FOLLOW: 2}
    assert manifest["config"]["synth_frame_rate"] == 10.0
    assert manifest["status"] == "partial"


def test_cli_synth_rejects_bad_template_argument(tmp_path, capsys):
    code = cli.main(["synth", "--out", str(tmp_path / "r"), "--template", "nonsense"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_seed_override(tmp_path, capsys):
    cfg_path = _write_cfg(tmp_path, PipelineConfig(synth_templates=MIX, seed=3))
    out = tmp_path / "r"
    assert cli.main(["synth", "--config", cfg_path, "--out", str(out), "--seed", "9"]) == 0
    capsys.readouterr()
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["config"]["seed"] == 9


def test_cli_ingest_command(base_run, tmp_path, capsys):
    _, synth_out, _ = base_run
    out = tmp_path / "r"
    code = cli.main(
        [
            "ingest",
            "--tracks",
            str(synth_out / "input" / "tracks.csv"),
            "--tracks-meta",
            str(synth_out / "input" / "tracksMeta.csv"),
            "--recording-meta",
            str(synth_out / "input" / "recordingMeta.csv"),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    from scenex.trajectory import parse_recording

    ours = parse_recording(
        out / "input" / "tracks.csv",
        out / "input" / "tracksMeta.csv",
        out / "input" / "recordingMeta.csv",
    )
    theirs = parse_recording(
        synth_out / "input" / "tracks.csv",
        synth_out / "input" / "tracksMeta.csv",
        synth_out / "input" / "recordingMeta.csv",
    )
    assert [t.track_id for t in ours.trajectories] == [
        t.track_id for t in theirs.trajectories
    ]
    for a, b in zip(ours.trajectories, theirs.trajectories):
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_allclose(a.heading, b.heading, atol=1e-12)


def test_cli_ingest_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("junk\n", encoding="utf-8")
    code = cli.main(
        [
            "ingest",
            "--tracks",
            str(bad),
            "--tracks-meta",
            str(bad),
            "--recording-meta",
            str(bad),
            "--out",
            str(tmp_path / "r"),
        ]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "error: stage 'input' failed" in err


def test_cli_grids_png_export(tmp_path, capsys):
    cfg_path = _write_cfg(
        tmp_path, PipelineConfig(synth_templates=((synth.STRAIGHT_FOLLOW, 1),), seed=3)
    )
    out = tmp_path / "r"
    code = cli.main(["grids", "--config", cfg_path, "--out", str(out), "--png"])
    assert code == 0
    capsys.readouterr()
    pfa = json.loads((out / "pfa.json").read_text())
    n_grids = len(list((out / "grids").glob("*.json")))
    pngs = list((out / "grids_png").glob("*.png"))
    assert n_grids > 0
    assert len(pngs) == n_grids * len(pfa["channels"])


def test_cli_usage_errors_exit_two(tmp_path):
    with pytest.raises(SystemExit) as err:
        cli.main(["run"])  # missing --out
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.main(["not-a-command"])
    assert err.value.code == 2


def test_cli_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["--version"])
    assert err.value.code == 0
    from scenex import __version__

    assert __version__ in capsys.readouterr().out
