use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ConfigFile, GridDims};
use super::output::{Inputs, OutDir};
use super::{AnalyzeArgs, BuildModelsArgs, EstimateArgs, GenArgs, IngestArgs, ModelKind, SimulateArgs};
use crate::dataset::{summarize, ColumnMapping, SocialGraph, UserId};
use crate::error::{Error, Result};
use crate::mobility::{
    build_group_models, export_trace, generate_fmm_traces, generate_rwp_traces, parse_trace, select_group, FmmConfig,
    GroupModels, RwpConfig, SpeedPolicy, StartPolicy, Trace, TraceFormat,
};
use crate::population::{estimate_population, SampleRun};
use crate::simnet::{compare_models, run_simulation, Contention, SimConfig, SimReport};
use crate::social::{friendship_distance_curve, pair_features, EligibilityFilter, KnnClassifier, MatchWindow, PairFeatures};

fn load_snapshot(inputs: &mut Inputs, path: &Path) -> Result<SocialGraph> {
    SocialGraph::read_snapshot(inputs.read(path)?.as_slice())
}

fn load_config(inputs: &mut Inputs, path: Option<&PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => inputs.read_string(p)?.parse(),
        None => Ok(ConfigFile::default()),
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Serialize)]
struct IngestConfig<'a> {
    checkins: &'a Path,
    edges: Option<&'a Path>,
    mapping: &'a ColumnMapping,
}

pub fn ingest(a: IngestArgs) -> Result<Vec<String>> {
    let mut inputs = Inputs::default();
    let mapping = a.mapping.clone().unwrap_or_default();
    let mut graph = SocialGraph::new();
    let checkins = graph.ingest_checkins(inputs.read(&a.checkins)?.as_slice(), &mapping)?;
    let edges = match &a.edges {
        Some(p) => Some(graph.ingest_edges(inputs.read(p)?.as_slice())?),
        None => None,
    };

    let mut out = OutDir::create(&a.out_dir)?;
    let mut snapshot = Vec::new();
    graph.write_snapshot(&mut snapshot)?;
    out.write("snapshot.json", &snapshot)?;
    out.write("summary.csv", summarize(&graph).to_csv().as_bytes())?;
    out.write(
        "ingest_report.json",
        &json_line(&serde_json::json!({ "checkins": checkins, "edges": edges }))?,
    )?;
    let config = IngestConfig {
        checkins: &a.checkins,
        edges: a.edges.as_deref(),
        mapping: &mapping,
    };
    out.finish("ingest", &config, None, inputs)?;
    Ok(vec![format!(
        "ingested {} users, {} checkins, {} friendships ({} checkin rows rejected)",
        graph.user_count(),
        graph.checkin_count(),
        graph.edge_count(),
        checkins.rejected.len()
    )])
}

#[derive(Serialize)]
struct AnalyzeConfig<'a> {
    snapshot: &'a Path,
    pairs: usize,
    bin_edges_km: &'a [f64],
    time_window_s: f64,
    space_window_km: f64,
    max_span_km: Option<f64>,
    k: usize,
}

#[derive(Serialize)]
struct KnnCheck {
    k: usize,
    training_pairs: usize,
    test_pairs: usize,
    accuracy: f64,
}

pub fn analyze(a: AnalyzeArgs) -> Result<Vec<String>> {
    if a.bins == 0 || !(a.max_km > 0.0) {
        return Err(Error::Config("need at least one bin and a positive --max-km".into()));
    }
    let mut inputs = Inputs::default();
    let graph = load_snapshot(&mut inputs, &a.snapshot)?;
    let window = MatchWindow::new(a.time_window, a.space_window)?;
    let filter = EligibilityFilter {
        max_span_km: a.max_span_km,
    };
    let edges: Vec<f64> = (0..=a.bins).map(|i| a.max_km * i as f64 / a.bins as f64).collect();
    let fd = friendship_distance_curve(&graph, a.pairs, &edges, &filter, a.seed)?;

    let mut curve = String::from("bin_low_km,bin_high_km,center_km,friend_fraction,nonfriend_fraction\n");
    let centers = fd.curve.bin_centers();
    for i in 0..a.bins {
        let _ = writeln!(
            curve,
            "{},{},{},{},{}",
            edges[i], edges[i + 1], centers[i], fd.curve.friend_fraction[i], fd.curve.nonfriend_fraction[i]
        );
    }

    let features = fd
        .pairs
        .friends
        .iter()
        .chain(&fd.pairs.strangers)
        .map(|(x, y)| pair_features(&graph, x, y, &window))
        .collect::<Result<Vec<PairFeatures>>>()?;
    let mut feature_csv = String::from("user_a,user_b,is_friend,avg_distance_km,checkin_similarity\n");
    for f in &features {
        let _ = writeln!(
            feature_csv,
            "{},{},{},{},{}",
            f.user_a, f.user_b, f.is_friend, f.avg_distance_km, f.checkin_similarity
        );
    }

    // Alternate pairs of each class between training and test halves.
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [&features[..fd.pairs.friends.len()], &features[fd.pairs.friends.len()..]] {
        for (i, f) in class.iter().enumerate() {
            if i % 2 == 0 { &mut train } else { &mut test }.push(f.clone());
        }
    }
    let knn = if test.is_empty() || train.len() < a.k {
        log::warn!("too few pairs for a kNN check with k = {}", a.k);
        None
    } else {
        let clf = KnnClassifier::fit(&train, a.k)?;
        let correct = test
            .iter()
            .filter(|f| clf.predict(f.avg_distance_km, f.checkin_similarity).is_friend == f.is_friend)
            .count();
        Some(KnnCheck {
            k: a.k,
            training_pairs: train.len(),
            test_pairs: test.len(),
            accuracy: correct as f64 / test.len() as f64,
        })
    };

    let decay = fd.curve.friend_decay_rate();
    let report = serde_json::json!({
        "friend_pairs": fd.pairs.friends.len(),
        "nonfriend_pairs": fd.pairs.strangers.len(),
        "friend_pairs_beyond_range": fd.curve.friend_outside,
        "nonfriend_pairs_beyond_range": fd.curve.nonfriend_outside,
        "friend_decay_rate_per_km": decay,
        "knn": knn,
    });

    let mut out = OutDir::create(&a.out_dir)?;
    out.write("friendship_distance.csv", curve.as_bytes())?;
    out.write("pair_features.csv", feature_csv.as_bytes())?;
    out.write("analysis.json", &json_line(&report)?)?;
    let config = AnalyzeConfig {
        snapshot: &a.snapshot,
        pairs: a.pairs,
        bin_edges_km: &edges,
        time_window_s: a.time_window,
        space_window_km: a.space_window,
        max_span_km: a.max_span_km,
        k: a.k,
    };
    out.finish("analyze", &config, Some(a.seed), inputs)?;

    let mut lines = vec![format!(
        "{} friend / {} non-friend pairs; friend-fraction decay rate {}",
        fd.pairs.friends.len(),
        fd.pairs.strangers.len(),
        decay.map_or("undefined".to_owned(), |d| format!("{d:.6} per km"))
    )];
    if let Some(k) = knn {
        lines.push(format!("kNN (k = {}) hold-out accuracy {:.4}", k.k, k.accuracy));
    }
    Ok(lines)
}

#[derive(Serialize)]
struct EstimateConfig<'a> {
    snapshot: &'a Path,
    samples: usize,
    sample_size: usize,
}

pub fn estimate(a: EstimateArgs) -> Result<Vec<String>> {
    let mut inputs = Inputs::default();
    let graph = load_snapshot(&mut inputs, &a.snapshot)?;
    let run = SampleRun::draw(&graph, a.samples, a.sample_size, a.seed)?;
    let est = estimate_population(&run)?;
    let mut out = OutDir::create(&a.out_dir)?;
    out.write("population.json", &json_line(&est)?)?;
    let config = EstimateConfig {
        snapshot: &a.snapshot,
        samples: a.samples,
        sample_size: a.sample_size,
    };
    out.finish("estimate", &config, Some(a.seed), inputs)?;
    Ok(vec![format!(
        "estimated population {:.1} from {} samples of {} ({} collisions); graph has {} users",
        est.estimate,
        est.r,
        a.sample_size,
        est.collisions,
        graph.user_count()
    )])
}

#[derive(Serialize)]
struct BuildModelsConfig<'a> {
    snapshot: &'a Path,
    users: &'a [UserId],
    seed_user: Option<&'a str>,
    transitive: bool,
    merge_radius_m: f64,
    width: f64,
    height: f64,
}

pub fn build_models(a: BuildModelsArgs) -> Result<Vec<String>> {
    let mut inputs = Inputs::default();
    let graph = load_snapshot(&mut inputs, &a.snapshot)?;
    let users = match (&a.seed_user, &a.users) {
        (Some(seed), _) => select_group(&graph, &UserId::new(seed.as_str()), a.transitive)?,
        (None, Some(list)) => list.iter().map(|u| UserId::new(u.as_str())).collect(),
        (None, None) => return Err(Error::Config("give --seed-user or --users".into())),
    };
    let group = build_group_models(&graph, &users, a.merge_radius, a.width, a.height)?;
    let mut out = OutDir::create(&a.out_dir)?;
    out.write("models.json", &json_line(&group)?)?;
    let config = BuildModelsConfig {
        snapshot: &a.snapshot,
        users: &users,
        seed_user: a.seed_user.as_deref(),
        transitive: a.transitive,
        merge_radius_m: a.merge_radius,
        width: a.width,
        height: a.height,
    };
    out.finish("build-models", &config, None, inputs)?;
    let sizes: Vec<String> = group.models.iter().map(|m| format!("{}:{}", m.user, m.k())).collect();
    Ok(vec![format!(
        "built {} models (user:states {})",
        group.models.len(),
        sizes.join(" ")
    )])
}

#[derive(Serialize)]
struct GenEcho<'a> {
    config_file: &'a ConfigFile,
    #[serde(flatten)]
    resolved: GenConfig<'a>,
}

#[derive(Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum GenConfig<'a> {
    Fmm {
        models: &'a Path,
        width: f64,
        height: f64,
        fmm: FmmConfig,
    },
    Rwp {
        nodes: usize,
        rwp: RwpConfig,
    },
}

pub fn gen(a: GenArgs) -> Result<Vec<String>> {
    let mut inputs = Inputs::default();
    let file = load_config(&mut inputs, a.config.as_ref())?;
    let seed = file.resolve(a.seed, "seed", 0)?;
    let duration = file.resolve(a.duration, "simulation_time", 10_000.0)?;
    let ext = match a.format {
        TraceFormat::Ns2 => "ns2",
        TraceFormat::Csv => "csv",
    };

    let (traces, width, height, config) = match a.model {
        ModelKind::Fmm => {
            let path = a.models.as_ref().ok_or_else(|| Error::Config("--models is required for FMM".into()))?;
            let group: GroupModels = serde_json::from_slice(&inputs.read(path)?)?;
            let width = file.resolve(a.width, "width", group.width)?;
            let height = file.resolve(a.height, "length", group.height)?;
            if width != group.width || height != group.height {
                return Err(Error::Config(format!(
                    "models were built for a {}×{} field, not {width}×{height}",
                    group.width, group.height
                )));
            }
            let min = file.resolve(a.min_speed, "min_speed", 5.0)?;
            let max = file.resolve(a.max_speed, "max_speed", 5.0)?;
            let speed = if a.temporal_speed {
                SpeedPolicy::Temporal {
                    max_gap_s: 86_400.0,
                    min_speed: min,
                    max_speed: max,
                    fallback: (min + max) / 2.0,
                }
            } else if min == max {
                SpeedPolicy::Fixed { speed: max }
            } else {
                return Err(Error::Config(format!(
                    "fixed-speed FMM needs min_speed = max_speed (got {min} and {max}); use --temporal-speed for a range"
                )));
            };
            let fmm = FmmConfig {
                duration,
                speed,
                dwell_s: file.resolve(a.dwell, "dwell", 60.0)?,
                start: if a.weighted_start { StartPolicy::ByOccurrence } else { StartPolicy::Uniform },
            };
            let traces = generate_fmm_traces(&group.models, &fmm, seed)?;
            (traces, width, height, GenConfig::Fmm { models: path, width, height, fmm })
        }
        ModelKind::Rwp => {
            let rwp = RwpConfig {
                width: file.resolve(a.width, "width", 2000.0)?,
                height: file.resolve(a.height, "length", 2000.0)?,
                min_speed: file.resolve(a.min_speed, "min_speed", 0.0)?,
                max_speed: file.resolve(a.max_speed, "max_speed", 5.0)?,
                pause_time: file.resolve(a.pause, "pause_time", 0.0)?,
                duration,
            };
            let nodes = file.resolve(a.nodes, "nodes", 15)?;
            let traces = generate_rwp_traces(&rwp, nodes, seed)?;
            (traces, rwp.width, rwp.height, GenConfig::Rwp { nodes, rwp })
        }
    };

    let name = format!("{}.{ext}", if a.model == ModelKind::Fmm { "fmm" } else { "rwp" });
    let text = export_trace(&traces, width, height, a.format)?;
    let mut out = OutDir::create(&a.out_dir)?;
    out.write(&name, text.as_bytes())?;
    let echo = GenEcho {
        config_file: &file,
        resolved: config,
    };
    out.finish("gen", &echo, Some(seed), inputs)?;
    Ok(vec![format!(
        "wrote {} traces to {}",
        traces.len(),
        out_path(&a.out_dir, &name)
    )])
}

fn out_path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn load_traces(inputs: &mut Inputs, path: &Path, duration: f64) -> Result<Vec<Trace>> {
    let mut traces = parse_trace(&inputs.read_string(path)?)?;
    // A node rests where its last movement command left it.
    traces.iter_mut().for_each(|t| t.hold_until(duration));
    Ok(traces)
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    config_file: &'a ConfigFile,
    traces: Vec<&'a Path>,
    grid: GridDims,
    sim: SimConfig,
}

pub fn simulate(a: SimulateArgs) -> Result<Vec<String>> {
    let mut inputs = Inputs::default();
    let file = load_config(&mut inputs, a.config.as_ref())?;
    let duration = file.resolve(a.duration, "simulation_time", 10_000.0)?;
    let paths: Vec<&Path> = match (&a.traces, &a.compare) {
        (_, Some(pair)) => pair.iter().map(PathBuf::as_path).collect(),
        (Some(t), None) => vec![t.as_path()],
        (None, None) => return Err(Error::Config("give --traces or --compare".into())),
    };
    let sets = paths
        .iter()
        .map(|p| load_traces(&mut inputs, p, duration))
        .collect::<Result<Vec<_>>>()?;
    let grid = file.resolve(a.grid, "grid", GridDims { rows: 10, cols: 10 })?;
    let config = SimConfig {
        duration,
        width: file.resolve(a.width, "width", 2000.0)?,
        height: file.resolve(a.height, "length", 2000.0)?,
        node_count: file.resolve(a.nodes, "nodes", sets[0].len())?,
        radio_range: file.resolve(a.radio_range, "radio_range", 250.0)?,
        tick: file.resolve(a.tick, "tick", 1.0)?,
        grid_rows: grid.rows,
        grid_cols: grid.cols,
        rng_seed: file.resolve(a.seed, "seed", 0)?,
        contention: if a.pairwise { Contention::Pairwise } else { Contention::Components },
    };

    let mut out = OutDir::create(&a.out_dir)?;
    let mut lines = Vec::new();
    if sets.len() == 2 {
        let cmp = compare_models(&sets[0], &sets[1], &config)?;
        write_report(&mut out, "fmm_", &cmp.fmm)?;
        write_report(&mut out, "rwp_", &cmp.rwp)?;
        let mut csv = String::from("row,col,fmm_backoffs,rwp_backoffs,difference\n");
        for r in 0..config.grid_rows {
            for c in 0..config.grid_cols {
                let i = r * config.grid_cols + c;
                let _ = writeln!(
                    csv,
                    "{r},{c},{},{},{}",
                    cmp.fmm.grid.backoffs[i], cmp.rwp.grid.backoffs[i], cmp.cell_difference[i]
                );
            }
        }
        out.write("comparison.csv", csv.as_bytes())?;
        let summary = format!("fmm: {}rwp: {}{}\n", cmp.fmm.summary(), cmp.rwp.summary(), cmp.ratio_line());
        out.write("summary.txt", summary.as_bytes())?;
        lines.push(cmp.ratio_line());
    } else {
        let report = run_simulation(&sets[0], &config)?;
        write_report(&mut out, "", &report)?;
        out.write("summary.txt", report.summary().as_bytes())?;
        lines.push(report.summary().trim_end().to_owned());
    }
    let echo = SimulateConfig {
        config_file: &file,
        traces: paths,
        grid,
        sim: config,
    };
    out.finish("simulate", &echo, Some(config.rng_seed), inputs)?;
    Ok(lines)
}

fn write_report(out: &mut OutDir, prefix: &str, report: &SimReport) -> Result<()> {
    out.write(&format!("{prefix}report.csv"), report.to_csv().as_bytes())?;
    out.write(&format!("{prefix}heatmap.csv"), report.grid.to_csv().as_bytes())
}
