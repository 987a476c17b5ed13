use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use natroute_core::natural_roads::default_split_params;
use natroute_core::network::{load_network, network_stats, validate_noding, Crs, IngestOptions};
use natroute_core::{fixtures, Mode, RoadNetwork, RoadSetKind};

use natroute::bench::{parse_pairs, report_csv, run_parallel, stats_csv};
use natroute::config::Config;
use natroute::engine::{parse_mode, parse_point, Engine, SP_NOTE};
use natroute::geojson::{features_to_geojson, roads_geojson};
use natroute::snapshot::{load_network_file, save_network, BuildParams, EngineSnapshot, SnapshotError};
use natroute::{read_features, InputFormat};

#[derive(Parser)]
#[command(name = "natroute", version, about = "Fewest-turn route planning over natural roads")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrsArg {
    Lonlat,
    Planar,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    Grid,
    Perturbed,
    Radial,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Load GeoJSON or an edge list, check noding, write a network file.
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Coordinate system when the file does not declare one.
        #[arg(long, value_enum)]
        crs: Option<CrsArg>,
        /// Merge endpoints closer than this.
        #[arg(long)]
        snap_tolerance: Option<f64>,
        /// Report junctions closer than this.
        #[arg(long)]
        noding_tolerance: Option<f64>,
    },
    /// Build natural roads, split roads and both graphs into a snapshot.
    Roads {
        /// Network file, or a raw GeoJSON/edge-list input.
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long)]
        split_distance: Option<f64>,
        #[arg(long)]
        split_ratio: Option<f64>,
        #[arg(long, value_enum)]
        crs: Option<CrsArg>,
        /// Also write the unsplit roads as GeoJSON.
        #[arg(long)]
        geojson: Option<PathBuf>,
    },
    /// Compute one route.
    Route {
        snapshot: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value = "ft")]
        mode: String,
        #[arg(long)]
        xml: Option<PathBuf>,
        #[arg(long)]
        geojson: Option<PathBuf>,
        /// Print the full JSON answer instead of the summary line.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        snap_radius: Option<f64>,
        #[arg(long)]
        sequence_cap: Option<usize>,
    },
    /// Benchmark all modes over junction pairs.
    Bench {
        snapshot: PathBuf,
        /// `all` or `random:N`.
        #[arg(long, default_value = "all")]
        pairs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        sequence_cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Segment and road counts as CSV.
    Stats {
        snapshot: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        snapshot: PathBuf,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        snap_radius: Option<f64>,
        #[arg(long)]
        sequence_cap: Option<usize>,
    },
    /// Write a synthetic test network as planar GeoJSON.
    Fixture {
        #[arg(value_enum)]
        kind: FixtureKind,
        #[arg(long, default_value_t = 4)]
        rows: usize,
        #[arg(long, default_value_t = 4)]
        cols: usize,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Segment bound for `random`.
        #[arg(long, default_value_t = 30)]
        segments: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn crs_of(flag: Option<CrsArg>, config: &Config) -> Result<Option<Crs>> {
    Ok(match flag {
        Some(CrsArg::Lonlat) => Some(Crs::LonLat),
        Some(CrsArg::Planar) => Some(Crs::Planar),
        None => match config.crs.as_deref() {
            None => None,
            Some("lonlat") => Some(Crs::LonLat),
            Some("planar") => Some(Crs::Planar),
            Some(other) => bail!("config crs must be lonlat or planar, got {other:?}"),
        },
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads a raw input file into a network. Returns the number of unnoded
/// crossings alongside.
fn ingest(path: &Path, crs: Option<Crs>, snap_tolerance: f64, noding_tolerance: f64) -> Result<(RoadNetwork, usize)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let input = read_features(&text, InputFormat::from_path(path)).with_context(|| format!("parsing {}", path.display()))?;
    if input.skipped > 0 {
        eprintln!("warning: skipped {} non-line features", input.skipped);
    }
    let crs = crs.or(input.declared_crs).unwrap_or(Crs::LonLat);
    let loaded = load_network(&input.features, &IngestOptions { crs, snap_tolerance })?;
    for d in &loaded.rejected {
        eprintln!("warning: {d}");
    }
    let net = loaded.network;
    let report = validate_noding(&net, noding_tolerance);
    for c in &report.crossings {
        eprintln!("crossing without junction: segments {} and {} near ({}, {})", c.a, c.b, c.at.x, c.at.y);
    }
    for (a, b, d) in &report.close_junctions {
        eprintln!("warning: junctions {a} and {b} are {d} apart");
    }
    eprintln!(
        "{} segments, {} junctions, {} components; {}",
        net.segments().len(),
        net.junctions().len(),
        net.component_count(),
        net.crs_note()
    );
    Ok((net, report.crossings.len()))
}

fn load_snapshot(path: &Path) -> Result<EngineSnapshot> {
    EngineSnapshot::load(path).with_context(|| format!("loading snapshot {}", path.display()))
}

fn engine(path: &Path, snap_radius: Option<f64>, cap: Option<usize>, config: &Config) -> Result<Engine> {
    let mut engine = Engine::new(load_snapshot(path)?);
    if let Some(r) = snap_radius.or(config.snap_radius) {
        engine = engine.with_snap_radius(r);
    }
    if let Some(c) = cap.or(config.sequence_cap) {
        engine = engine.with_sequence_cap(c);
    }
    Ok(engine)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest { input, output, crs, snap_tolerance, noding_tolerance } => {
            let (net, crossings) = ingest(
                &input,
                crs_of(crs, &config)?,
                snap_tolerance.or(config.snap_tolerance).unwrap_or(0.0),
                noding_tolerance.or(config.noding_tolerance).unwrap_or(0.0),
            )?;
            save_network(&net, &output)?;
            if crossings > 0 {
                eprintln!("error: {crossings} crossings without a junction; the network is not routable as is");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Roads { input, output, angle, split_distance, split_ratio, crs, geojson } => {
            let net = match load_network_file(&input) {
                Ok(net) => net,
                Err(SnapshotError::BadMagic) => {
                    let tol = config.snap_tolerance.unwrap_or(0.0);
                    let (net, crossings) = ingest(&input, crs_of(crs, &config)?, tol, 0.0)?;
                    if crossings > 0 {
                        eprintln!("warning: {crossings} crossings without a junction");
                    }
                    net
                }
                Err(e) => return Err(e).with_context(|| format!("loading {}", input.display())),
            };
            let defaults = default_split_params(&net);
            let params = BuildParams {
                angle_deg: angle.or(config.angle).unwrap_or(natroute_core::DEFAULT_JOIN_ANGLE_DEG),
                split_distance: split_distance.or(config.split_distance).unwrap_or(defaults.distance),
                split_ratio: split_ratio.or(config.split_ratio).unwrap_or(defaults.ratio),
            };
            let snap = EngineSnapshot::build(net, params)?;
            snap.save(&output)?;
            if let Some(p) = geojson {
                let text = roads_geojson(snap.network(), snap.roads(RoadSetKind::Unsplit)).to_string();
                write_out(Some(&p), &text)?;
            }
            eprintln!(
                "{} roads, {} split roads; angle {} split distance {} ratio {}; hash {}",
                snap.roads(RoadSetKind::Unsplit).roads().len(),
                snap.roads(RoadSetKind::Split).roads().len(),
                params.angle_deg,
                params.split_distance,
                params.split_ratio,
                snap.hash_hex()
            );
        }
        Command::Route { snapshot, from, to, mode, xml, geojson, json, snap_radius, sequence_cap } => {
            let engine = engine(&snapshot, snap_radius, sequence_cap, &config)?;
            let mode = parse_mode(&mode)?;
            let answer = engine.route_points(mode, parse_point(&from)?, parse_point(&to)?)?;
            if let Some(p) = xml {
                write_out(Some(&p), &answer.instructions_xml)?;
            }
            if let Some(p) = geojson {
                write_out(Some(&p), &answer.geojson.to_string())?;
            }
            if json {
                println!("{}", answer.to_json());
            } else {
                println!("{}", answer.summary());
            }
            if mode == Mode::Simplest {
                eprintln!("note: {SP_NOTE}");
            }
            if answer.route.truncated {
                eprintln!("warning: sequence enumeration hit the cap; the route may not be the shortest fewest-turn one");
            }
        }
        Command::Bench { snapshot, pairs, seed, threads, sequence_cap, output } => {
            let engine = engine(&snapshot, None, sequence_cap, &config)?;
            let sampling = parse_pairs(&pairs, seed).map_err(anyhow::Error::msg)?;
            let report = run_parallel(engine.router(), sampling, &Mode::ALL, threads.or(config.threads))?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("{} pairs sampled, {} excluded", report.sampled, report.excluded);
            write_out(output.as_deref(), &report_csv(&report))?;
        }
        Command::Stats { snapshot, output } => {
            let snap = load_snapshot(&snapshot)?;
            let stats =
                network_stats(snap.network(), snap.roads(RoadSetKind::Unsplit), snap.roads(RoadSetKind::Split))?;
            let name = snapshot.file_stem().and_then(|s| s.to_str()).unwrap_or("network");
            eprintln!(
                "arcs={} arcs_x={} roads_i={} roads_i_x={} roads_ii={} roads_ii_x={} roads_i/arcs={:.3}",
                stats.arcs,
                stats.arcs_x,
                stats.roads_i,
                stats.roads_i_x,
                stats.roads_ii,
                stats.roads_ii_x,
                stats.size_ratio()
            );
            write_out(output.as_deref(), &stats_csv(name, &stats))?;
        }
        Command::Serve { snapshot, port, host, snap_radius, sequence_cap } => {
            let engine = engine(&snapshot, snap_radius, sequence_cap, &config)?;
            let host = host.or(config.host.clone()).unwrap_or_else(|| "127.0.0.1".into());
            let port = port.or(config.port).unwrap_or(8080);
            let addr: SocketAddr = format!("{host}:{port}").parse().with_context(|| format!("bad address {host}:{port}"))?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(natroute::server::serve(engine, addr))?;
        }
        Command::Fixture { kind, rows, cols, spacing, seed, segments, output } => {
            let features = match kind {
                FixtureKind::Grid => fixtures::grid_features(rows, cols, spacing),
                FixtureKind::Perturbed => fixtures::perturbed_grid_features(rows, cols, spacing, seed),
                FixtureKind::Radial => fixtures::radial_features(rows, cols, spacing),
                FixtureKind::Random => fixtures::random_network_features(seed, segments),
            };
            write_out(Some(&output), &features_to_geojson(&features).to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
