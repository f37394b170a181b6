use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mocorr::analysis::{
    capacity_report, entropy_profile, mean_entropy_vs_window, noise_entropy_sweep,
    pairwise_target_similarity, rotation_sensitivity, NoiseSweepConfig, ProfileMode,
    RotationConfig,
};
use mocorr::inference::calibration::{fit_empirical, CalibrationConfig};
use mocorr::inference::{run_pipeline, Bandwidth, PipelineConfig};
use mocorr::io::{
    format_pdfs, format_trajectory_tagged, model_to_pdfs, pdfs_to_model, read_pdfs,
    read_trajectory, write_columns, write_table, Format, TableMeta,
};
use mocorr::trajectory::{
    distort, gen_circle, gen_null_behavior, gen_polygon_phased, square_vertices, DistortionModel,
    NullBehaviorModel,
};
use mocorr::{BeliefState, Direction, LikelihoodModel, Measure, Point2, Trajectory};

type CliResult<T = ()> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "mocorr",
    version,
    about = "Motion-correlation selection toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv, global = true)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Cw,
    Ccw,
}

impl From<DirArg> for Direction {
    fn from(d: DirArg) -> Self {
        match d {
            DirArg::Cw => Direction::Cw,
            DirArg::Ccw => Direction::Ccw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Circle,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Step,
    Logistic,
    Empirical,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a circle uniformly in angle.
    GenCircle {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
        #[arg(long, value_enum, default_value_t = DirArg::Ccw)]
        direction: DirArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        cx: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        cy: f64,
        #[arg(long, default_value_t = 30.0)]
        rate: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sample a closed polygon at equal arc-length steps.
    GenPolygon {
        /// Vertices as "x,y;x,y;...". Defaults to the unit square.
        #[arg(long, allow_hyphen_values = true)]
        vertices: Option<String>,
        #[arg(long, default_value_t = 120)]
        n: usize,
        /// Starting point as a fraction of the perimeter.
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
        #[arg(long, default_value_t = 30.0)]
        rate: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Synthetic fixation and saccade trace.
    GenNull {
        #[arg(long, default_value_t = 3000)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 30.0)]
        rate: f64,
        #[arg(long, default_value_t = 9.0)]
        fixation_mean: f64,
        #[arg(long, default_value_t = 1.0)]
        saccade_sd: f64,
        #[arg(long, default_value_t = 0.02)]
        jitter_sd: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Apply a linear transform, delay and noise to a trajectory.
    Distort {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Noise SD as a fraction of the path scale.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Row-major 2x2 matrix "a,b,c,d".
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Translation "x,y".
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
        /// Delay in samples.
        #[arg(long, default_value_t = 0)]
        tau: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Fit follow, null and other-target densities from simulated scores.
    FitPdf {
        /// Closed target trajectories; a unit circle of --n samples if none.
        #[arg(long, num_args = 1..)]
        targets: Vec<PathBuf>,
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Fixed kernel bandwidth; Silverman's rule when omitted.
        #[arg(long)]
        bandwidth: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Design-time analyses.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Run the selection pipeline over trajectory files.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        targets: Vec<PathBuf>,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[arg(long, value_enum, default_value_t = ModelArg::Step)]
        model: ModelArg,
        #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 20.0)]
        steepness: f64,
        /// Density file for the empirical model.
        #[arg(long)]
        pdf: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        hop: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Serve live sessions over TCP, or over stdin/stdout with --stdio.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8765")]
        addr: String,
        #[arg(long)]
        stdio: bool,
    },
}

#[derive(Args, Clone)]
struct PathSource {
    /// Closed trajectory file; overrides --shape.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Square)]
    shape: ShapeArg,
    #[arg(long, default_value_t = 120)]
    n: usize,
}

impl PathSource {
    fn load(&self) -> CliResult<Trajectory> {
        Ok(match (&self.input, self.shape) {
            (Some(p), _) => load(p)?,
            (None, ShapeArg::Circle) => {
                gen_circle(1.0, self.n, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0)?
            }
            (None, ShapeArg::Square) => {
                gen_polygon_phased(&square_vertices(1.0), self.n, 0.0, 30.0)?
            }
        })
    }

    fn describe(&self) -> String {
        match (&self.input, self.shape) {
            (Some(p), _) => p.display().to_string(),
            (None, ShapeArg::Circle) => format!("circle-{}", self.n),
            (None, ShapeArg::Square) => format!("square-{}", self.n),
        }
    }
}

#[derive(Subcommand)]
enum Analyze {
    /// Entropy of each window's similarity to every other window.
    EntropyProfile {
        #[command(flatten)]
        source: PathSource,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        /// Threshold similarities at this value instead of the lambda-free mode.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Mean profile entropy for each window size.
    WindowSweep {
        #[command(flatten)]
        source: PathSource,
        #[arg(long, default_value_t = 5)]
        min: usize,
        /// Defaults to the path length.
        #[arg(long)]
        max: Option<usize>,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Similarity of one target's window to every target on a circle.
    Pairwise {
        #[arg(long, default_value_t = 160)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        targets: usize,
        #[arg(long, default_value_t = 15)]
        window: usize,
        #[arg(long, default_value_t = 15)]
        start: usize,
        /// 1-based reference target.
        #[arg(long, default_value_t = 1)]
        reference: usize,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[command(flatten)]
        output: Output,
    },
    /// Score of a noisy circle window against its source as both rotate.
    Rotation {
        #[arg(long, default_value = "rotated_correlation")]
        measure: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Angle step in degrees over [0, 360).
        #[arg(long, default_value_t = 5.0)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// How many phase offsets of one circular target stay confusable.
    Capacity {
        /// Angular speeds in deg/s; one row each.
        #[arg(long, num_args = 1.., default_values_t = vec![180.0])]
        speed: Vec<f64>,
        #[arg(long, default_value_t = 30.0)]
        rate: f64,
        #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[command(flatten)]
        output: Output,
    },
    /// Mean belief entropy as input noise grows.
    NoiseSweep {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        targets: usize,
        #[arg(long, default_value_t = 180.0)]
        speed: f64,
        #[arg(long, default_value_t = 30.0)]
        rate: f64,
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.05)]
        min_noise: f64,
        #[arg(long, default_value_t = 0.75)]
        max_noise: f64,
        #[arg(long, default_value_t = 0.05)]
        noise_step: f64,
        #[arg(long, default_value = "pearson_min_axis")]
        measure: String,
        #[command(flatten)]
        output: Output,
    },
}

fn sink(output: &Output) -> CliResult<Box<dyn Write>> {
    Ok(match &output.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<T: Serialize>(output: &Output, meta: &TableMeta, records: &[T]) -> CliResult {
    let mut w = sink(output)?;
    write_table(&mut w, meta, records, output.format.into())?;
    w.flush()?;
    Ok(())
}

fn load(path: &PathBuf) -> CliResult<Trajectory> {
    read_trajectory(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn parse_reals(text: &str, expected: Option<usize>) -> CliResult<Vec<f64>> {
    let vals = text
        .split([',', ';'])
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("bad number list {text:?}: {e}"))?;
    if let Some(n) = expected {
        if vals.len() != n {
            return Err(format!("expected {n} numbers, got {}", vals.len()).into());
        }
    }
    Ok(vals)
}

fn mode(lambda: Option<f64>) -> ProfileMode {
    lambda.map_or(ProfileMode::LambdaFree, |lambda| ProfileMode::Thresholded {
        lambda,
    })
}

#[derive(Serialize)]
struct SampleRecord {
    t: f64,
    x: f64,
    y: f64,
}

fn emit_trajectory(
    output: &Output,
    traj: &Trajectory,
    command: &str,
    seed: Option<u64>,
) -> CliResult {
    let mut w = sink(output)?;
    match output.format {
        FormatArg::Csv => {
            let tags: Vec<(&str, String)> =
                seed.map(|s| ("seed", s.to_string())).into_iter().collect();
            w.write_all(format_trajectory_tagged(traj, &tags).as_bytes())?;
        }
        FormatArg::Json => {
            let rate = traj.sample_rate_hz();
            let records: Vec<SampleRecord> = traj
                .samples()
                .iter()
                .enumerate()
                .map(|(i, p)| SampleRecord {
                    t: i as f64 / rate,
                    x: p.x,
                    y: p.y,
                })
                .collect();
            let meta = TableMeta::new(command, seed)
                .param("rate", rate)
                .param("closed", u8::from(traj.is_closed()));
            write_table(&mut w, &meta, &records, Format::Json)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ProfileRecord {
    window_start: usize,
    entropy_bits: f64,
}

#[derive(Serialize)]
struct CapacityRecord {
    speed_deg_s: f64,
    n_samples: usize,
    count_above: usize,
    proportion: f64,
    entropy_bits: f64,
    max_targets_bidirectional: usize,
}

#[derive(Serialize)]
struct PairRecord {
    target: usize,
    similarity: f64,
    degenerate: bool,
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::GenCircle {
            radius,
            n,
            phase,
            direction,
            cx,
            cy,
            rate,
            output,
        } => {
            let c = gen_circle(
                radius,
                n,
                phase,
                direction.into(),
                Point2::new(cx, cy),
                rate,
            )?;
            emit_trajectory(&output, &c, "gen-circle", None)
        }
        Command::GenPolygon {
            vertices,
            n,
            phase,
            rate,
            output,
        } => {
            let verts = match vertices {
                Some(text) => {
                    let v = parse_reals(&text, None)?;
                    if v.len() % 2 != 0 {
                        return Err("vertices need an even number of coordinates".into());
                    }
                    v.chunks(2).map(|c| Point2::new(c[0], c[1])).collect()
                }
                None => square_vertices(1.0),
            };
            let p = gen_polygon_phased(&verts, n, phase, rate)?;
            emit_trajectory(&output, &p, "gen-polygon", None)
        }
        Command::GenNull {
            n,
            seed,
            rate,
            fixation_mean,
            saccade_sd,
            jitter_sd,
            output,
        } => {
            let model = NullBehaviorModel {
                fixation_duration_mean: fixation_mean,
                saccade_amplitude_sd: saccade_sd,
                fixation_jitter_sd: jitter_sd,
                seed,
            };
            let t = gen_null_behavior(n, &model, rate)?;
            emit_trajectory(&output, &t, "gen-null", Some(seed))
        }
        Command::Distort {
            input,
            seed,
            noise,
            matrix,
            translate,
            tau,
            output,
        } => {
            let traj = load(&input)?;
            let mut d = DistortionModel::noise(noise, seed);
            d.tau = tau;
            if let Some(m) = matrix {
                let v = parse_reals(&m, Some(4))?;
                d.a = [[v[0], v[1]], [v[2], v[3]]];
            }
            if let Some(t) = translate {
                let v = parse_reals(&t, Some(2))?;
                d.translation = Point2::new(v[0], v[1]);
            }
            let out = distort(&traj, &d)?;
            emit_trajectory(&output, &out, "distort", Some(seed))
        }
        Command::FitPdf {
            targets,
            n,
            measure,
            window,
            samples,
            seed,
            bandwidth,
            output,
        } => {
            let paths = if targets.is_empty() {
                vec![gen_circle(
                    1.0,
                    n,
                    0.0,
                    Direction::Ccw,
                    Point2::ORIGIN,
                    30.0,
                )?]
            } else {
                targets.iter().map(load).collect::<CliResult<Vec<_>>>()?
            };
            let rate = paths[0].sample_rate_hz();
            let m = Measure::parse(&measure, rate)?;
            let mut cfg = CalibrationConfig::new(m, window, seed);
            cfg.samples = samples;
            let bw = bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed);
            let model = fit_empirical(&paths, &cfg, bw)?;
            let meta = TableMeta::new("fit-pdf", Some(seed))
                .param("window", window)
                .param("samples", samples);
            let mut files = model_to_pdfs(m.name(), &model);
            for f in &mut files {
                f.metadata = Some(meta.clone());
            }
            let mut w = sink(&output)?;
            w.write_all(format_pdfs(&files)?.as_bytes())?;
            w.flush()?;
            Ok(())
        }
        Command::Analyze(a) => analyze(a),
        Command::Simulate {
            input,
            targets,
            measure,
            model,
            lambda,
            steepness,
            pdf,
            window,
            hop,
            threshold,
            output,
        } => {
            let u = load(&input)?;
            let ts = targets.iter().map(load).collect::<CliResult<Vec<_>>>()?;
            let m = Measure::parse(&measure, u.sample_rate_hz())?;
            let model = match model {
                ModelArg::Step => LikelihoodModel::Step { lambda },
                ModelArg::Logistic => LikelihoodModel::Logistic { lambda, steepness },
                ModelArg::Empirical => {
                    let path = pdf.ok_or("the empirical model needs --pdf")?;
                    LikelihoodModel::Empirical(pdfs_to_model(
                        &read_pdfs(&path).map_err(|e| format!("{}: {e}", path.display()))?,
                    )?)
                }
            };
            let mut cfg =
                PipelineConfig::new(window, threshold, BeliefState::uniform(ts.len(), true)?);
            cfg.hop = hop;
            let steps = run_pipeline(&u, &ts, &m, &model, &cfg)?;

            let k = ts.len();
            let mut columns = vec!["window_start".to_string()];
            columns.extend((1..=k).map(|i| format!("r_{i}")));
            columns.push("p_null".into());
            columns.extend((1..=k).map(|i| format!("p_{i}")));
            columns.push("entropy_bits".into());
            columns.push("decision".into());
            let rows: Vec<Vec<Option<f64>>> = steps
                .iter()
                .map(|s| {
                    let mut row = vec![Some(s.window_start as f64)];
                    row.extend(s.similarities.iter().map(|r| Some(r.value)));
                    row.extend(s.belief.probs().iter().map(|p| Some(*p)));
                    row.push(Some(s.belief.entropy_bits()));
                    row.push(s.decision.selected().map(|t| t as f64));
                    row
                })
                .collect();
            let meta = TableMeta::new("simulate", None)
                .param("input", input.display())
                .param("measure", m.name())
                .param("window", window)
                .param("hop", hop)
                .param("threshold", threshold);
            let mut w = sink(&output)?;
            write_columns(&mut w, &meta, &columns, &rows, output.format.into())?;
            w.flush()?;
            Ok(())
        }
        Command::Serve { addr, stdio } => {
            if stdio {
                mocorr_server::serve_stdio()?;
            } else {
                let listener = TcpListener::bind(&addr)?;
                eprintln!("listening on {}", listener.local_addr()?);
                mocorr_server::serve_tcp(listener)?;
            }
            Ok(())
        }
    }
}

fn analyze(a: Analyze) -> CliResult {
    match a {
        Analyze::EntropyProfile {
            source,
            window,
            measure,
            lambda,
            output,
        } => {
            let traj = source.load()?;
            let m = Measure::parse(&measure, traj.sample_rate_hz())?;
            let p = entropy_profile(&traj, window, &m, mode(lambda))?;
            let records: Vec<ProfileRecord> = p
                .per_window_entropy
                .iter()
                .enumerate()
                .map(|(s, h)| ProfileRecord {
                    window_start: s,
                    entropy_bits: *h,
                })
                .collect();
            let meta = TableMeta::new("analyze entropy-profile", None)
                .param("path", source.describe())
                .param("window", window)
                .param("measure", m.name())
                .param(
                    "lambda",
                    lambda.map_or("free".to_string(), |l| l.to_string()),
                )
                .param("mean_entropy_bits", p.mean());
            emit(&output, &meta, &records)
        }
        Analyze::WindowSweep {
            source,
            min,
            max,
            measure,
            lambda,
            output,
        } => {
            let traj = source.load()?;
            let m = Measure::parse(&measure, traj.sample_rate_hz())?;
            let max = max.unwrap_or(traj.len());
            let sweep = mean_entropy_vs_window(&traj, &m, min..=max, mode(lambda))?;
            let meta = TableMeta::new("analyze window-sweep", None)
                .param("path", source.describe())
                .param("measure", m.name())
                .param(
                    "lambda",
                    lambda.map_or("free".to_string(), |l| l.to_string()),
                )
                .param("argmin", sweep.argmin);
            emit(&output, &meta, &sweep.points)
        }
        Analyze::Pairwise {
            n,
            targets,
            window,
            start,
            reference,
            measure,
            output,
        } => {
            if reference == 0 || reference > targets {
                return Err(format!("reference must be in [1, {targets}]").into());
            }
            let c = gen_circle(1.0, n, 0.0, Direction::Ccw, Point2::ORIGIN, 30.0)?;
            let m = Measure::parse(&measure, 30.0)?;
            let scores = pairwise_target_similarity(&c, targets, start, window, &m, reference - 1)?;
            let records: Vec<PairRecord> = scores
                .iter()
                .enumerate()
                .map(|(i, s)| PairRecord {
                    target: i + 1,
                    similarity: s.value,
                    degenerate: s.degenerate,
                })
                .collect();
            let meta = TableMeta::new("analyze pairwise", None)
                .param("n", n)
                .param("window", window)
                .param("start", start)
                .param("reference", reference)
                .param("measure", m.name());
            emit(&output, &meta, &records)
        }
        Analyze::Rotation {
            measure,
            radius,
            n,
            window,
            start,
            noise,
            seed,
            reps,
            step,
            output,
        } => {
            if !(step > 0.0) {
                return Err("--step must be > 0".into());
            }
            let m = Measure::parse(&measure, 30.0)?;
            let mut cfg = RotationConfig::new(m, seed);
            cfg.radius = radius;
            cfg.n = n;
            cfg.w = window;
            cfg.window_start = start;
            cfg.noise_sd = noise;
            cfg.reps = reps;
            cfg.theta_grid_deg = (0..)
                .map(|k| k as f64 * step)
                .take_while(|t| *t < 360.0)
                .collect();
            let curve = rotation_sensitivity(&cfg)?;
            let meta = TableMeta::new("analyze rotation", Some(seed))
                .param("measure", m.name())
                .param("noise", noise)
                .param("reps", reps)
                .param("range", curve.range);
            emit(&output, &meta, &curve.points)
        }
        Analyze::Capacity {
            speed,
            rate,
            lambda,
            window,
            measure,
            output,
        } => {
            let m = Measure::parse(&measure, rate)?;
            let rows = speed
                .iter()
                .map(|s| {
                    capacity_report(*s, rate, lambda, window, &m).map(|r| CapacityRecord {
                        speed_deg_s: *s,
                        n_samples: r.n_samples,
                        count_above: r.count_above,
                        proportion: r.proportion,
                        entropy_bits: r.entropy_bits,
                        max_targets_bidirectional: r.max_targets_bidirectional,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let meta = TableMeta::new("analyze capacity", None)
                .param("rate", rate)
                .param("lambda", lambda)
                .param("window", window)
                .param("measure", m.name());
            emit(&output, &meta, &rows)
        }
        Analyze::NoiseSweep {
            seed,
            targets,
            speed,
            rate,
            window,
            reps,
            lambda,
            min_noise,
            max_noise,
            noise_step,
            measure,
            output,
        } => {
            if !(noise_step > 0.0) {
                return Err("--noise-step must be > 0".into());
            }
            let mut cfg = NoiseSweepConfig::new(seed);
            cfg.n_targets = targets;
            cfg.speed_deg_s = speed;
            cfg.sample_rate_hz = rate;
            cfg.window = window;
            cfg.reps = reps;
            cfg.lambda = lambda;
            cfg.measure = Measure::parse(&measure, rate)?;
            let levels = ((max_noise - min_noise) / noise_step + 1e-9).floor() as usize + 1;
            cfg.noise_fractions = (0..levels)
                .map(|k| ((min_noise + k as f64 * noise_step) * 1e9).round() / 1e9)
                .collect();
            let points = noise_entropy_sweep(&cfg)?;
            let meta = TableMeta::new("analyze noise-sweep", Some(seed))
                .param("targets", targets)
                .param("speed", speed)
                .param("window", window)
                .param("lambda", lambda)
                .param("measure", cfg.measure.name());
            emit(&output, &meta, &points)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
