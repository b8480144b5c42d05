use std::fs;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ramsey_core::counting::{
    bundled_k17_witness, count_colorings, estimate_l1, estimate_l2, extend_by_duplicate, parse_witness,
    total_legal_positions, verify_witness, write_witness, Schedule,
};
use ramsey_core::exec::Execution;
use ramsey_core::game::{apply_move, GameSpec, GameState, Move, Status, Variant};
use ramsey_core::graph::{Cell, Color, Graph, TargetGraph};
use ramsey_core::player::{
    choose_move, read_learning, shake, update_after_game, write_learning, GameRecord, LearningTable,
    SalienceWeights, ScoreWeights, DEFAULT_LEARNING_FACTOR,
};
use ramsey_core::reductions::{check_reduction, PositiveFormula, Transducer};
use ramsey_core::solver::{read_table, solve, solve_with, write_table, SolveOptions};

use crate::service::{router, Service};
use crate::store::{write_atomic, DataDir};

#[derive(Debug, Parser)]
#[command(name = "ramsey", version, about = "Graph Ramsey games: solve, play, reduce and count")]
pub struct Cli {
    /// Report errors as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a game and write its strategy table.
    Solve(SolveArgs),
    /// Print position counts and the earliest forced win.
    Stats(StatsArgs),
    /// Play against the engine on stdin/stdout.
    Play(PlayArgs),
    /// Turn a positive formula into a graph game.
    Reduce(ReduceArgs),
    /// Exact number of non-isomorphic colorings of K_n.
    Count(CountArgs),
    /// Monte-Carlo estimate of mono-free position classes.
    Estimate(EstimateArgs),
    /// Check a Ramsey coloring, optionally after duplicating a vertex.
    VerifyWitness(WitnessArgs),
    /// Run the HTTP game service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Game spec JSON, as written by `reduce`. Overrides the other spec flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value = "avoid")]
    pub variant: String,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Target clique, `k3` or `3`.
    #[arg(long, default_value = "k3")]
    pub target: String,
    /// Green's target clique in asymmetric games.
    #[arg(long)]
    pub green_target: Option<String>,
}

fn clique_size(s: &str) -> anyhow::Result<usize> {
    let t = s.trim().trim_start_matches(['k', 'K']);
    t.parse().with_context(|| format!("bad target `{s}`; expected k<size>"))
}

impl SpecArgs {
    pub fn spec(&self) -> anyhow::Result<GameSpec> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(GameSpec::from_json(&text)?);
        }
        let variant = Variant::parse(&self.variant)?;
        let red = TargetGraph::clique(clique_size(&self.target)?)?;
        let green = match &self.green_target {
            Some(g) => TargetGraph::clique(clique_size(g)?)?,
            None => red.clone(),
        };
        Ok(GameSpec::new(variant, Arc::new(Graph::complete(self.n)), red, green, vec![], vec![])?)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Strategy table output; defaults to `<variant>-n<n>.grst`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Only compute the root value, stopping at the first winning move.
    #[arg(long)]
    pub root_only: bool,
    /// Maximum number of stored positions.
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Read this strategy table instead of solving.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Side {
    Red,
    Green,
}

impl From<Side> for Color {
    fn from(s: Side) -> Color {
        match s {
            Side::Red => Color::Red,
            Side::Green => Color::Green,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// The engine's color.
    #[arg(long, value_enum, default_value = "green")]
    pub engine: Side,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Learning table to use and update (created if missing).
    #[arg(long)]
    pub learning: Option<PathBuf>,
    /// Relabel the vertices at random after every engine move.
    #[arg(long)]
    pub shake: bool,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Formula file in the `POSCNF v1` / `POSDNF v1` format.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// avoid, achieve-weak or achieve.
    #[arg(long)]
    pub kind: String,
    /// Spec JSON output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also solve both games and compare winners.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: usize,
    /// With `--g`, count only colorings with this many red edges.
    #[arg(long, requires = "g")]
    pub r: Option<usize>,
    #[arg(long, requires = "r")]
    pub g: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    L1,
    L2,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Samples per stratum. L2 defaults to its rising schedule.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the strata one after another.
    #[arg(long)]
    pub sequential: bool,
    /// Include the per-stratum breakdown.
    #[arg(long)]
    pub strata: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Witness file; the bundled K17 coloring when absent.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Duplicate this vertex and report on the result.
    #[arg(long)]
    pub duplicate: Option<usize>,
    /// Write the checked (or duplicated) coloring here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Data directory; defaults to $RAMSEY_DATA_DIR, then ./ramsey-data.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve(a) => solve_cmd(a),
        Command::Stats(a) => stats_cmd(a),
        Command::Play(a) => {
            let stdin = std::io::stdin();
            play_cmd(a, &mut stdin.lock(), &mut std::io::stdout())
        }
        Command::Reduce(a) => reduce_cmd(a),
        Command::Count(a) => count_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::VerifyWitness(a) => witness_cmd(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn solve_cmd(a: SolveArgs) -> anyhow::Result<()> {
    let spec = a.spec.spec()?;
    if a.root_only {
        let table = solve_with(&spec, SolveOptions { exhaustive: false, budget: a.budget })?;
        print_json(&json!({
            "fingerprint": spec.fingerprint(),
            "root_value": table.root_value().to_string(),
            "game_value": table.root_value().game_value(),
            "winner": table.root_value().winner(),
            "positions_searched": table.len(),
        }));
        return Ok(());
    }
    let table = solve_with(&spec, SolveOptions { exhaustive: true, budget: a.budget })?;
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{}-n{}.grst", spec.variant(), spec.board().vertex_count())));
    let mut bytes = Vec::new();
    write_table(&table, &mut bytes)?;
    write_atomic(&out, &bytes)?;
    print_json(&json!({
        "fingerprint": spec.fingerprint(),
        "table": out,
        "entries": table.len(),
        "root_value": table.root_value().to_string(),
        "game_value": table.root_value().game_value(),
        "winner": table.root_value().winner(),
        "stats": table.stats(),
    }));
    Ok(())
}

fn stats_cmd(a: StatsArgs) -> anyhow::Result<()> {
    let spec = a.spec.spec()?;
    let table = match &a.table {
        Some(path) => read_table(&spec, std::io::BufReader::new(fs::File::open(path)?))?,
        None => solve(&spec)?,
    };
    print_json(&serde_json::to_value(table.stats())?);
    Ok(())
}

fn board_lines(state: &GameState) -> String {
    let board = state.position.board();
    let mut s = String::new();
    for e in 0..board.edge_count() {
        let (a, b) = board.edge(e);
        let c = match state.position.cell(e) {
            Cell::Uncolored => '.',
            Cell::Red => 'R',
            Cell::Green => 'G',
        };
        s.push_str(&format!("{e:>3}: {a}-{b} {c}\n"));
    }
    s
}

/// Parses edges given as indices or `a-b` pairs, separated by spaces or commas.
fn parse_edges(line: &str, board: &Graph) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in line.split([' ', ',']).filter(|t| !t.is_empty()) {
        let e = match tok.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.parse()?, b.parse()?);
                board.edge_index(a, b).with_context(|| format!("no edge {a}-{b}"))?
            }
            None => tok.parse()?,
        };
        out.push(e);
    }
    if out.is_empty() {
        bail!("no edges given");
    }
    Ok(out)
}

/// The interactive game. Reads moves from `input`, writes the board and the
/// engine's replies to `out`.
pub fn play_cmd(a: PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<()> {
    let spec = a.spec.spec()?;
    let table = solve(&spec)?;
    let engine: Color = a.engine.into();
    let mut learn = match &a.learning {
        Some(p) if p.exists() => read_learning(std::io::BufReader::new(fs::File::open(p)?))?,
        _ => LearningTable::new(&spec)?,
    };
    let salience = SalienceWeights::for_board(spec.board());
    let weights = ScoreWeights::default();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut state = spec.initial_state()?;
    let mut record = GameRecord::new(engine);
    // Original vertex v is shown as frame[v].
    let board = spec.board().clone();
    let mut frame: Vec<usize> = (0..board.vertex_count()).collect();
    let shown = |state: &GameState, frame: &[usize]| -> anyhow::Result<GameState> {
        Ok(ramsey_core::player::permute_state(state, frame)?)
    };
    writeln!(out, "{} on {} vertices; you are {}", spec.variant(), board.vertex_count(), engine.other())?;
    while !state.is_over() {
        if state.to_move == engine {
            let mv = choose_move(&table, &state, &learn, &salience, &weights, &mut rng)?;
            let pairs: Vec<String> = mv
                .edges()
                .iter()
                .map(|&e| {
                    let (x, y) = board.edge(e);
                    format!("{}-{}", frame[x].min(frame[y]), frame[x].max(frame[y]))
                })
                .collect();
            writeln!(out, "engine colors {}", pairs.join(" "))?;
            record.push(&table, &state, &mv)?;
            state = apply_move(&spec, &state, &mv)?;
            if a.shake && !state.is_over() {
                let (p, _) = shake(&shown(&state, &frame)?, &mut rng)?;
                frame = frame.iter().map(|&v| p[v]).collect();
                writeln!(out, "board shaken")?;
            }
            continue;
        }
        write!(out, "{}your move> ", board_lines(&shown(&state, &frame)?))?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 || line.trim() == "quit" {
            writeln!(out, "\ngame abandoned")?;
            return Ok(());
        }
        let mut inverse = vec![0; frame.len()];
        for (v, &s) in frame.iter().enumerate() {
            inverse[s] = v;
        }
        let attempt = parse_edges(line.trim(), &board).and_then(|edges| {
            let original = edges
                .iter()
                .map(|&e| {
                    anyhow::ensure!(e < board.edge_count(), "edge {e} out of range");
                    let (x, y) = board.edge(e);
                    Ok(board.edge_index(inverse[x], inverse[y]).expect("complete board"))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mv = Move::new(original)?;
            let next = apply_move(&spec, &state, &mv)?;
            Ok((mv, next))
        });
        match attempt {
            Ok((mv, next)) => {
                record.push(&table, &state, &mv)?;
                state = next;
            }
            Err(e) => writeln!(out, "rejected: {e}")?,
        }
    }
    record.finish(&spec, &state);
    let verdict = match state.status {
        Status::Win(c) if c == engine => "engine wins",
        Status::Win(_) => "you win",
        _ => "tie",
    };
    writeln!(out, "{}{verdict}", board_lines(&shown(&state, &frame)?))?;
    if let Some(path) = &a.learning {
        learn = update_after_game(&learn, &table, &record, DEFAULT_LEARNING_FACTOR)?;
        let mut bytes = Vec::new();
        write_learning(&learn, &mut bytes)?;
        write_atomic(path, &bytes)?;
    }
    Ok(())
}

fn reduce_cmd(a: ReduceArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let f = PositiveFormula::parse(&text)?;
    let t = Transducer::parse(&a.kind)?;
    let reduced = t.apply(&f)?;
    let spec_json = reduced.to_json();
    match &a.out {
        Some(p) => write_atomic(p, spec_json.as_bytes())?,
        None => println!("{spec_json}"),
    }
    let mut summary = json!({
        "kind": t.to_string(),
        "vertices": reduced.spec().board().vertex_count(),
        "edges": reduced.spec().board().edge_count(),
        "uncolored_edges": reduced.uncolored_edge_count(),
        "fingerprint": reduced.spec().fingerprint(),
    });
    if a.verify {
        let check = check_reduction(&f, t, a.budget)?;
        summary["formula_winner"] = json!(format!("{:?}", check.formula_winner));
        summary["graph_value"] = json!(check.graph_value.to_string());
        summary["preserved"] = json!(check.holds());
    }
    if a.out.is_some() {
        print_json(&summary);
    } else {
        eprintln!("{}", serde_json::to_string(&summary)?);
    }
    Ok(())
}

fn count_cmd(a: CountArgs) -> anyhow::Result<()> {
    match (a.r, a.g) {
        (Some(r), Some(g)) => print_json(&json!({ "n": a.n, "r": r, "g": g, "count": count_colorings(a.n, r, g)?.to_string() })),
        _ => print_json(&json!({ "n": a.n, "total_legal_positions": total_legal_positions(a.n)?.to_string() })),
    }
    Ok(())
}

fn estimate_cmd(a: EstimateArgs) -> anyhow::Result<()> {
    let exec = if a.sequential { Execution::Sequential } else { Execution::default() };
    let mut report = match a.method {
        MethodArg::L1 => estimate_l1(a.n, a.k, a.samples.unwrap_or(1000), a.seed, exec)?,
        MethodArg::L2 => {
            let schedule = a.samples.map_or(Schedule::Default, Schedule::Constant);
            estimate_l2(a.n, a.k, schedule, a.seed, exec)?
        }
    };
    if !a.strata {
        report.strata.clear();
    }
    print_json(&serde_json::to_value(&report)?);
    Ok(())
}

fn witness_cmd(a: WitnessArgs) -> anyhow::Result<()> {
    let mut p = match &a.file {
        Some(path) => parse_witness(&fs::read_to_string(path)?)?,
        None => bundled_k17_witness(),
    };
    let mut v = json!({});
    if let Some(d) = a.duplicate {
        let before = verify_witness(&p, a.k)?;
        v["source"] = serde_json::to_value(&before)?;
        p = extend_by_duplicate(&p, d)?;
        let board = p.board();
        let free = p.uncolored_edges();
        v["duplicate"] = json!({
            "n": board.vertex_count(),
            "red_edges": p.red_count(),
            "green_edges": p.green_count(),
            "uncolored_edges": free.iter().map(|&e| board.edge(e)).collect::<Vec<_>>(),
            "mono_free": ramsey_core::counting::mono_free(&p, a.k) == 1,
        });
    } else {
        v = serde_json::to_value(verify_witness(&p, a.k)?)?;
    }
    if let Some(out) = &a.out {
        write_atomic(out, write_witness(&p).as_bytes())?;
    }
    print_json(&v);
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> anyhow::Result<()> {
    let data = match a.data_dir {
        Some(d) => DataDir::open(d)?,
        None => DataDir::from_env()?,
    };
    let service = Arc::new(Service::open(data).map_err(|e| anyhow::anyhow!("{}: {}", e.code, e.message))?);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(a.addr).await?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, router(service)).await?;
        Ok(())
    })
}

/// Machine-readable form of an error for `--json`.
pub fn error_json(e: &anyhow::Error) -> serde_json::Value {
    let kind = match e.downcast_ref::<ramsey_core::Error>() {
        Some(core) => format!("{core:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string(),
        None => "Error".to_string(),
    };
    json!({ "error": kind, "message": format!("{e:#}") })
}
