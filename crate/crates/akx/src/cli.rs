//! The `akx` command-line surface.
//!
//! Exit codes: 0 success/agreement, 1 negative result (nontrivial word,
//! key mismatch, attack found nothing), 2 usage or format error, 3 internal
//! guard tripped.

use std::fs;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{self, PlatformParams};
use crate::attack;
use crate::braid::{self, BraidContext, BraidError};
use crate::protocol::{self, MsgType, Role, Session};
use crate::thompson::{self, ThompsonContext};
use crate::words::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser)]
#[command(name = "akx", version, about = "Key agreement over a braid/Thompson amalgam")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parameter-set utilities
    Params {
        #[command(subcommand)]
        command: ParamsCommand,
    },
    /// Word-problem oracles for the factor groups
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// In-process handshake between both roles
    Demo(DemoArgs),
    /// Accept one handshake over TCP (receiver role)
    Serve(ServeArgs),
    /// Run a handshake against a server (sender role)
    Connect(ConnectArgs),
    /// Run an attack against a recorded transcript
    Attack(AttackArgs),
    /// Micro-benchmarks over a parameter grid
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum ParamsCommand {
    /// Generate a validated random parameter set
    Gen(ParamsGenArgs),
}

#[derive(Args)]
struct ParamsGenArgs {
    /// Number of amalgamated generator pairs
    #[arg(long)]
    n: u32,
    /// Braid strands
    #[arg(long)]
    m: u32,
    /// Thompson index cap
    #[arg(long)]
    p: u32,
    /// Length of each defining word
    #[arg(long)]
    wlen: usize,
    /// Private token-word length L
    #[arg(long, default_value_t = 16)]
    secret_len: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Word problem in the braid group B_m
    Braid {
        #[arg(long)]
        strands: u32,
        #[arg(long)]
        word: String,
    },
    /// Word problem in Thompson's group F
    Thompson {
        #[arg(long)]
        word: String,
        /// Input index cap
        #[arg(long, default_value_t = 16)]
        cap: u32,
    },
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Record the exchange (with letter-layer expansions) to a file
    #[arg(long)]
    transcript_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    port: u16,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep accepting connections instead of exiting after one
    #[arg(long)]
    keep_alive: bool,
}

#[derive(Args)]
struct ConnectArgs {
    /// HOST:PORT
    addr: String,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    transcript: PathBuf,
    #[arg(long, value_parser = ["brute", "length"])]
    method: String,
    /// Which message to attack
    #[arg(long, value_parser = ["m1", "m2"], default_value = "m1")]
    target: String,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Dispatch and map every outcome to an exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders help/version on stdout with code 0
            let code = if err.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("akx: {err}");
            classify_error(&err)
        }
    }
}

fn classify_error(err: &anyhow_like::Error) -> i32 {
    if err.guard {
        EXIT_GUARD
    } else {
        EXIT_USAGE
    }
}

/// Minimal error carrier: message plus whether an internal guard tripped.
mod anyhow_like {
    #[derive(Debug)]
    pub struct Error {
        pub message: String,
        pub guard: bool,
    }

    impl std::fmt::Display for Error {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            f.write_str(&self.message)
        }
    }

    impl Error {
        pub fn usage(message: impl Into<String>) -> Error {
            Error { message: message.into(), guard: false }
        }

        pub fn guard(message: impl Into<String>) -> Error {
            Error { message: message.into(), guard: true }
        }
    }
}

use anyhow_like::Error;

type CliResult = Result<i32, Error>;

fn usage<E: std::fmt::Display>(err: E) -> Error {
    Error::usage(err.to_string())
}

fn braid_error(err: BraidError) -> Error {
    match err {
        BraidError::StepGuard(_) => Error::guard(err.to_string()),
        _ => usage(err),
    }
}

fn load_params(path: &PathBuf) -> Result<PlatformParams, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let params: PlatformParams = serde_json::from_str(&text)
        .map_err(|e| usage(format!("bad parameter file {}: {e}", path.display())))?;
    params.validate().map_err(usage)?;
    Ok(params)
}

fn seeded_rng(seed: Option<u64>) -> ChaCha8Rng {
    match seed {
        Some(s) => ChaCha8Rng::seed_from_u64(s),
        None => ChaCha8Rng::from_entropy(),
    }
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Params { command: ParamsCommand::Gen(args) } => params_gen(args),
        Command::Oracle { command } => oracle(command),
        Command::Demo(args) => demo(args),
        Command::Serve(args) => serve(args),
        Command::Connect(args) => connect(args),
        Command::Attack(args) => run_attack(args),
        Command::Bench(args) => bench(args),
    }
}

fn params_gen(args: ParamsGenArgs) -> CliResult {
    let mut rng = seeded_rng(args.seed);
    let params = amalgam::generate_params(
        args.n,
        args.m,
        args.p,
        args.wlen,
        args.secret_len,
        &mut rng,
    )
    .map_err(usage)?;
    let json = serde_json::to_string_pretty(&params).map_err(usage)?;
    match &args.output {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(EXIT_OK)
}

fn oracle(command: OracleCommand) -> CliResult {
    match command {
        OracleCommand::Braid { strands, word } => {
            let word: Word = word.parse().map_err(usage)?;
            let ctx = BraidContext::new(strands);
            let reduced = braid::handle_reduce(&ctx, &word).map_err(braid_error)?;
            let trivial = reduced.is_empty();
            println!("{}", if trivial { "trivial" } else { "nontrivial" });
            println!("{reduced}");
            Ok(if trivial { EXIT_OK } else { EXIT_NEGATIVE })
        }
        OracleCommand::Thompson { word, cap } => {
            let word: Word = word.parse().map_err(usage)?;
            let ctx = ThompsonContext::new(cap);
            let nf = thompson::normal_form(&ctx, &word).map_err(usage)?;
            let trivial = nf.is_empty();
            println!("{}", if trivial { "trivial" } else { "nontrivial" });
            println!("{}", nf.to_word());
            Ok(if trivial { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn demo(args: DemoArgs) -> CliResult {
    let params = load_params(&args.params)?;
    let mut rng = seeded_rng(args.seed);
    let mut rng_sender = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut rng_receiver = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut sender = Session::new(params.clone(), Role::Sender, &mut rng_sender).map_err(usage)?;
    let mut receiver =
        Session::new(params.clone(), Role::Receiver, &mut rng_receiver).map_err(usage)?;
    let m1 = sender.outgoing().map_err(usage)?;
    let m2 = receiver.outgoing().map_err(usage)?;
    if let Some(path) = &args.transcript_out {
        let transcript = protocol::Transcript::new(&params, &m1, &m2, true).map_err(usage)?;
        let json = serde_json::to_string_pretty(&transcript).map_err(usage)?;
        fs::write(path, json).map_err(|e| usage(format!("cannot write transcript: {e}")))?;
    }
    receiver.absorb(m1).map_err(usage)?;
    sender.absorb(m2).map_err(usage)?;
    let key_sender = sender.key().map_err(usage)?;
    let key_receiver = receiver.key().map_err(usage)?;
    let agreement = key_sender == key_receiver;
    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "key_sender": key_sender.to_hex(),
                "key_receiver": key_receiver.to_hex(),
                "agreement": agreement,
            })
        );
    } else {
        println!("{}", key_sender.to_hex());
        println!("{}", key_receiver.to_hex());
    }
    Ok(if agreement { EXIT_OK } else { EXIT_NEGATIVE })
}

fn read_frame(stream: &mut TcpStream) -> Result<Vec<u8>, Error> {
    let mut len_bytes = [0u8; 4];
    stream
        .read_exact(&mut len_bytes)
        .map_err(|e| usage(format!("read failed: {e}")))?;
    let len = u32::from_be_bytes(len_bytes) as usize;
    let mut frame = vec![0u8; 4 + len];
    frame[..4].copy_from_slice(&len_bytes);
    stream
        .read_exact(&mut frame[4..])
        .map_err(|e| usage(format!("read failed: {e}")))?;
    Ok(frame)
}

fn handle_connection(
    stream: &mut TcpStream,
    params: &PlatformParams,
    rng: &mut ChaCha8Rng,
) -> CliResult {
    let mut session =
        Session::new(params.clone(), Role::Receiver, rng).map_err(usage)?;
    let incoming = protocol::decode_message(&read_frame(stream)?).map_err(usage)?;
    let m2 = session.outgoing().map_err(usage)?;
    stream
        .write_all(&protocol::encode_message(&m2).map_err(usage)?)
        .map_err(|e| usage(format!("write failed: {e}")))?;
    session.absorb(incoming).map_err(usage)?;
    let key = session.key().map_err(usage)?;
    println!("{}", key.to_hex());
    Ok(EXIT_OK)
}

fn serve(args: ServeArgs) -> CliResult {
    let params = load_params(&args.params)?;
    let mut rng = seeded_rng(args.seed);
    let listener = TcpListener::bind(("127.0.0.1", args.port))
        .map_err(|e| usage(format!("cannot bind port {}: {e}", args.port)))?;
    loop {
        let (mut stream, _) = listener
            .accept()
            .map_err(|e| usage(format!("accept failed: {e}")))?;
        let code = handle_connection(&mut stream, &params, &mut rng)?;
        if !args.keep_alive {
            return Ok(code);
        }
    }
}

fn connect(args: ConnectArgs) -> CliResult {
    let params = load_params(&args.params)?;
    let mut rng = seeded_rng(args.seed);
    let mut stream = TcpStream::connect(&args.addr)
        .map_err(|e| usage(format!("cannot connect to {}: {e}", args.addr)))?;
    let mut session = Session::new(params, Role::Sender, &mut rng).map_err(usage)?;
    let m1 = session.outgoing().map_err(usage)?;
    stream
        .write_all(&protocol::encode_message(&m1).map_err(usage)?)
        .map_err(|e| usage(format!("write failed: {e}")))?;
    let m2 = protocol::decode_message(&read_frame(&mut stream)?).map_err(usage)?;
    session.absorb(m2).map_err(usage)?;
    let key = session.key().map_err(usage)?;
    println!("{}", key.to_hex());
    Ok(EXIT_OK)
}

fn run_attack(args: AttackArgs) -> CliResult {
    let text = fs::read_to_string(&args.transcript)
        .map_err(|e| usage(format!("cannot read transcript: {e}")))?;
    let transcript: protocol::Transcript = serde_json::from_str(&text)
        .map_err(|e| usage(format!("bad transcript: {e}")))?;
    let params = match &args.params {
        Some(path) => load_params(path)?,
        None => {
            transcript.params.validate().map_err(usage)?;
            transcript.params.clone()
        }
    };
    let which = if args.target == "m1" { MsgType::M1 } else { MsgType::M2 };
    let msg = transcript.message(which).map_err(usage)?;
    let report = match args.method.as_str() {
        "brute" => attack::brute_force_csp(&params, &msg, args.max_len).map_err(usage)?,
        _ => attack::length_based_attack(&params, &msg, args.budget).map_err(usage)?,
    };
    if args.json {
        println!("{}", serde_json::to_string(&report).map_err(usage)?);
    } else {
        match &report.found {
            Some(found) => println!("found {found}"),
            None => println!("not found"),
        }
        println!(
            "nodes {} time {:.1} ms",
            report.nodes_explored,
            report.wall_time.as_secs_f64() * 1000.0
        );
    }
    Ok(if report.found.is_some() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn bench(args: BenchArgs) -> CliResult {
    use crate::words::{random_word, Alphabet};
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("{:<32} {:>10} {:>14}", "benchmark", "iters", "avg (us)");

    for (strands, len) in [(4u32, 32usize), (8, 64), (8, 128)] {
        let ctx = BraidContext::new(strands);
        let words: Vec<Word> = (0..50)
            .map(|_| random_word(Alphabet::braid(strands), len, &mut rng).unwrap())
            .collect();
        let start = Instant::now();
        for word in &words {
            braid::handle_reduce(&ctx, word).map_err(braid_error)?;
        }
        let avg = start.elapsed().as_micros() as f64 / words.len() as f64;
        println!("{:<32} {:>10} {:>14.1}", format!("handle_reduce m={strands} len={len}"), words.len(), avg);
    }

    for (cap, len) in [(3u32, 32usize), (4, 64)] {
        let ctx = ThompsonContext::new(cap);
        let words: Vec<Word> = (0..50)
            .map(|_| random_word(Alphabet::thompson(cap), len, &mut rng).unwrap())
            .collect();
        let start = Instant::now();
        for word in &words {
            thompson::normal_form(&ctx, word).map_err(usage)?;
        }
        let avg = start.elapsed().as_micros() as f64 / words.len() as f64;
        println!("{:<32} {:>10} {:>14.1}", format!("thompson_nf p={cap} len={len}"), words.len(), avg);
    }

    for (n, secret_len) in [(2u32, 8u32), (4, 16), (6, 64)] {
        let params = amalgam::generate_params(n, 5, 3, 6, secret_len, &mut rng).map_err(usage)?;
        let iters = 20;
        let start = Instant::now();
        for k in 0..iters {
            let mut ra = ChaCha8Rng::seed_from_u64(args.seed ^ (k as u64) << 1);
            let mut rb = ChaCha8Rng::seed_from_u64(args.seed ^ (k as u64) << 1 | 1);
            let (ka, kb, _) =
                protocol::run_handshake(&params, &mut ra, &params, &mut rb).map_err(usage)?;
            if ka != kb {
                return Err(usage("handshake disagreement during bench"));
            }
        }
        let avg = start.elapsed().as_micros() as f64 / iters as f64;
        println!("{:<32} {:>10} {:>14.1}", format!("handshake n={n} L={secret_len}"), iters, avg);
    }
    Ok(EXIT_OK)
}
