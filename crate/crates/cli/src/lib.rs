//! The `hecc` command-line tool: hierarchical erasure coding of files.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 decode failure,
//! 3 bad archive, config, or erasure map.

pub mod archive;
pub mod corrupt;
pub mod engine;
pub mod symbols;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hecc_core::HierConfig;
use serde::Serialize;

use archive::Archive;
use corrupt::ErasureMap;
use engine::Mode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DECODE: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hecc", version, about = "Hierarchical erasure coding of files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a file into an archive of coded stripes.
    Encode {
        input: PathBuf,
        /// Code parameters in `key = value` form.
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Inject errors and erasures into an archive.
    Corrupt {
        archive: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Error positions, e.g. `1:2`, `3:1:5`, `rand:2`, `rand:1@2`.
        #[arg(long, default_value = "")]
        errors: String,
        /// Erasure positions, same syntax as `--errors`.
        #[arg(long, default_value = "")]
        erasures: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reject corruption that the decoder is not guaranteed to repair.
        #[arg(long)]
        enforce_budget: bool,
        /// Sidecar path; defaults to `<output>.erasures.json`.
        #[arg(long)]
        erasure_map: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Decode an archive back into the original file.
    Decode {
        archive: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        erasure_map: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Print archive parameters and per-block budgets.
    Inspect {
        archive: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

fn io_fail(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display()))
}

fn read_archive(path: &Path) -> Result<Archive, Failure> {
    let bytes = std::fs::read(path).map_err(io_fail(path))?;
    Archive::from_bytes(&bytes)
        .map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, data).map_err(io_fail(path))
}

fn emit<T: Serialize>(
    out: &mut dyn Write,
    format: ReportFormat,
    value: &T,
    text: impl FnOnce() -> String,
) {
    let s = match format {
        ReportFormat::Json => serde_json::to_string_pretty(value).expect("serializable report"),
        ReportFormat::Text => text(),
    };
    let _ = writeln!(out, "{}", s.trim_end());
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "hecc: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Encode {
            input,
            config,
            output,
            report,
        } => {
            let text = std::fs::read_to_string(&config).map_err(io_fail(&config))?;
            let cfg = HierConfig::parse(&text)
                .map_err(|e| Failure::new(EXIT_BAD_INPUT, format!("{}: {e}", config.display())))?;
            let data = std::fs::read(&input).map_err(io_fail(&input))?;
            let archive =
                engine::encode_payload(&cfg, &data).map_err(|e| Failure::new(EXIT_BAD_INPUT, e))?;
            write_file(&output, &archive.to_bytes())?;
            let h = &archive.header;
            #[derive(Serialize)]
            struct R {
                payload_bytes: u64,
                stripes: u64,
                pad_symbols: u64,
            }
            let r = R {
                payload_bytes: h.payload_len,
                stripes: h.stripe_count,
                pad_symbols: h.pad_symbols(),
            };
            emit(out, report, &r, || {
                format!(
                    "encoded {} bytes into {} stripes ({} pad symbols)",
                    r.payload_bytes, r.stripes, r.pad_symbols
                )
            });
            Ok(EXIT_OK)
        }
        Command::Corrupt {
            archive,
            output,
            errors,
            erasures,
            seed,
            enforce_budget,
            erasure_map,
            report,
        } => {
            let mut a = read_archive(&archive)?;
            let usage = |e: corrupt::CorruptError| Failure::new(EXIT_USAGE, e);
            let errs = corrupt::parse_spec(&errors).map_err(usage)?;
            let eras = corrupt::parse_spec(&erasures).map_err(usage)?;
            let mut rng = corrupt::rng(seed);
            let plan = corrupt::plan(&a.header, &errs, &eras, &mut rng).map_err(usage)?;
            if enforce_budget {
                corrupt::check_budget(&a.header, &plan).map_err(usage)?;
            }
            corrupt::apply(&mut a, &plan, &mut rng);
            write_file(&output, &a.to_bytes())?;
            let map = ErasureMap::from_plan(&plan);
            let map_path = erasure_map.unwrap_or_else(|| sidecar_path(&output));
            write_file(
                &map_path,
                serde_json::to_string(&map)
                    .expect("serializable")
                    .as_bytes(),
            )?;
            #[derive(Serialize)]
            struct R {
                seed: u64,
                errors: Vec<[usize; 3]>,
                erasures: Vec<[usize; 3]>,
                erasure_map: String,
            }
            let one = |set: &std::collections::BTreeSet<(usize, usize, usize)>| {
                set.iter().map(|&(s, b, j)| [s + 1, b + 1, j + 1]).collect()
            };
            let r = R {
                seed,
                errors: one(&plan.errors),
                erasures: one(&plan.erasures),
                erasure_map: map_path.display().to_string(),
            };
            emit(out, report, &r, || {
                format!(
                    "injected {} errors and {} erasures (seed {}); erasure map: {}",
                    r.errors.len(),
                    r.erasures.len(),
                    r.seed,
                    r.erasure_map
                )
            });
            Ok(EXIT_OK)
        }
        Command::Decode {
            archive,
            output,
            erasure_map,
            mode,
            report,
        } => {
            let a = read_archive(&archive)?;
            let set = match erasure_map {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(io_fail(&p))?;
                    let bad =
                        |e: String| Failure::new(EXIT_BAD_INPUT, format!("{}: {e}", p.display()));
                    let map: ErasureMap =
                        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
                    map.to_set(&a.header).map_err(|e| bad(e.to_string()))?
                }
                None => engine::ErasureSet::new(),
            };
            let (payload, rep) = engine::decode_archive(&a, &set, mode);
            emit(out, report, &rep, || decode_text(&rep));
            match payload {
                Some(data) => {
                    write_file(&output, &data)?;
                    Ok(EXIT_OK)
                }
                None => Ok(EXIT_DECODE),
            }
        }
        Command::Inspect { archive, report } => {
            let a = read_archive(&archive)?;
            let r = inspect_report(&a);
            emit(out, report, &r, || inspect_text(&r));
            Ok(EXIT_OK)
        }
    }
}

pub fn sidecar_path(archive: &Path) -> PathBuf {
    let mut s = archive.as_os_str().to_owned();
    s.push(".erasures.json");
    PathBuf::from(s)
}

fn decode_text(r: &engine::DecodeReport) -> String {
    let s = &r.summary;
    let mut t = format!(
        "mode {}: {} stripes, {} blocks: {} clean, {} corrected-local, {} corrected-global, {} failed\n",
        r.mode, s.stripes, s.blocks, s.clean, s.corrected_local, s.corrected_global, s.failed
    );
    for b in &r.blocks {
        let pos: Vec<String> = b.positions.iter().map(|p| p.to_string()).collect();
        t += &format!("stripe {} block {}: {}", b.stripe, b.block, b.status);
        if !pos.is_empty() {
            t += &format!(" at {}", pos.join(" "));
        }
        if let Some(e) = &b.error {
            t += &format!(" ({e})");
        }
        t.push('\n');
    }
    t += if r.ok { "decode ok" } else { "decode FAILED" };
    t
}

#[derive(Debug, Serialize)]
struct BlockInfo {
    block: usize,
    k: usize,
    r: usize,
    n: usize,
    delta: usize,
    local_distance: usize,
    local_max_errors: usize,
    local_hybrid_budget: usize,
    global_distance: usize,
    global_max_errors: usize,
    global_hybrid_budget: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
}

#[derive(Debug, Serialize)]
struct InspectReport {
    magic: String,
    m: u32,
    prim_poly: String,
    p: usize,
    delta: usize,
    payload_bytes: u64,
    stripes: u64,
    stripe_symbols: usize,
    pad_symbols: u64,
    blocks: Vec<BlockInfo>,
}

fn inspect_report(a: &Archive) -> InspectReport {
    let h = &a.header;
    let c = &h.config;
    let delta = c.delta();
    InspectReport {
        magic: String::from_utf8_lossy(archive::MAGIC).into_owned(),
        m: c.m,
        prim_poly: format!("{:#x}", c.prim_poly),
        p: c.p(),
        delta,
        payload_bytes: h.payload_len,
        stripes: h.stripe_count,
        stripe_symbols: h.stripe_symbols(),
        pad_symbols: h.pad_symbols(),
        blocks: c
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let local = b.r - b.delta;
                let global = b.r + delta - b.delta;
                BlockInfo {
                    block: i + 1,
                    k: b.k,
                    r: b.r,
                    n: b.n(),
                    delta: b.delta,
                    local_distance: local + 1,
                    local_max_errors: local / 2,
                    local_hybrid_budget: local,
                    global_distance: global + 1,
                    global_max_errors: global / 2,
                    global_hybrid_budget: global,
                    rows: b.rows.clone(),
                    cols: b.cols.clone(),
                }
            })
            .collect(),
    }
}

fn inspect_text(r: &InspectReport) -> String {
    let mut t = format!(
        "format {}\nfield GF(2^{}) primitive polynomial {}\nblocks {} total delta {}\n\
         payload {} bytes in {} stripes of {} symbols ({} pad symbols)\n",
        r.magic,
        r.m,
        r.prim_poly,
        r.p,
        r.delta,
        r.payload_bytes,
        r.stripes,
        r.stripe_symbols,
        r.pad_symbols
    );
    for b in &r.blocks {
        t += &format!(
            "block {}: k={} r={} n={} delta={}\n  local:  distance {}, up to {} errors, 2s+t <= {}\n  \
             global: distance {}, up to {} errors, 2s+t <= {}\n",
            b.block,
            b.k,
            b.r,
            b.n,
            b.delta,
            b.local_distance,
            b.local_max_errors,
            b.local_hybrid_budget,
            b.global_distance,
            b.global_max_errors,
            b.global_hybrid_budget
        );
    }
    t
}
