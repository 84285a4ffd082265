//! Command-line front end and report serialization.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, quartic_symbol_of_two, OddPrime};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_symbol_q_int, symbol_table, PlaceOfQ};
use crate::quadform::{ClassGroup, QuadDiscriminant, DEFAULT_DISC_BOUND};
use crate::selftest;
use crate::tower::{scan, verify, verify_many, Triple, TripleReport, VerifyOptions};
use crate::zsqrt2::Zsqrt2Elem;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "z2tower", version, about = "Verify 2-class groups in the cyclotomic Z2-tower of Q(sqrt(pqr))")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    /// Write the output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for multi-triple runs (0 = all cores).
    #[arg(long, short = 'j', global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Check the level-1 structure by the order bound and the 2-rank only.
    #[arg(long, global = true)]
    pub skip_kuroda: bool,

    /// Largest discriminant for which class groups are computed.
    #[arg(long, global = true, env = "Z2TOWER_DISC_BOUND", default_value_t = DEFAULT_DISC_BOUND)]
    pub disc_bound: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List admissible triples (p, q, r).
    Scan(ScanArgs),
    /// Run the full pipeline on one triple.
    Verify {
        #[arg(short = 'p', long = "p")]
        p: u64,
        #[arg(short = 'q', long = "q")]
        q: u64,
        #[arg(short = 'r', long = "r")]
        r: u64,
    },
    /// Class group of a real quadratic field.
    Classgroup {
        #[arg(long)]
        disc: u64,
        /// Report the narrow instead of the wide class group.
        #[arg(long)]
        narrow: bool,
    },
    /// Evaluate a single symbol.
    Symbol {
        #[arg(long, value_enum)]
        kind: SymbolKind,
        /// legendre: A P; quartic2: P; hilbert-q: A B PLACE (prime or inf); hilbert-q1: ALPHA BETA
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Cross-check fast code paths against brute-force oracles.
    Selftest,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, env = "Z2TOWER_P_MAX", default_value_t = 500)]
    pub p_max: u64,
    #[arg(long, env = "Z2TOWER_Q_MAX", default_value_t = 100)]
    pub q_max: u64,
    #[arg(long, env = "Z2TOWER_R_MAX", default_value_t = 100)]
    pub r_max: u64,
    /// Also verify every triple found.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SymbolKind {
    Legendre,
    Quartic2,
    HilbertQ,
    HilbertQ1,
}

/// Column names of the CSV report, one row per triple.
pub const CSV_HEADER: [&str; 22] = [
    "p",
    "q",
    "r",
    "condition1",
    "lemma31",
    "lemma32",
    "prop33",
    "lemma34",
    "prop35",
    "cor36",
    "lemma37",
    "prop41",
    "remark42",
    "thm11",
    "order_a_k1",
    "rank_a_k1",
    "aprime_k1",
    "d_k1_order",
    "a1",
    "x_prime",
    "x",
    "overall",
];

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Internal(format!("csv: {e}"))
}

fn json_error(e: impl std::fmt::Display) -> Error {
    Error::Internal(format!("json: {e}"))
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn csv_row(rep: &TripleReport) -> Vec<String> {
    let t = rep.triple;
    let s = &rep.summary;
    let mut row = vec![
        t.p.to_string(),
        t.q.to_string(),
        t.r.to_string(),
        pass_fail(rep.condition1.passes).to_string(),
    ];
    row.extend(rep.checks().iter().map(|(_, c)| pass_fail(c.pass).to_string()));
    row.extend([
        s.order_a_k1.to_string(),
        s.rank_a_k1.to_string(),
        s.aprime_k1.to_string(),
        s.d_k1_order.to_string(),
        s.a1.to_string(),
        rep.structure.x_prime.clone(),
        rep.structure.x.clone(),
        rep.overall.to_string(),
    ]);
    row
}

fn text_report(rep: &TripleReport) -> String {
    let mut out = format!("triple {}: {}\n", rep.triple, rep.overall);
    for (name, c) in rep.checks() {
        out.push_str(&format!("  {name:<9} {:<4}  {}\n            computed: {}\n", pass_fail(c.pass), c.claimed, c.computed));
    }
    if rep.overall.is_pass() {
        let s = &rep.structure;
        out.push_str(&format!("  A(k₁) ≅ {}\n  X′(k_∞) ≅ {}\n  X(k_∞) ≅ {}\n  {}\n  {}\n", s.a_k1, s.x_prime, s.x, s.lambda, s.a_n0));
        for note in &s.stability_notes {
            out.push_str(&format!("  note: {note}\n"));
        }
    } else if let Some(f) = rep.first_failure() {
        out.push_str(&format!("  first failing check: {f}\n"));
    }
    out
}

/// Serializes reports; a single report is written as a JSON object, several as an array.
pub fn write_reports(reports: &[TripleReport], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut v = if reports.len() == 1 {
                serde_json::to_vec_pretty(&reports[0])
            } else {
                serde_json::to_vec_pretty(reports)
            }
            .map_err(json_error)?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(csv_error)?;
            for rep in reports {
                w.write_record(csv_row(rep)).map_err(csv_error)?;
            }
            w.into_inner().map_err(csv_error)
        }
        Format::Text => Ok(reports.iter().map(text_report).collect::<Vec<_>>().join("\n").into_bytes()),
    }
}

pub fn write_report(report: &TripleReport, format: Format) -> Result<Vec<u8>> {
    write_reports(std::slice::from_ref(report), format)
}

/// Parses a report written with [`Format::Json`].
pub fn read_report(bytes: &[u8]) -> Result<TripleReport> {
    serde_json::from_slice(bytes).map_err(json_error)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSummary {
    pub disc: u64,
    pub narrow: bool,
    pub structure: String,
    pub invariants: Vec<u64>,
    pub order: u64,
    pub two_part: Vec<u64>,
    pub unit_norm: i8,
    /// `(x, y)` with unit `(x + y√D)/2`.
    pub unit: (String, String),
}

struct Emitter<'a> {
    cfg: &'a RunConfig,
    out: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn emit(&mut self, bytes: &[u8]) -> Result<()> {
        match &self.cfg.output {
            Some(path) => std::fs::write(path, bytes)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
            None => self.out.write_all(bytes).map_err(|e| Error::Internal(format!("stdout: {e}"))),
        }
    }
}

fn options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions { disc_bound: cfg.disc_bound, skip_kuroda: cfg.skip_kuroda }
}

fn arg<T: std::str::FromStr>(args: &[String], i: usize, what: &str) -> Result<T> {
    args.get(i)
        .ok_or_else(|| Error::InvalidInput(format!("missing argument {what}")))?
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse {what} from {:?}", args[i])))
}

fn run_symbol(kind: SymbolKind, args: &[String], format: Format) -> Result<Vec<u8>> {
    let expected = match kind {
        SymbolKind::Legendre => 2,
        SymbolKind::Quartic2 => 1,
        SymbolKind::HilbertQ => 3,
        SymbolKind::HilbertQ1 => 2,
    };
    if args.len() != expected {
        return Err(Error::InvalidInput(format!("{kind:?} takes {expected} arguments, got {}", args.len())));
    }
    let value = match kind {
        SymbolKind::Legendre => {
            let a: BigInt = arg(args, 0, "A")?;
            legendre(&a, OddPrime::new(arg(args, 1, "P")?)?)
        }
        SymbolKind::Quartic2 => quartic_symbol_of_two(OddPrime::new(arg(args, 0, "P")?)?)?,
        SymbolKind::HilbertQ => {
            let a: BigInt = arg(args, 0, "A")?;
            let b: BigInt = arg(args, 1, "B")?;
            let place = match args[2].as_str() {
                "inf" | "real" => PlaceOfQ::Real,
                _ => PlaceOfQ::Prime(arg(args, 2, "PLACE")?),
            };
            if let PlaceOfQ::Prime(p) = place {
                if p != 2 {
                    OddPrime::new(p)?;
                }
            }
            hilbert_symbol_q_int(&a, &b, place)?
        }
        SymbolKind::HilbertQ1 => {
            let alpha: Zsqrt2Elem = arg(args, 0, "ALPHA")?;
            let beta: Zsqrt2Elem = arg(args, 1, "BETA")?;
            let table = symbol_table(&alpha, &beta)?;
            return Ok(match format {
                Format::Json => {
                    let mut v = serde_json::to_vec_pretty(&table).map_err(json_error)?;
                    v.push(b'\n');
                    v
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["place", "value"]).map_err(csv_error)?;
                    for e in &table.entries {
                        w.write_record([e.place.to_string(), e.value.to_string()]).map_err(csv_error)?;
                    }
                    w.into_inner().map_err(csv_error)?
                }
                Format::Text => {
                    let mut s = String::new();
                    for e in &table.entries {
                        s.push_str(&format!("{}: {}\n", e.place, e.value));
                    }
                    s.push_str(&format!("product: {}\n", table.product));
                    s.into_bytes()
                }
            });
        }
    };
    Ok(match format {
        Format::Json => format!("{}\n", value.as_i8()).into_bytes(),
        Format::Csv => format!("value\n{}\n", value.as_i8()).into_bytes(),
        Format::Text => format!("{value}\n").into_bytes(),
    })
}

fn run_classgroup(cfg: &RunConfig, disc: u64, narrow: bool) -> Result<Vec<u8>> {
    let d = QuadDiscriminant::new(disc)?;
    let cg = ClassGroup::compute(&d, cfg.disc_bound)?;
    let st = if narrow { cg.narrow_structure() } else { cg.wide_structure() };
    let summary = ClassGroupSummary {
        disc,
        narrow,
        structure: st.to_string(),
        invariants: st.0.clone(),
        order: st.order(),
        two_part: st.two_part(),
        unit_norm: cg.unit().unit_norm,
        unit: (cg.unit().x.to_string(), cg.unit().y.to_string()),
    };
    Ok(match cfg.format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&summary).map_err(json_error)?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["disc", "narrow", "structure", "order", "two_part", "unit_norm"]).map_err(csv_error)?;
            w.write_record([
                disc.to_string(),
                narrow.to_string(),
                summary.structure.clone(),
                summary.order.to_string(),
                GroupStructureText(&summary.two_part).to_string(),
                summary.unit_norm.to_string(),
            ])
            .map_err(csv_error)?;
            w.into_inner().map_err(csv_error)?
        }
        Format::Text => format!(
            "{} class group of D = {disc}: {} (order {})\nfundamental unit ({} + {}√{disc})/2 of norm {}\n",
            if narrow { "narrow" } else { "wide" },
            summary.structure,
            summary.order,
            summary.unit.0,
            summary.unit.1,
            summary.unit_norm
        )
        .into_bytes(),
    })
}

struct GroupStructureText<'a>(&'a [u64]);

impl std::fmt::Display for GroupStructureText<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::group::GroupStructure::describe(self.0))
    }
}

fn run_scan(cfg: &RunConfig, args: &ScanArgs, diagnostics: &mut Vec<String>) -> Result<(Vec<u8>, i32)> {
    if args.p_max == 0 || args.q_max == 0 || args.r_max == 0 {
        return Err(Error::InvalidInput("scan bounds must be positive".into()));
    }
    let triples = scan(args.p_max, args.q_max, args.r_max);
    if !args.verify {
        let bytes = match cfg.format {
            Format::Json => {
                let mut v = serde_json::to_vec_pretty(&triples).map_err(json_error)?;
                v.push(b'\n');
                v
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["p", "q", "r"]).map_err(csv_error)?;
                for t in &triples {
                    w.write_record([t.p.to_string(), t.q.to_string(), t.r.to_string()]).map_err(csv_error)?;
                }
                w.into_inner().map_err(csv_error)?
            }
            Format::Text => triples.iter().map(|t| format!("{t}\n")).collect::<String>().into_bytes(),
        };
        return Ok((bytes, EXIT_PASS));
    }
    let opts = options(cfg);
    let results = verify_many(&triples, &opts);
    let mut reports = Vec::new();
    let mut code = EXIT_PASS;
    for (t, r) in results {
        match r {
            Ok(rep) => {
                if !rep.overall.is_pass() {
                    code = code.max(EXIT_CHECK_FAILED);
                }
                reports.push(rep);
            }
            Err(e) => {
                diagnostics.push(format!("error: {t}: {e}"));
                code = EXIT_USAGE;
            }
        }
    }
    Ok((write_reports(&reports, cfg.format)?, code))
}

fn run_selftest(format: Format) -> Result<(Vec<u8>, i32)> {
    let cases = selftest::run_all()?;
    let ok = cases.iter().all(|c| c.pass);
    let bytes = match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&cases).map_err(json_error)?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "checked", "mismatches", "pass"]).map_err(csv_error)?;
            for c in &cases {
                w.write_record([c.name.clone(), c.checked.to_string(), c.mismatches.to_string(), pass_fail(c.pass).into()])
                    .map_err(csv_error)?;
            }
            w.into_inner().map_err(csv_error)?
        }
        Format::Text => cases
            .iter()
            .map(|c| {
                let mut line = format!("{:<4} {} ({} checked)", pass_fail(c.pass), c.name, c.checked);
                if !c.detail.is_empty() {
                    line.push_str(&format!(": {}", c.detail));
                }
                line + "\n"
            })
            .collect::<String>()
            .into_bytes(),
    };
    Ok((bytes, if ok { EXIT_PASS } else { EXIT_CHECK_FAILED }))
}

fn dispatch(cfg: &RunConfig, diagnostics: &mut Vec<String>) -> Result<(Vec<u8>, i32)> {
    match &cfg.command {
        Command::Scan(args) => run_scan(cfg, args, diagnostics),
        Command::Verify { p, q, r } => {
            let rep = verify(Triple::new(*p, *q, *r), &options(cfg))?;
            let code = if rep.overall.is_pass() { EXIT_PASS } else { EXIT_CHECK_FAILED };
            Ok((write_report(&rep, cfg.format)?, code))
        }
        Command::Classgroup { disc, narrow } => Ok((run_classgroup(cfg, *disc, *narrow)?, EXIT_PASS)),
        Command::Symbol { kind, args } => Ok((run_symbol(*kind, args, cfg.format)?, EXIT_PASS)),
        Command::Selftest => run_selftest(cfg.format),
    }
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut diagnostics = Vec::new();
    let result = if cfg.jobs > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
            Ok(pool) => pool.install(|| dispatch(&cfg, &mut diagnostics)),
            Err(e) => Err(Error::InvalidInput(format!("thread pool: {e}"))),
        }
    } else {
        dispatch(&cfg, &mut diagnostics)
    };
    for line in diagnostics {
        let _ = writeln!(err, "{line}");
    }
    match result {
        Ok((bytes, code)) => {
            let mut em = Emitter { cfg: &cfg, out };
            match em.emit(&bytes) {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::CHECK_NAMES;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("z2tower").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn csv_header_matches_check_names() {
        assert_eq!(&CSV_HEADER[4..14], &CHECK_NAMES[..]);
    }

    #[test]
    fn symbol_commands() {
        assert_eq!(run_capture(&["symbol", "--kind", "quartic2", "41"]), (0, "-1\n".into(), String::new()));
        assert_eq!(run_capture(&["symbol", "--kind", "legendre", "33", "41"]).1, "1\n");
        assert_eq!(run_capture(&["symbol", "--kind", "hilbert-q", "-1", "-1", "2"]).1, "-1\n");
        let (code, out, _) = run_capture(&["symbol", "--kind", "hilbert-q1", "1+√2", "5289"]);
        assert_eq!(code, 0);
        assert!(out.contains("<3>: -1") && out.contains("product: 1"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["verify", "-p", "41", "-q", "3", "-r", "11"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["verify", "--bogus"]).0, 2);
        assert_eq!(run_capture(&["symbol", "--kind", "quartic2", "43"]).0, 2);
        assert_eq!(run_capture(&["classgroup", "--disc", "12", "--disc-bound", "5"]).0, 2);
    }

    #[test]
    fn classgroup_command() {
        let (code, out, _) = run_capture(&["classgroup", "--disc", "42312", "--format", "json"]);
        assert_eq!(code, 0);
        let s: ClassGroupSummary = serde_json::from_str(&out).unwrap();
        assert_eq!(s.two_part, vec![2, 2]);
    }
}
