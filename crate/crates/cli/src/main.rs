use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rankdec::analysis::{bound_prime, bounds_nonprime, min_weight_count_formula, MinWeightReport};
use rankdec::reproduce::{reproduce, Example, ReproReport};
use rankdec::suites::{run_suite, Suite, SuiteConfig, SuiteReport};
use rankdec::{CodeRecord, CodeSpec, Error, RankCode, DEFAULT_ENUM_CAP, DEFAULT_PROJ_CAP};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Enum,
    Formula,
    Both,
}

#[derive(Parser, Debug)]
#[command(name = "rankdec", version, about = "Completely decomposable rank-metric codes")]
struct Cli {
    /// Maximum number of enumerated messages.
    #[arg(long, global = true, env = "RANKDEC_CAP", default_value_t = DEFAULT_ENUM_CAP)]
    cap: u64,
    /// Maximum number of enumerated projective points.
    #[arg(long, global = true, default_value_t = DEFAULT_PROJ_CAP)]
    pcap: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code from a spec file and summarize it.
    Build {
        spec: PathBuf,
        /// Where to write the canonical code file.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Weight distribution of a code file (spec or canonical).
    Wdist {
        code: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Enum)]
        method: Method,
    },
    /// Run a verification suite.
    Verify {
        /// duality, products, characterization, bounds or all
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Recompute a worked example: m6, m7, prop45 or lowerbound.
    Reproduce { example: String },
    /// Closed-form bounds on the number of minimum-weight codewords.
    Bounds {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        nk: usize,
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
struct RunConfig {
    enumeration_cap: u64,
    projective_cap: u64,
    seed: u64,
    threads: usize,
    output_format: Format,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        if cli.cap == 0 || cli.pcap == 0 {
            return Err(Failure::Usage("caps must be positive".into()));
        }
        let threads = match cli.threads {
            Some(0) => return Err(Failure::Usage("--threads must be at least 1".into())),
            Some(t) => t,
            None => rayon::current_num_threads(),
        };
        Ok(RunConfig {
            enumeration_cap: cli.cap,
            projective_cap: cli.pcap,
            seed: cli.seed,
            threads,
            output_format: cli.format,
        })
    }
}

enum Failure {
    Usage(String),
    Cap(String),
    Alarm(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Cap(_) => 2,
            Failure::Alarm(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(s) | Failure::Cap(s) | Failure::Alarm(s) => s,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::FalsificationAlarm(_) => Failure::Alarm(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Rendered output plus whether the run counts as a falsification.
struct Output {
    json: Value,
    csv: Option<String>,
    pretty: String,
    alarm: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = RunConfig::from_cli(cli)?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let out = match &cli.command {
        Command::Build { spec, out } => cmd_build(&cfg, spec, out.as_deref())?,
        Command::Wdist { code, method } => cmd_wdist(&cfg, code, *method)?,
        Command::Verify { suite, trials } => cmd_verify(&cfg, suite, *trials)?,
        Command::Reproduce { example } => cmd_reproduce(&cfg, example)?,
        Command::Bounds { q, m, nk, ell } => cmd_bounds(*q, *m, *nk, *ell)?,
    };
    let text = match cfg.output_format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("values serialize") + "\n",
        Format::Csv => out
            .csv
            .ok_or_else(|| Failure::Usage("this command has no CSV output".into()))?,
        Format::Pretty => out.pretty,
    };
    print!("{text}");
    match out.alarm {
        Some(msg) => Err(Failure::Alarm(msg)),
        None => Ok(()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_err(path: &Path, e: serde_json::Error) -> Failure {
    Failure::Usage(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
}

/// Accepts either a spec file or a canonical code file.
fn load_code(path: &Path) -> Result<RankCode, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
    if value.get("generator").is_some() {
        let rec: CodeRecord = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        Ok(rec.to_code()?)
    } else {
        let spec: CodeSpec = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        Ok(spec.build()?)
    }
}

fn field_name(code: &RankCode) -> String {
    let c = code.context();
    if c.a() == 1 {
        format!("F_{}^{}", c.p(), c.m())
    } else {
        format!("F_({}^{})^{}", c.p(), c.a(), c.m())
    }
}

fn cmd_build(cfg: &RunConfig, spec: &Path, out: Option<&Path>) -> Result<Output, Failure> {
    let text = read(spec)?;
    let spec_val: CodeSpec = serde_json::from_str(&text).map_err(|e| parse_err(spec, e))?;
    let code = spec_val.build()?;
    let types = code.decomposition().expect("built codes are decomposed").type_vector();
    let dist = match code.weight_distribution(cfg.enumeration_cap) {
        Ok(d) => Some(d),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let d = dist.as_ref().and_then(|d| d.min_distance());
    let mrd = match &dist {
        Some(_) => Some(code.is_mrd(cfg.enumeration_cap)?),
        None => None,
    };
    let record = CodeRecord::from_code(&code);
    if let Some(path) = out {
        let body = serde_json::to_string_pretty(&record).expect("records serialize") + "\n";
        std::fs::write(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let json = json!({
        "field": field_name(&code),
        "type": types,
        "n": code.n(),
        "k": code.k(),
        "nondegenerate": code.is_nondegenerate(),
        "min_distance": d,
        "mrd": mrd,
        "code": record,
    });
    let yn = |b: Option<bool>| b.map_or("not enumerated (cap)".to_string(), |b| if b { "yes".into() } else { "no".into() });
    let mut pretty = String::new();
    let _ = writeln!(pretty, "field          {}", field_name(&code));
    let _ = writeln!(pretty, "type           {types:?}");
    let _ = writeln!(pretty, "length n       {}", code.n());
    let _ = writeln!(pretty, "dimension k    {}", code.k());
    let _ = writeln!(pretty, "nondegenerate  {}", if code.is_nondegenerate() { "yes" } else { "no" });
    let _ = writeln!(pretty, "min distance   {}", d.map_or("not enumerated (cap)".to_string(), |d| d.to_string()));
    let _ = writeln!(pretty, "MRD            {}", yn(mrd));
    if let Some(p) = out {
        let _ = writeln!(pretty, "written to     {}", p.display());
    }
    Ok(Output { json, csv: None, pretty, alarm: None })
}

fn with_decomposition(cfg: &RunConfig, code: RankCode) -> Result<RankCode, Failure> {
    if code.decomposition().is_some() {
        return Ok(code);
    }
    match code.detect_complete_decomposability(cfg.projective_cap)? {
        Some(dec) => Ok(code.with_decomposition(dec)?),
        None => Err(Error::NotDecomposable.into()),
    }
}

fn formula_pretty(out: &mut String, rep: &MinWeightReport) {
    let _ = writeln!(out, "minimum weight n_k   {}", rep.min_weight);
    let _ = writeln!(out, "trailing repeats ℓ   {}", rep.ell);
    for e in &rep.j_matrix {
        let _ = writeln!(out, "  j[{},{}] = {}", e.i, e.h, e.j);
    }
    let _ = writeln!(out, "closed-form count    {}", rep.formula_count);
    if let Some(a) = rep.enumerated_count {
        let _ = writeln!(out, "enumerated count     {a}");
    }
    let _ = writeln!(out, "lower bound          {}", rep.lower_bound);
    let _ = writeln!(out, "upper bound          {}", rep.upper_bound);
    if let Some(b) = rep.prime_upper_bound {
        let _ = writeln!(out, "prime-m upper bound  {b}");
    }
}

fn cmd_wdist(cfg: &RunConfig, path: &Path, method: Method) -> Result<Output, Failure> {
    let code = load_code(path)?;
    let messages = (code.context().order() as u128).pow(code.k() as u32);
    let mut json = serde_json::Map::new();
    let mut pretty = String::new();
    let mut csv = None;
    let mut alarm = None;
    let mut counts = None;
    if matches!(method, Method::Enum | Method::Both) {
        let dist = code.weight_distribution(cfg.enumeration_cap)?;
        json.insert("counts".into(), json!(dist.counts));
        json.insert("min_distance".into(), json!(dist.min_distance()));
        json.insert("messages".into(), json!(messages));
        let mut c = String::from("weight,count\n");
        let _ = writeln!(pretty, "weight  count");
        for (w, n) in dist.counts.iter().enumerate() {
            let _ = writeln!(c, "{w},{n}");
            let _ = writeln!(pretty, "{w:>6}  {n}");
        }
        csv = Some(c);
        counts = Some(dist);
    }
    if matches!(method, Method::Formula | Method::Both) {
        let code = with_decomposition(cfg, code)?;
        let mut rep = min_weight_count_formula(&code)?;
        if let Some(d) = &counts {
            rep.enumerated_count = Some(d.get(rep.min_weight) as u128);
        }
        if method == Method::Formula {
            csv = Some(format!("weight,count\n{},{}\n", rep.min_weight, rep.formula_count));
        } else {
            pretty.push('\n');
        }
        formula_pretty(&mut pretty, &rep);
        if let Some(agree) = rep.agrees() {
            json.insert("agree".into(), json!(agree));
            let _ = writeln!(pretty, "{}", if agree { "agree" } else { "DISAGREE" });
            if !agree {
                alarm = Some(format!(
                    "closed form gives {} words of weight {}, enumeration gives {}",
                    rep.formula_count,
                    rep.min_weight,
                    rep.enumerated_count.unwrap_or_default()
                ));
            }
        }
        json.insert("formula".into(), serde_json::to_value(&rep).expect("reports serialize"));
    }
    Ok(Output { json: Value::Object(json), csv, pretty, alarm })
}

fn cmd_verify(cfg: &RunConfig, suite: &str, trials: Option<usize>) -> Result<Output, Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let scfg = SuiteConfig { seed: cfg.seed, trials, cap: cfg.enumeration_cap, pcap: cfg.projective_cap };
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, &scfg)).collect::<Result<_, _>>()?;
    let mut pretty = String::new();
    let mut csv = String::from("suite,check,instances,failures\n");
    for r in &reports {
        let _ = writeln!(pretty, "{} (seed {})", r.suite.name(), r.seed);
        for c in &r.checks {
            let tag = if c.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(pretty, "  {tag}  {:>6} instances  {:>4} failures  {}", c.instances, c.failures, c.name);
            if let Some(w) = &c.first_failure {
                let _ = writeln!(pretty, "        first failure: {w}");
            }
            let _ = writeln!(csv, "{},\"{}\",{},{}", r.suite.name(), c.name, c.instances, c.failures);
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed()).map(move |c| format!("{}: {}", r.suite.name(), c.name)))
        .collect();
    let alarm = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join("; ")));
    let json = if reports.len() == 1 { json!(reports[0]) } else { json!(reports) };
    Ok(Output { json, csv: Some(csv), pretty, alarm })
}

fn cmd_reproduce(cfg: &RunConfig, example: &str) -> Result<Output, Failure> {
    let ex: Example = example.parse()?;
    let rep: ReproReport = reproduce(ex, cfg.enumeration_cap)?;
    let mut pretty = String::new();
    let _ = writeln!(pretty, "{} over {}", rep.example.name(), rep.field);
    let mut csv = String::from("label,weight,expected,computed\n");
    for row in &rep.rows {
        let _ = writeln!(pretty, "\n{}", row.label);
        match &row.witness {
            Some(w) => {
                let _ = writeln!(pretty, "  witness {} (minimal polynomial {}), candidate {}", w.value, w.minimal_polynomial, row.candidates_tried);
            }
            None => {
                let _ = writeln!(pretty, "  no witness among {} candidates", row.candidates_tried);
            }
        }
        let _ = writeln!(pretty, "  {:>6}  {:>10}  {:>10}", "weight", "expected", "computed");
        for i in 0..row.expected.len().max(row.computed.len()) {
            let show = |v: Option<&u64>| v.map_or("-".to_string(), u64::to_string);
            let (e, c) = (row.expected.get(i), row.computed.get(i));
            let _ = writeln!(pretty, "  {i:>6}  {:>10}  {:>10}", show(e), show(c));
            let _ = writeln!(csv, "\"{}\",{i},{},{}", row.label, show(e), show(c));
        }
        let _ = writeln!(pretty, "  {}", if row.matched { "matched" } else { "MISMATCH" });
    }
    for n in &rep.notes {
        let _ = writeln!(pretty, "\n{n}");
    }
    let _ = writeln!(pretty, "\nverdict: {}", if rep.passed { "reproduced" } else { "NOT reproduced" });
    let alarm = (!rep.passed).then(|| format!("example {} was not reproduced", ex.name()));
    Ok(Output { json: json!(rep), csv: Some(csv), pretty, alarm })
}

fn cmd_bounds(q: u64, m: usize, nk: usize, ell: usize) -> Result<Output, Failure> {
    let (lower, upper) = bounds_nonprime(q, m, nk, ell)?;
    let prime = match bound_prime(q, m, ell) {
        Ok(b) => Some(b),
        Err(Error::NotApplicable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let json = json!({"q": q, "m": m, "n_k": nk, "ell": ell, "lower": lower, "upper": upper, "prime_upper": prime});
    let csv = format!(
        "q,m,n_k,ell,lower,upper,prime_upper\n{q},{m},{nk},{ell},{lower},{upper},{}\n",
        prime.map_or(String::new(), |b| b.to_string())
    );
    let mut pretty = format!("q = {q}, m = {m}, n_k = {nk}, ℓ = {ell}\nlower  {lower}\nupper  {upper}\n");
    if let Some(b) = prime {
        let _ = writeln!(pretty, "prime  {b}");
    }
    Ok(Output { json, csv: Some(csv), pretty, alarm: None })
}
