use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use entswap_core::moments::{exact_moment_equal_bounded, exact_moment_indep_bounded, limit_moment, parse_rational};
use entswap_core::moments::DEFAULT_EQUAL_CASE_BOUND;
use entswap_core::perm::DEFAULT_ENUMERATION_BOUND;
use entswap_core::qstates::ppt_scan;
use entswap_core::rmt::summarize;
use entswap_core::speclaws::{histogram_of, ks_distance_sorted};
use entswap_core::verify::verify_all;
use entswap_core::{EmpiricalSpectrum, LimitLaw, Rational, SwapCase, SwapParams};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{extension, Cell, OutputDir, RunManifest, Table, SCHEMA_VERSION};

/// Per-invocation context shared by all subcommands.
pub struct Run {
    pub start: Instant,
    pub argv: Vec<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Run {
    fn manifest(&self, command: &str, params: Value, realized_s: Option<u64>) -> RunManifest {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            argv: self.argv.clone(),
            params,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: self.start.elapsed().as_millis() as u64,
            outputs: Default::default(),
            realized_s,
        }
    }

    fn require_out(&self, command: &str) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("`{command}` writes several files and needs --out <DIR>")))
    }

    /// Writes `name` plus a manifest when `--out` is set.
    fn emit_single(&self, command: &str, name: &str, bytes: &[u8], params: Value, s: Option<u64>) -> Result<(), CliError> {
        if let Some(dir) = &self.out {
            let mut out = OutputDir::create(dir)?;
            out.write(name, bytes)?;
            out.finish(self.manifest(command, params, s))?;
        }
        Ok(())
    }
}

/// Dimensions after applying `--d` and converting `--c` to `s`.
#[derive(Clone, Debug)]
pub struct Dimensions {
    pub d1: u64,
    pub d2: u64,
    pub s: u64,
    pub c: Rational,
}

fn parse_ratio(text: &str) -> Result<Rational, CliError> {
    let c = parse_rational(text)?;
    if !c.is_positive() {
        return Err(CliError::Usage(format!("--c must be positive, got {text}")));
    }
    Ok(c)
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("finite rational")
}

pub fn resolve_dimensions(
    d: Option<u64>,
    d1: Option<u64>,
    d2: Option<u64>,
    s: Option<u64>,
    c: Option<&str>,
) -> Result<Dimensions, CliError> {
    let d1 = d1.or(d).ok_or_else(|| CliError::Usage("missing --d1 (or --d)".into()))?;
    let d2 = d2.or(d).ok_or_else(|| CliError::Usage("missing --d2 (or --d)".into()))?;
    if d1 == 0 || d2 == 0 {
        return Err(CliError::Usage("dimensions must be positive".into()));
    }
    let s = match (s, c) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --s or --c, not both".into())),
        (Some(s), None) => s,
        (None, Some(text)) => {
            let scaled = (parse_ratio(text)? * Rational::from_integer(d2.into())).round();
            scaled.to_integer().to_u64().unwrap_or(0)
        }
        (None, None) => return Err(CliError::Usage("missing --s or --c".into())),
    };
    if s == 0 {
        return Err(CliError::Usage("s must be at least 1".into()));
    }
    let c = Rational::new(s.into(), d2.into());
    Ok(Dimensions { d1, d2, s, c })
}

fn dims_json(dims: &Dimensions) -> Value {
    json!({ "d1": dims.d1, "d2": dims.d2, "s": dims.s, "c": dims.c.to_string() })
}

fn swap_params(case: SwapCase, dims: &Dimensions) -> Result<SwapParams, CliError> {
    let size = |n: u64| usize::try_from(n).map_err(|_| CliError::Usage(format!("dimension {n} too large")));
    Ok(SwapParams::new(case, size(dims.d1)?, size(dims.d2)?, size(dims.s)?)?)
}

pub fn moments_exact(run: &Run, args: &ExactArgs) -> Result<(), CliError> {
    let a = &args.dims;
    let dims = resolve_dimensions(a.d, a.d1, a.d2, a.s, a.c.as_deref())?;
    let case = SwapCase::from(args.case);
    let value: Rational = match case {
        SwapCase::Independent => exact_moment_indep_bounded(
            args.p,
            dims.d1,
            dims.d2,
            dims.s,
            args.bound.unwrap_or(DEFAULT_ENUMERATION_BOUND),
        )?,
        SwapCase::Equal => exact_moment_equal_bounded(
            args.p,
            dims.d1,
            dims.d2,
            dims.s,
            args.bound.unwrap_or(DEFAULT_EQUAL_CASE_BOUND),
        )?,
    };
    let text = format!("{value}\n");
    print!("{text}");
    let mut params = dims_json(&dims);
    params["case"] = json!(case.as_str());
    params["p"] = json!(args.p);
    run.emit_single("moments exact", "moment.txt", text.as_bytes(), params, Some(dims.s))
}

pub fn moments_limit(run: &Run, args: &LimitArgs) -> Result<(), CliError> {
    if args.p == 0 {
        return Err(CliError::Usage("--p must be at least 1".into()));
    }
    let poly = limit_moment::<Rational>(args.p);
    let text = match &args.c {
        Some(c) => format!("{}\n", poly.eval(&parse_ratio(c)?)),
        None => format!("{poly}\n"),
    };
    print!("{text}");
    let params = json!({ "p": args.p, "c": args.c });
    run.emit_single("moments limit", "limit.txt", text.as_bytes(), params, None)
}

pub fn verify(run: &Run, args: &VerifyArgs) -> Result<(), CliError> {
    let report = verify_all(args.pmax)?;
    let text = report.to_string();
    print!("{text}");
    run.emit_single("verify", "report.txt", text.as_bytes(), json!({ "pmax": args.pmax }), None)?;
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().map(|o| o.name).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

pub fn simulate(run: &Run, args: &SimulateArgs) -> Result<(), CliError> {
    let dir = run.require_out("simulate")?;
    let a = &args.dims;
    let dims = resolve_dimensions(a.d, a.d1, a.d2, a.s, a.c.as_deref())?;
    if args.pmax == 0 || args.samples < 2 {
        return Err(CliError::Usage("need --pmax >= 1 and --samples >= 2".into()));
    }
    let case = SwapCase::from(args.case);
    let params = swap_params(case, &dims)?;

    let spectra: Vec<EmpiricalSpectrum<f64>> = (0..args.samples as u64)
        .into_par_iter()
        .map(|i| EmpiricalSpectrum::simulate_z(params, run.seed, i))
        .collect();

    let mut eigs = Table::new(vec!["sample_index", "eig_index", "value"]);
    for (i, spectrum) in spectra.iter().enumerate() {
        for (k, &x) in spectrum.values().iter().enumerate() {
            eigs.push(vec![Cell::Int(i as u64), Cell::Int(k as u64), Cell::Float(x)]);
        }
    }

    let obs: Vec<Vec<f64>> = spectra
        .iter()
        .map(|sp| (1..=args.pmax).map(|p| sp.moment(p)).collect())
        .collect();
    let estimates = summarize(&obs)?;
    let exploratory = case == SwapCase::Equal;
    let mut header = vec!["p", "mean", "stderr", "limit_value"];
    if exploratory {
        header.push("exploratory");
    }
    let mut moments = Table::new(header);
    for e in &estimates {
        let limit = to_f64(&limit_moment::<Rational>(e.p).eval(&dims.c));
        let mut row = vec![Cell::Int(e.p as u64), Cell::Float(e.mean), Cell::Float(e.stderr), Cell::Float(limit)];
        if exploratory {
            row.push(Cell::Bool(true));
        }
        moments.push(row);
    }

    let ext = extension(run.format);
    let mut out = OutputDir::create(dir)?;
    out.write(&format!("eigs.{ext}"), &eigs.render(run.format)?)?;
    out.write(&format!("moments.{ext}"), &moments.render(run.format)?)?;
    let mut p = dims_json(&dims);
    p["case"] = json!(case.as_str());
    p["pmax"] = json!(args.pmax);
    p["samples"] = json!(args.samples);
    out.finish(run.manifest("simulate", p, Some(dims.s)))
}

/// Reads the `value` column, optionally restricted to one `sample_index`.
pub fn read_eigenvalues(path: &Path, sample: Option<u64>) -> Result<Vec<f64>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(CliError::csv)?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let value_col = column("value").ok_or_else(|| CliError::Data(format!("{}: no `value` column", path.display())))?;
    let sample_col = match sample {
        Some(_) => Some(
            column("sample_index")
                .ok_or_else(|| CliError::Data(format!("{}: no `sample_index` column", path.display())))?,
        ),
        None => None,
    };
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(pos) => CliError::Data(format!("{}: line {}: {e}", path.display(), pos.line())),
            None => CliError::csv(e),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| CliError::Data(format!("{}: line {line}: invalid {what}", path.display()));
        if let (Some(col), Some(wanted)) = (sample_col, sample) {
            let idx: u64 = record.get(col).and_then(|t| t.trim().parse().ok()).ok_or_else(|| bad("sample_index"))?;
            if idx != wanted {
                continue;
            }
        }
        let x: f64 = record
            .get(value_col)
            .and_then(|t| t.trim().parse().ok())
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| bad("value"))?;
        values.push(x);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no eigenvalues", path.display())));
    }
    Ok(values)
}

pub fn spectrum(run: &Run, args: &SpectrumArgs) -> Result<(), CliError> {
    if args.bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let (values, dims) = match &args.input {
        Some(path) => (read_eigenvalues(path, args.sample)?, None),
        None => {
            let s_text = if args.s.is_none() { args.c.as_deref() } else { None };
            let dims = resolve_dimensions(args.d, args.d1, args.d2, args.s, s_text)?;
            let params = swap_params(args.case.into(), &dims)?;
            let sp = EmpiricalSpectrum::<f64>::simulate_z(params, run.seed, args.sample.unwrap_or(0));
            (sp.values().to_vec(), Some(dims))
        }
    };
    let law_c = match (&args.c, &dims) {
        (Some(c), _) => Some(to_f64(&parse_ratio(c)?)),
        (None, Some(dims)) => Some(to_f64(&dims.c)),
        (None, None) => None,
    };
    let need = |what: &str| CliError::Usage(format!("--law {what} needs --c"));
    let law = match args.law {
        LawArg::Semicircle => LimitLaw::Semicircle,
        LawArg::ZLimit => LimitLaw::z_limit(law_c.ok_or_else(|| need("z_limit"))?)?,
        LawArg::Mp => LimitLaw::marchenko_pastur(law_c.ok_or_else(|| need("mp"))?)?,
    };
    let sorted = EmpiricalSpectrum::from_values(values)?;
    let ks = ks_distance_sorted(sorted.values(), &law)?;
    let n = sorted.len();

    let mut hist = Table::new(vec!["bin_center", "height"]);
    for bin in histogram_of(sorted.values(), args.bins)? {
        hist.push(vec![Cell::Float(bin.center), Cell::Float(bin.height)]);
    }
    let report = json!({ "law": law.name(), "c": law.parameter(), "n": n, "ks": ks, "seed": run.seed });
    let report_text = format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes"));
    print!("{report_text}");

    if let Some(dir) = &run.out {
        let mut out = OutputDir::create(dir)?;
        out.write(&format!("histogram.{}", extension(run.format)), &hist.render(run.format)?)?;
        out.write("ks.json", report_text.as_bytes())?;
        let mut p = dims.as_ref().map(dims_json).unwrap_or_else(|| json!({}));
        p["law"] = json!(law.name());
        p["law_parameter"] = json!(law.parameter());
        p["bins"] = json!(args.bins);
        p["input"] = json!(args.input.as_ref().map(|p| p.display().to_string()));
        p["sample"] = json!(args.sample);
        if dims.is_some() {
            p["case"] = json!(SwapCase::from(args.case).as_str());
        }
        out.finish(run.manifest("spectrum", p, dims.map(|d| d.s)))?;
    }
    Ok(())
}

pub fn ppt(run: &Run, args: &ScanArgs) -> Result<(), CliError> {
    if args.d < 2 {
        return Err(CliError::Usage("--d must be at least 2".into()));
    }
    if args.samples == 0 || args.s.iter().any(|s| s.is_zero()) {
        return Err(CliError::Usage("--samples and every --s value must be positive".into()));
    }
    let rows = ppt_scan(args.d, &args.s, args.samples, run.seed)?;
    let mut table = Table::new(vec!["d", "s", "samples", "ppt_fraction", "ci_halfwidth", "seed"]);
    for r in &rows {
        table.push(vec![
            Cell::Int(r.d as u64),
            Cell::Int(r.s as u64),
            Cell::Int(r.samples as u64),
            Cell::Float(r.ppt_fraction),
            Cell::Float(r.ci_halfwidth),
            Cell::Int(r.seed),
        ]);
    }
    let bytes = table.render(run.format)?;
    match &run.out {
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            out.write(&format!("ppt_scan.{}", extension(run.format)), &bytes)?;
            let p = json!({ "d": args.d, "s": args.s, "samples": args.samples });
            out.finish(run.manifest("ppt scan", p, None))
        }
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}
