use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use xfam_core::io::{parse_family, set_family_to_json, AnyFamily};
use xfam_core::search::suites::{desk_suite, DeskSeeds};
use xfam_core::search::{
    count_upsets, enumerate_upsets, verify_af, verify_daykin, verify_katona_single, verify_le3_reduction,
    verify_tm1, verify_tm2, verify_tm3, verify_tm4, verify_uniform_cross, Sampling, SearchConfig, SearchMode,
    VerificationReport,
};
use xfam_core::seqfam::Requirement;
use xfam_core::setfam::mask_of;
use xfam_core::shift::{shift_ab, stabilize_pair};
use xfam_core::{SetFamily, ShiftSpec};

use crate::{Cli, Command, ModeArg, Suite, Theorem, Threshold, VerifyParams};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: xfam_core::Error },
    #[error(transparent)]
    Core(#[from] xfam_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn read_family(path: &Path) -> Result<AnyFamily> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_family(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn read_sets(path: &Path) -> Result<SetFamily> {
    match read_family(path)? {
        AnyFamily::Sets(f) => Ok(f),
        AnyFamily::Seqs(_) => Err(CliError::Usage(format!(
            "{}: expected a set family, found a sequence family",
            path.display()
        ))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn requirement(th: &Threshold) -> Requirement {
    match (&th.tvec, th.t) {
        (Some(tv), _) => Requirement::PerSymbol(tv.clone()),
        (None, t) => Requirement::Total(t.unwrap_or(0)),
    }
}

fn set_threshold(th: &Threshold) -> Result<usize> {
    th.t.ok_or_else(|| CliError::Usage("set families take --t, not --tvec".into()))
}

fn check(cross: bool, th: &Threshold, files: &[PathBuf]) -> Result<bool> {
    let fams = files.iter().map(|p| read_family(p)).collect::<Result<Vec<_>>>()?;
    match (cross, fams.as_slice()) {
        (true, [a, b]) => match (a, b) {
            (AnyFamily::Sets(a), AnyFamily::Sets(b)) => Ok(a.is_cross_t_intersecting(b, set_threshold(th)?)?),
            (AnyFamily::Seqs(a), AnyFamily::Seqs(b)) => Ok(a.is_cross_intersecting(b, &requirement(th))?),
            _ => Err(CliError::Usage("cannot compare a set family with a sequence family".into())),
        },
        (false, [a]) => match a {
            AnyFamily::Sets(a) => Ok(a.is_t_intersecting(set_threshold(th)?)),
            AnyFamily::Seqs(a) => Ok(a.is_intersecting(&requirement(th))?),
        },
        (true, _) => Err(CliError::Usage("--cross needs exactly two families".into())),
        (false, _) => Err(CliError::Usage("give one family, or two with --cross".into())),
    }
}

fn need<T: Clone>(v: &Option<T>, name: &str, theorem: Theorem) -> Result<T> {
    v.clone()
        .ok_or_else(|| CliError::Usage(format!("verify {theorem:?} needs --{name}").to_lowercase()))
}

fn search_mode(p: &VerifyParams) -> Result<SearchMode> {
    match p.mode {
        ModeArg::Exhaustive => Ok(SearchMode::Exhaustive),
        ModeArg::Sampled => {
            let seed = p
                .seed
                .ok_or_else(|| CliError::Usage("sampled mode needs an explicit --seed".into()))?;
            Ok(SearchMode::Sampled(Sampling {
                trials: p.trials,
                seed,
            }))
        }
    }
}

fn exhaustive_only(p: &VerifyParams, theorem: Theorem) -> Result<()> {
    if p.mode == ModeArg::Sampled {
        return Err(CliError::Usage(format!("verify {theorem:?} has no sampled mode").to_lowercase()));
    }
    Ok(())
}

fn verify(theorem: Theorem, p: &VerifyParams, cfg: &SearchConfig) -> Result<VerificationReport> {
    let n = || need(&p.n, "n", theorem);
    let t = || need(&p.t, "t", theorem);
    let m = || need(&p.m, "m", theorem);
    let report = match theorem {
        Theorem::Tm1 => {
            exhaustive_only(p, theorem)?;
            verify_tm1(n()?, t()?, &need(&p.p1, "p1", theorem)?, &need(&p.p2, "p2", theorem)?, cfg)?
        }
        Theorem::Tm3 => {
            exhaustive_only(p, theorem)?;
            verify_tm3(n()?, t()?, &need(&p.p, "p", theorem)?, cfg)?
        }
        Theorem::Tm2 => verify_tm2(m()?, n()?, t()?, search_mode(p)?, cfg)?,
        Theorem::Tm4 => verify_tm4(m()?, n()?, &need(&p.tvec, "tvec", theorem)?, search_mode(p)?, cfg)?,
        Theorem::Af => {
            exhaustive_only(p, theorem)?;
            verify_af(m()?, n()?, t()?, cfg)?
        }
        Theorem::Katona => {
            exhaustive_only(p, theorem)?;
            verify_katona_single(n()?, t()?, cfg)?
        }
        Theorem::Le1 => verify_uniform_cross(
            n()?,
            need(&p.k, "k", theorem)?,
            need(&p.l, "l", theorem)?,
            t()?,
            search_mode(p)?,
            cfg,
        )?,
        Theorem::Le3 => {
            exhaustive_only(p, theorem)?;
            verify_le3_reduction(m()?, n()?, t()?, cfg)?
        }
        Theorem::Le8 => {
            exhaustive_only(p, theorem)?;
            verify_daykin(n()?, need(&p.a, "a", theorem)?, need(&p.b, "b", theorem)?, cfg)?
        }
    };
    Ok(report)
}

fn status(reports: &[VerificationReport]) -> ExitCode {
    if reports.iter().any(VerificationReport::is_violation) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_csv<W: Write>(out: W, reports: &[VerificationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VerificationReport::CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = SearchConfig::with_workers(cli.workers);
    let mut stdout = io::stdout().lock();
    match &cli.command {
        Command::Measure { family, p } => {
            let f = read_sets(family)?;
            writeln!(stdout, "{}", f.measure(p)?)?;
        }
        Command::Check { cross, threshold, files } => {
            writeln!(stdout, "{}", check(*cross, threshold, files)?)?;
        }
        Command::Dual { threshold, file } => {
            let text = match read_family(file)? {
                AnyFamily::Sets(f) => set_family_to_json(&f.t_dual(set_threshold(threshold)?)),
                AnyFamily::Seqs(f) => AnyFamily::Seqs(f.dual(&requirement(threshold))?).to_json(),
            };
            writeln!(stdout, "{text}")?;
        }
        Command::Shift { a, b, file } => {
            let f = read_sets(file)?;
            let spec = ShiftSpec::new(mask_of(f.n(), a)?, mask_of(f.n(), b)?)?;
            writeln!(stdout, "{}", set_family_to_json(&shift_ab(&f, &spec)?))?;
        }
        Command::Stabilize {
            t,
            first,
            second,
            trace,
            csv,
        } => {
            let (f1, f2) = (read_sets(first)?, read_sets(second)?);
            let (s1, s2, steps) = stabilize_pair(&f1, &f2, *t)?;
            writeln!(stdout, "[{},{}]", set_family_to_json(&s1), set_family_to_json(&s2))?;
            if let Some(path) = trace {
                write_file(path, &steps.to_json())?;
            }
            if let Some(path) = csv {
                let file = fs::File::create(path).map_err(|source| CliError::Write {
                    path: path.clone(),
                    source,
                })?;
                let mut w = csv::Writer::from_writer(file);
                w.write_record(["level", "A", "B", "potential"])?;
                for s in &steps.steps {
                    let join = |m: u32| {
                        xfam_core::setfam::elements_of(m)
                            .iter()
                            .map(|e| e.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    w.write_record([s.level.to_string(), join(s.a), join(s.b), s.potential.to_string()])?;
                }
                w.flush()?;
            }
        }
        Command::Enumerate { n, count } => {
            if *count {
                writeln!(stdout, "{}", count_upsets(*n)?)?;
            } else {
                for f in enumerate_upsets(*n)? {
                    writeln!(stdout, "{}", set_family_to_json(&f))?;
                }
            }
        }
        Command::Verify { theorem, params, out } => {
            let report = verify(*theorem, params, &cfg)?;
            let text = report.to_json();
            writeln!(stdout, "{text}")?;
            if let Some(path) = out {
                write_file(path, &text)?;
            }
            return Ok(status(std::slice::from_ref(&report)));
        }
        Command::Report { suite, out, json, seed } => {
            let Suite::Desk = suite;
            let seeds = seed.map(DeskSeeds::from_seed).unwrap_or_default();
            let reports = desk_suite(&cfg, seeds)?;
            match out {
                Some(path) => {
                    let file = fs::File::create(path).map_err(|source| CliError::Write {
                        path: path.clone(),
                        source,
                    })?;
                    write_csv(file, &reports)?;
                    let failed = reports.iter().filter(|r| r.is_violation()).count();
                    let open = reports.iter().filter(|r| !r.pass && !r.is_violation()).count();
                    writeln!(
                        stdout,
                        "{} reports, {} passed, {failed} violations, {open} open-regime misses",
                        reports.len(),
                        reports.iter().filter(|r| r.pass).count()
                    )?;
                }
                None => write_csv(&mut stdout, &reports)?,
            }
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
                write_file(path, &text)?;
            }
            return Ok(status(&reports));
        }
    }
    Ok(ExitCode::SUCCESS)
}
