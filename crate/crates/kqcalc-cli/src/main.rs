//! Command-line front end: compute coefficient tables, draw charts, verify
//! the shipped golden sets, and evaluate the exact arithmetic helpers.

use clap::{Parser, Subcommand, ValueEnum};
use kqcalc::coeffrings::{CoefficientProfile, ConjectureMode, CyclicityMode};
use kqcalc::ktables;
use kqcalc::ssengine;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kqcalc",
    about = "Exact tables for hermitian K-theory, algebraic K-theory and Witt theory \
             over the integers, finite fields, and user-profiled fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoryArg {
    Kq,
    Kgl,
    Kw,
    KqRational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PageArg {
    E1,
    E2,
    Einf,
    Abutment,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
    Svg,
    TextChart,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConjectureArg {
    Assume,
    Track,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a coefficient table or a spectral-sequence page.
    Compute {
        #[arg(long, default_value = "Z")]
        base: String,
        #[arg(long, value_enum, default_value = "kq")]
        theory: TheoryArg,
        /// Weights, repeatable or comma-separated.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
        weight: Vec<i64>,
        /// Inclusive column range, e.g. -8..24.
        #[arg(long, default_value = "-8..24", allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum, default_value = "abutment")]
        page: PageArg,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "assume")]
        conjectures: ConjectureArg,
        #[arg(long, value_enum, default_value = "assume")]
        cyclicity: ConjectureArg,
        /// Emit ambiguous or uncertified cells with markers instead of
        /// refusing.
        #[arg(long)]
        allow_partial: bool,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a page chart (svg or text-chart format).
    Chart {
        #[arg(long, default_value = "Z")]
        base: String,
        #[arg(long, value_enum, default_value = "kq")]
        theory: TheoryArg,
        #[arg(long, allow_hyphen_values = true)]
        weight: i64,
        #[arg(long, default_value = "-4..12", allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum, default_value = "e1")]
        page: PageArg,
        #[arg(long, value_enum, default_value = "svg")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a shipped golden set; exit 0 only if every cell matches.
    Verify {
        #[arg(long)]
        golden: String,
    },
    /// Exact Bernoulli number.
    Bernoulli { n: usize },
    /// Numerator/denominator pair of |B_w| / 2w for an even positive weight.
    Uv { w: i64 },
    /// Validate a field-profile JSON document.
    ProfileValidate { path: PathBuf },
}

fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let parts: Vec<&str> = text.split("..").collect();
    if parts.len() != 2 {
        return Err(format!("range must look like a..b, got `{}`", text));
    }
    let lo: i64 = parts[0].parse().map_err(|_| format!("bad range start `{}`", parts[0]))?;
    let hi: i64 = parts[1].parse().map_err(|_| format!("bad range end `{}`", parts[1]))?;
    if lo > hi {
        return Err(format!("empty range {}..{}", lo, hi));
    }
    Ok((lo, hi))
}

fn load_profile(base: &str) -> Result<CoefficientProfile, String> {
    if base == "Z" {
        return Ok(CoefficientProfile::integers());
    }
    if base == "R" {
        return Ok(CoefficientProfile::reals());
    }
    if let Some(q) = base.strip_prefix('F') {
        if let Ok(q) = q.parse::<u64>() {
            return CoefficientProfile::finite_field(q).map_err(|e| e.to_string());
        }
    }
    if base.ends_with(".json") || Path::new(base).exists() {
        let doc = fs::read_to_string(base).map_err(|e| format!("cannot read {}: {}", base, e))?;
        return CoefficientProfile::from_json(&doc).map_err(|e| e.to_string());
    }
    Err(format!("unknown base `{}`: use Z, R, F<q>, or a profile JSON path", base))
}

/// Writes output atomically: temporary file in the target directory, then
/// rename.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        None => {
            print!("{}", content);
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let tmp = match dir {
                Some(d) => d.join(format!(
                    ".{}.tmp",
                    path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
                )),
                None => PathBuf::from(format!(".{}.tmp", path.display())),
            };
            let mut f = fs::File::create(&tmp).map_err(|e| e.to_string())?;
            f.write_all(content.as_bytes()).map_err(|e| e.to_string())?;
            f.sync_all().ok();
            fs::rename(&tmp, path).map_err(|e| e.to_string())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Bernoulli { n } => {
            println!("B_{} = {}", n, kqcalc::arith::bernoulli(n));
            Ok(ExitCode::SUCCESS)
        }
        Command::Uv { w } => {
            let uv = kqcalc::arith::uv_of_weight(w).map_err(|e| e.to_string())?;
            println!("u({}) = {}", w, uv.u);
            println!("v({}) = {}", w, uv.v);
            Ok(ExitCode::SUCCESS)
        }
        Command::ProfileValidate { path } => {
            let doc = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            match CoefficientProfile::from_json(&doc) {
                Ok(p) => {
                    println!("profile `{}` is well-formed", p.name);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("invalid profile: {}", e);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Verify { golden } => {
            let sets: Vec<String> = if golden == "all" {
                ktables::golden_set_names().iter().map(|s| s.to_string()).collect()
            } else {
                vec![golden]
            };
            let mut failed = false;
            for set in sets {
                let report = ktables::golden_verify(&set).map_err(|e| e.to_string())?;
                let mismatches = report.mismatches();
                println!(
                    "{}: {} cells checked, {} mismatches",
                    report.set,
                    report.verdicts.len(),
                    mismatches.len()
                );
                for (key, v) in &mismatches {
                    println!("  {:?}: {:?}", key, v);
                    failed = true;
                }
            }
            Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Chart { base, theory, weight, range, page, format, out } => {
            if theory != TheoryArg::Kq {
                return Err("charts are drawn for the hermitian theory".into());
            }
            let profile = load_profile(&base)?;
            let s_range = parse_range(&range)?;
            let p1 =
                ssengine::build_page1(&profile, weight, s_range, None).map_err(|e| e.to_string())?;
            let p = match page {
                PageArg::E1 => p1,
                _ => ssengine::apply_first_differential(&p1).map_err(|e| e.to_string())?,
            };
            let content = match format {
                FormatArg::Svg => ssengine::chart_svg(&p),
                FormatArg::TextChart | FormatArg::Table => ssengine::chart_text(&p),
                FormatArg::Json => {
                    let report = ssengine::certify_collapse(&p);
                    format!("{}\n", ssengine::page_to_json(&p, Some(&report)))
                }
                FormatArg::Csv => return Err("chart emits svg, text-chart or json".into()),
            };
            emit(&out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compute {
            base,
            theory,
            weight,
            range,
            page,
            format,
            conjectures,
            cyclicity,
            allow_partial,
            out,
        } => {
            let mut profile = load_profile(&base)?;
            profile.conjecture_mode = match conjectures {
                ConjectureArg::Assume => ConjectureMode::AssumeVanishing,
                ConjectureArg::Track => ConjectureMode::TrackUnknown,
            };
            profile.cyclicity_mode = match cyclicity {
                ConjectureArg::Assume => CyclicityMode::AssumeCyclic,
                ConjectureArg::Track => CyclicityMode::TrackUncertain,
            };
            let s_range = parse_range(&range)?;
            match theory {
                TheoryArg::Kq => match page {
                    PageArg::Abutment | PageArg::Einf => {
                        let table = ktables::kq_table(&profile, s_range, &weight)
                            .map_err(|e| e.to_string())?;
                        if table.has_ambiguity() && !allow_partial {
                            let cell = table
                                .cells
                                .values()
                                .find(|c| c.ambiguous.is_some())
                                .expect("ambiguity present");
                            eprintln!(
                                "refusing to print an undetermined group at (s = {}, w = {}): \
                                 extension ladder {} is ambiguous; rerun with --allow-partial",
                                cell.s, cell.w, cell.text
                            );
                            return Ok(ExitCode::from(1));
                        }
                        let content = match format {
                            FormatArg::Table => table.to_text(),
                            FormatArg::Csv => table.to_csv(),
                            FormatArg::Json => format!("{}\n", table.to_json()),
                            _ => return Err("tables emit table, csv or json".into()),
                        };
                        emit(&out, &content)?;
                        Ok(ExitCode::SUCCESS)
                    }
                    PageArg::E1 | PageArg::E2 => {
                        let mut content = String::new();
                        for &w in &weight {
                            let p1 = ssengine::build_page1(&profile, w, s_range, None)
                                .map_err(|e| e.to_string())?;
                            let p = if page == PageArg::E1 {
                                p1
                            } else {
                                ssengine::apply_first_differential(&p1).map_err(|e| e.to_string())?
                            };
                            match format {
                                FormatArg::Table | FormatArg::TextChart => {
                                    content.push_str(&ssengine::chart_text(&p))
                                }
                                FormatArg::Svg => content.push_str(&ssengine::chart_svg(&p)),
                                FormatArg::Json => {
                                    let report = ssengine::certify_collapse(&p);
                                    content.push_str(&format!(
                                        "{}\n",
                                        ssengine::page_to_json(&p, Some(&report))
                                    ));
                                }
                                FormatArg::Csv => {
                                    return Err("pages emit table, svg or json".into())
                                }
                            }
                        }
                        emit(&out, &content)?;
                        Ok(ExitCode::SUCCESS)
                    }
                },
                TheoryArg::Kgl => {
                    if !profile.is_integers() {
                        return Err("the algebraic K-theory table is built in over Z".into());
                    }
                    let mut cells = std::collections::BTreeMap::new();
                    for &w in &weight {
                        for s in s_range.0..=s_range.1 {
                            let (g, markers, provenance) = ktables::kgl_groups_z(s - w);
                            cells.insert(
                                (s, w),
                                ktables::TableCell {
                                    s,
                                    w,
                                    value: Some(g.clone()),
                                    text: g.text(),
                                    markers,
                                    provenance,
                                    ambiguous: None,
                                },
                            );
                        }
                    }
                    let table = ktables::ResultTable {
                        base: profile.name.clone(),
                        theory: ktables::Theory::KGL,
                        cells,
                    };
                    let content = match format {
                        FormatArg::Table => table.to_text(),
                        FormatArg::Csv => table.to_csv(),
                        FormatArg::Json => format!("{}\n", table.to_json()),
                        _ => return Err("tables emit table, csv or json".into()),
                    };
                    emit(&out, &content)?;
                    Ok(ExitCode::SUCCESS)
                }
                TheoryArg::Kw => {
                    if !profile.is_integers() {
                        return Err("the Witt-theory table is built in over Z".into());
                    }
                    let mut cells = std::collections::BTreeMap::new();
                    for &w in &weight {
                        for s in s_range.0..=s_range.1 {
                            let g = ktables::kw_groups_z(s, w);
                            cells.insert(
                                (s, w),
                                ktables::TableCell {
                                    s,
                                    w,
                                    value: Some(g.clone()),
                                    text: g.text(),
                                    markers: Vec::new(),
                                    provenance: "four-periodic pattern".into(),
                                    ambiguous: None,
                                },
                            );
                        }
                    }
                    let table = ktables::ResultTable {
                        base: profile.name.clone(),
                        theory: ktables::Theory::KW,
                        cells,
                    };
                    let content = match format {
                        FormatArg::Table => table.to_text(),
                        FormatArg::Csv => table.to_csv(),
                        FormatArg::Json => format!("{}\n", table.to_json()),
                        _ => return Err("tables emit table, csv or json".into()),
                    };
                    emit(&out, &content)?;
                    Ok(ExitCode::SUCCESS)
                }
                TheoryArg::KqRational => {
                    let mut content = String::from("t,w,dimension\n");
                    for &w in &weight {
                        for t in s_range.0..=s_range.1 {
                            let (dim, _) =
                                ktables::kq_rational(&profile, t, w).map_err(|e| e.to_string())?;
                            content.push_str(&format!("{},{},{}\n", t, w, dim));
                        }
                    }
                    emit(&out, &content)?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}
