use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use hopfdeform_core::gs::tridegrees_up_to;
use hopfdeform_core::{
    bar_basis, cocycle_checks, d_squared_check, decide_triviality, example4_report, hga_relations_check, homology,
    loopspace_report, parse_cochain, parse_pins, parse_presentation, AlgebraPresentation, Check, DemoOutcome, Error,
    Evaluate, LoopOptions, Pipeline, RunReport, TransferState, Verdict,
};

/// Exact GF(2) engine for DG Hopf algebras, Gerstenhaber-Schack cohomology
/// and order-4 homotopy transfer.
#[derive(Parser)]
#[command(name = "hopfdeform", version)]
struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the DG (Hopf) algebra axioms of a presentation.
    Validate { presentation: PathBuf },
    /// Bar construction with its invariants.
    Bar {
        presentation: PathBuf,
        #[arg(long)]
        cap: i32,
        /// Write the homology Hopf algebra as a presentation.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write the bar complex with the perturbed product as a presentation.
        #[arg(long)]
        emit_bar: Option<PathBuf>,
    },
    /// Homology of the bar construction with representative cocycles.
    Homology {
        presentation: PathBuf,
        #[arg(long)]
        cap: i32,
    },
    /// Homotopy Gerstenhaber algebra relations of the cup-one family.
    HgaCheck {
        presentation: PathBuf,
        #[arg(long)]
        cap: i32,
    },
    /// D² = 0 on seeded random cochains.
    GsD2 {
        presentation: PathBuf,
        #[arg(long, default_value_t = 6)]
        window: i32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gerstenhaber-Schack 2-cocycle test.
    GsCocycle {
        presentation: PathBuf,
        cochain: PathBuf,
        /// Input degree bound; defaults to the presentation cap.
        #[arg(long)]
        window: Option<i32>,
    },
    /// Decide whether a cochain is a coboundary D(ψ).
    GsTrivial {
        presentation: PathBuf,
        cochain: PathBuf,
        #[arg(long)]
        window: Option<i32>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Order-4 transfer from the bar construction of a DGA to its homology.
    Transfer4 {
        presentation: PathBuf,
        #[arg(long)]
        cap: i32,
        #[arg(long)]
        pins: Option<PathBuf>,
        /// Write the transferred cochain and the homotopies here instead of
        /// printing them.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Built-in worked examples.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand)]
enum Demo {
    /// The trivial deformation.
    Example4 {
        #[arg(long, default_value_t = 8)]
        cap: i32,
        /// Replace ω^{2,2}(β₂⊗β₂) by α₁⊗α₂.
        #[arg(long)]
        corrupt: bool,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// The non-trivial loop-space deformation.
    Loopspace {
        #[arg(long, default_value_t = 8)]
        cap: i32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        pin_i: u8,
        /// Decide a given cochain instead of transferring.
        #[arg(long, requires = "omega")]
        skip_transfer: bool,
        #[arg(long, requires = "skip_transfer")]
        omega: Option<PathBuf>,
        #[arg(long, default_value = "loopspace-certificate.txt")]
        certificate: PathBuf,
        /// Write the transferred cochain, readable by --omega.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(report) => {
            let text = if cli.json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => s + "\n",
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
            } else {
                report.render()
            };
            // a closed pipe downstream is not an error of the run
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str, report: &mut RunReport) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    report.artifacts.push(path.display().to_string());
    Ok(())
}

/// Parse errors become usage failures; anything else lands in the report.
fn usage_error(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::UnknownName(_))
}

fn load_presentation(path: &Path) -> anyhow::Result<AlgebraPresentation> {
    parse_presentation(&read(path)?).with_context(|| path.display().to_string())
}

/// Runs `body`, turning parse errors into `Err` and other errors into an
/// aborted report.
fn guarded(
    command: String,
    body: impl FnOnce(&mut RunReport) -> hopfdeform_core::Result<()>,
) -> anyhow::Result<RunReport> {
    let mut report = RunReport::new(command);
    if let Err(e) = body(&mut report) {
        if usage_error(&e) {
            bail!(e);
        }
        report.abort("run", &e);
    }
    Ok(report)
}

fn run(command: &Command) -> anyhow::Result<RunReport> {
    match command {
        Command::Validate { presentation } => {
            let a = load_presentation(presentation)?;
            let mut report = RunReport::new(format!("validate {}", presentation.display()));
            report.line(format!("{} basis elements through degree {}", a.basis().len(), a.cap()));
            report.extend(a.validate_dgha());
            Ok(report)
        }
        Command::Bar { presentation, cap, emit, emit_bar } => {
            let a = load_presentation(presentation)?;
            let mut texts = (String::new(), String::new());
            let mut report = guarded(format!("bar {} --cap {cap}", presentation.display()), |r| {
                let bar = Arc::new(bar_basis(&a, *cap)?);
                let b = bar.basis();
                let words: Vec<usize> = (0..=*cap).map(|t| b.of_degree(t).len()).collect();
                r.line(format!("bar words by degree: {words:?}"));
                r.extend(bar.invariant_checks(*cap));
                let bar_host = bar.to_presentation(true)?;
                let h = homology(Arc::clone(&bar), &[])?;
                r.line(format!("homology dimensions: {:?}", h.dims()));
                texts = (h.to_presentation(&bar_host)?.emit(), bar_host.emit());
                Ok(())
            })?;
            for (path, text) in [(emit, &texts.0), (emit_bar, &texts.1)] {
                if let (Some(path), false) = (path, text.is_empty()) {
                    write(path, text, &mut report)?;
                }
            }
            Ok(report)
        }
        Command::Homology { presentation, cap } => {
            let a = load_presentation(presentation)?;
            guarded(format!("homology {} --cap {cap}", presentation.display()), |r| {
                let bar = Arc::new(bar_basis(&a, *cap)?);
                let h = homology(Arc::clone(&bar), &[])?;
                r.line(format!("dimensions: {:?}", h.dims()));
                let hb = h.basis();
                for i in 0..hb.len() as u32 {
                    r.line(format!("{} (degree {}): {}", hb.name(i), hb.degree(i), h.g().eval(&[i])?));
                }
                let host = h.to_presentation(&bar.to_presentation(true)?)?;
                r.extend(host.validate_dgha());
                Ok(())
            })
        }
        Command::HgaCheck { presentation, cap } => {
            let a = load_presentation(presentation)?;
            let mut report = RunReport::new(format!("hga-check {} --cap {cap}", presentation.display()));
            report.extend(hga_relations_check(&a, *cap));
            Ok(report)
        }
        Command::GsD2 { presentation, window, samples, seed } => {
            let host = load_presentation(presentation)?;
            let mut report = RunReport::new(format!(
                "gs-d2 {} --window {window} --samples {samples} --seed {seed}",
                presentation.display()
            ));
            report.line("tridegrees (p,m,n) with m + n ≤ 4 and p ∈ {-2,-1,0}");
            report.push(d_squared_check(&host, &tridegrees_up_to(4, -2..=0), *window, *samples, *seed));
            Ok(report)
        }
        Command::GsCocycle { presentation, cochain, window } => {
            let host = load_presentation(presentation)?;
            let text = read(cochain)?;
            guarded(format!("gs-cocycle {} {}", presentation.display(), cochain.display()), |r| {
                let omega = parse_cochain(&text, &host)?;
                r.extend(cocycle_checks(&host, &omega, window.unwrap_or(host.cap()))?);
                Ok(())
            })
        }
        Command::GsTrivial { presentation, cochain, window, certificate } => {
            let host = load_presentation(presentation)?;
            let text = read(cochain)?;
            let mut cert_text = None;
            let mut report = guarded(format!("gs-trivial {} {}", presentation.display(), cochain.display()), |r| {
                let omega = parse_cochain(&text, &host)?;
                let window = window.unwrap_or(host.cap());
                if omega.parts().keys().all(|&(_, m, n)| m + n == 4) {
                    r.extend(cocycle_checks(&host, &omega, window)?);
                }
                match decide_triviality(&host, &omega, window)? {
                    Verdict::Trivial(psi) => {
                        r.line("ψ:");
                        let rendered = psi.render();
                        r.line(if rendered.is_empty() { "0".to_string() } else { rendered.trim_end().to_string() });
                        r.push(Check::pass("cls = 0: TRIVIAL", ""));
                    }
                    Verdict::NonTrivial(cert) => {
                        let text = cert.render(host.basis());
                        r.push(Check::fail("cls = 0: TRIVIAL", "cls ≠ 0: NON-TRIVIAL"));
                        if certificate.is_none() {
                            r.line(text.trim_end().to_string());
                        }
                        cert_text = Some(text);
                    }
                    Verdict::Inconclusive(_, why) => r.push(Check::inconclusive("cls = 0: TRIVIAL", why)),
                }
                Ok(())
            })?;
            if let (Some(path), Some(text)) = (certificate, cert_text) {
                write(path, &text, &mut report)?;
            }
            Ok(report)
        }
        Command::Transfer4 { presentation, cap, pins, emit } => {
            let text = read(presentation)?;
            let pin_text = pins.as_deref().map(read).transpose()?;
            let mut emitted = String::new();
            let mut report = guarded(format!("transfer4 {} --cap {cap}", presentation.display()), |r| {
                let p = Pipeline::build(&text, *cap, &[])?;
                r.line(format!("homology dimensions: {:?}", p.homology.dims()));
                let pins = match &pin_text {
                    Some(t) => parse_pins(t, &p)?,
                    None => Vec::new(),
                };
                let mut state = TransferState::new(&p, pins, *cap)?;
                state.order3()?;
                state.order4()?;
                r.extend(state.relation_checks());
                let omega = state.omega_cochain()?;
                r.extend(cocycle_checks(&p.host, &omega, *cap)?);
                emitted = omega.render() + &state.render_homotopies();
                Ok(())
            })?;
            match emit {
                Some(path) => write(path, &emitted, &mut report)?,
                None => report.lines.extend(emitted.lines().map(str::to_string)),
            }
            Ok(report)
        }
        Command::Demo(Demo::Example4 { cap, corrupt, certificate }) => {
            let out = example4_report(*cap, *corrupt);
            finish_demo(out, certificate.as_deref())
        }
        Command::Demo(Demo::Loopspace { cap, pin_i, skip_transfer, omega, certificate, emit }) => {
            let omega = match (skip_transfer, omega) {
                (true, Some(path)) => Some(read(path)?),
                _ => None,
            };
            let out = loopspace_report(&LoopOptions { cap: *cap, pin_i: *pin_i, omega });
            let omega = out.omega.clone();
            let mut report = finish_demo(out, Some(certificate))?;
            if let (Some(path), Some(text)) = (emit, omega) {
                write(path, &text, &mut report)?;
            }
            Ok(report)
        }
    }
}

fn finish_demo(out: DemoOutcome, certificate: Option<&Path>) -> anyhow::Result<RunReport> {
    let mut report = out.report;
    if let (Some(path), Some(text)) = (certificate, &out.certificate) {
        write(path, text, &mut report)?;
    }
    Ok(report)
}
