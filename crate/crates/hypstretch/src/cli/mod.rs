//! Command-line front end. Every command writes to caller-supplied streams
//! and returns its exit code, so the binary is a one-line wrapper.

pub mod render;

use crate::stretch::{generalized_stretch, measurable_sublamination, verify, VerifyOptions};
use crate::surface::{classify, enumerate_candidates, evaluate, validate, CandidateKind, Scope, Surface};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use render::{render_svg, RenderOptions};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hypstretch", version, about = "Generalized stretch lines on hyperbolic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a surface file and print its block decomposition.
    Check { file: PathBuf },
    /// Write the stretched surface at time T.
    Stretch {
        file: PathBuf,
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lengths of the candidate curves and arcs up to the given word length.
    Lengths {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Lower bound for the distance from X to Y over the candidate set.
    Distance {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Restrict candidates to closed curves and boundary curves.
        #[arg(long)]
        curves_only: bool,
    },
    /// Run the invariant suite and print a JSON report.
    Verify {
        file: PathBuf,
        #[arg(long = "t", value_delimiter = ',', default_value = "0.25,0.5,1", allow_negative_numbers = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Draw the developed pieces as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        foliation: bool,
        #[arg(long)]
        clip: Option<f64>,
    },
}

/// `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let mag: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-5..=11).contains(&mag) {
        return sci;
    }
    let decimals = (11 - mag) as usize;
    format!("{x:.decimals$}")
}

enum Failure {
    Io(String),
    Invalid(String),
}

fn read(path: &Path) -> Result<(String, Surface), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let s = Surface::from_json(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    Ok((text, s))
}

fn require_valid(path: &Path, s: &Surface) -> Result<(), Failure> {
    let r = validate(s);
    if r.valid {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{} is invalid:\n  {}", path.display(), r.violations.join("\n  "))))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Check { file } => cmd_check(file, out),
        Command::Stretch { file, t, out: dest } => cmd_stretch(file, *t, dest, out, err),
        Command::Lengths { file, depth } => cmd_lengths(file, *depth, out),
        Command::Distance { x, y, depth, curves_only } => cmd_distance(x, y, *depth, *curves_only, out),
        Command::Verify { file, t, depth } => cmd_verify(file, t, *depth, out),
        Command::Render { file, out: dest, foliation, clip } => cmd_render(file, dest, *foliation, *clip, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Io(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_IO
        }
        Err(Failure::Invalid(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INVALID
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn cmd_check(file: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let (_, s) = read(file)?;
    let r = validate(&s);
    if !r.valid {
        writeln!(out, "invalid, {} violation(s)", r.violations.len()).map_err(io)?;
        for v in &r.violations {
            writeln!(out, "  - {v}").map_err(io)?;
        }
        return Ok(EXIT_INVALID);
    }
    let dec = classify(&s).map_err(|e| Failure::Invalid(e.to_string()))?;
    let blocks = if dec.is_whole_surface() {
        "B = whole surface".to_string()
    } else {
        format!("B = {} piece(s), {} crown(s), X_C = {} triangle(s)", dec.b_pieces.len(), dec.crowns.len(), dec.triangles.len())
    };
    writeln!(out, "valid, {} pieces, {blocks}", s.pieces.len()).map_err(io)?;
    for (k, c) in dec.crowns.iter().enumerate() {
        let quads: Vec<&str> = c.quads.iter().map(|&q| s.ids[q].as_str()).collect();
        writeln!(out, "  crown {k}: quads [{}], {} spike(s), core {}", quads.join(", "), c.spikes.len(), c.core.display(&s)).map_err(io)?;
    }
    if let Some(top) = &r.topology {
        for &(v, w) in &top.closed_leaves {
            writeln!(out, "  closed leaf: length {}", sig12(top.vertex_classes[v].length().max(top.vertex_classes[w].length()))).map_err(io)?;
        }
        for &g in &top.finite_leaves {
            let gl = &s.gluings[g];
            let len = s.finite_leaf_length(gl.from).unwrap_or(f64::NAN);
            writeln!(out, "  compact leaf {}.{}: length {}", s.ids[gl.from.0], gl.from.1, sig12(len)).map_err(io)?;
        }
        writeln!(out, "  cusps: {}", top.cusps().count()).map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_stretch(file: &Path, t: f64, dest: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Failure::Invalid(format!("stretch time must be a nonnegative number, got {t}")));
    }
    let (text, s) = read(file)?;
    require_valid(file, &s)?;
    if !measurable_sublamination(&s).unwrap_or(false) {
        let _ = writeln!(err, "warning: the lamination has no finite-length or closed leaf");
    }
    let mut y = generalized_stretch(&s, t).map_err(|e| Failure::Invalid(e.to_string()))?;
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    y.metadata = Some(serde_json::json!({ "source_sha256": hash, "t": t }));
    std::fs::write(dest, y.to_json() + "\n").map_err(|e| Failure::Io(format!("cannot write {}: {e}", dest.display())))?;
    writeln!(out, "wrote {} (t = {})", dest.display(), sig12(t)).map_err(io)?;
    Ok(EXIT_OK)
}

fn kind_name(k: CandidateKind) -> &'static str {
    match k {
        CandidateKind::Boundary => "boundary",
        CandidateKind::Curve => "curve",
        CandidateKind::Arc => "arc",
    }
}

fn cmd_lengths(file: &Path, depth: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let (_, s) = read(file)?;
    require_valid(file, &s)?;
    let cands = enumerate_candidates(&s, depth).map_err(|e| Failure::Invalid(e.to_string()))?;
    let lens: Vec<Option<f64>> = cands.par_iter().map(|c| evaluate(&s, c).ok()).collect();
    writeln!(out, "kind\tlength\tcandidate").map_err(io)?;
    for (c, l) in cands.iter().zip(&lens) {
        let l = l.map_or("undefined".to_string(), sig12);
        writeln!(out, "{}\t{l}\t{}", kind_name(c.kind), c.label).map_err(io)?;
    }
    writeln!(out, "{} candidate(s) at depth {depth}", cands.len()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_distance(x: &Path, y: &Path, depth: usize, curves_only: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let (_, sx) = read(x)?;
    let (_, sy) = read(y)?;
    require_valid(x, &sx)?;
    require_valid(y, &sy)?;
    if !sx.same_combinatorics(&sy) {
        return Err(Failure::Invalid("combinatorial mismatch: the surfaces do not share a gluing graph".into()));
    }
    let scope = if curves_only { Scope::CurvesOnly } else { Scope::All };
    let est = crate::surface::arc_distance_estimate(&sx, &sy, depth, scope).map_err(|e| Failure::Invalid(e.to_string()))?;
    let cands: Vec<_> = enumerate_candidates(&sx, depth)
        .map_err(|e| Failure::Invalid(e.to_string()))?
        .into_iter()
        .filter(|c| !curves_only || c.kind != CandidateKind::Arc)
        .collect();
    let rows: Vec<(Option<f64>, Option<f64>)> = cands.par_iter().map(|c| (evaluate(&sx, c).ok(), evaluate(&sy, c).ok())).collect();
    writeln!(out, "kind\tlength_X\tlength_Y\tlog_ratio\tcandidate").map_err(io)?;
    for (c, (a, b)) in cands.iter().zip(&rows) {
        let ratio = match (a, b) {
            (Some(a), Some(b)) if *a > 1e-9 && *b > 1e-9 => sig12((b / a).ln()),
            _ => "undefined".into(),
        };
        let f = |v: &Option<f64>| v.map_or("undefined".to_string(), sig12);
        writeln!(out, "{}\t{}\t{}\t{ratio}\t{}", kind_name(c.kind), f(a), f(b), c.label).map_err(io)?;
    }
    let witness = est.witness.as_ref().map_or("none".to_string(), |w| format!("{}{}", w.label, if w.leaf { " (leaf)" } else { "" }));
    writeln!(out, "max log ratio {} witness {witness}", sig12(est.value)).map_err(io)?;
    writeln!(out, "lower bound at depth {depth}: {}", sig12(est.value)).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_verify(file: &Path, grid: &[f64], depth: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    if grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Failure::Invalid("stretch times must be nonnegative numbers".into()));
    }
    let (_, s) = read(file)?;
    let report = verify(&s, &VerifyOptions { t_grid: grid.to_vec(), depth, ..Default::default() });
    writeln!(out, "{}", report.to_json()).map_err(io)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_render(file: &Path, dest: &Path, foliation: bool, clip: Option<f64>, out: &mut dyn Write) -> Result<i32, Failure> {
    if clip.is_some_and(|c| !(c > 0.0) || !c.is_finite()) {
        return Err(Failure::Invalid("clip height must be positive".into()));
    }
    let (_, s) = read(file)?;
    require_valid(file, &s)?;
    let svg = render_svg(&s, &RenderOptions { foliation, clip, ..Default::default() });
    std::fs::write(dest, svg).map_err(|e| Failure::Io(format!("cannot write {}: {e}", dest.display())))?;
    writeln!(out, "wrote {}", dest.display()).map_err(io)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.8), "0.800000000000");
        assert_eq!(sig12(-1.25), "-1.25000000000");
        assert_eq!(sig12(123.0), "123.000000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1e-12), "1.00000000000e-12");
        assert_eq!(sig12(0.9999999999999), "1.00000000000");
    }

    #[test]
    fn parse_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["hypstretch", "stretch", "x.json"], &mut o, &mut e), EXIT_INVALID);
        assert_eq!(run(["hypstretch", "--help"], &mut o, &mut e), EXIT_OK);
    }
}
