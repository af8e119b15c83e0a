use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use surfbraid::geometry;
use surfbraid::kernel_action::abelianize;
use surfbraid::presentations::{self, build, GroupKind, Params};
use surfbraid::section_solver::{obstruction, verify_ansatz, Verification};
use surfbraid::words::Word;

#[derive(Parser)]
#[command(
    name = "surfbraid",
    version,
    about = "Presentations and splitting obstructions for surface mixed braid groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Closed,
    Punctured,
    Mixed,
    MixedQuotient,
    KernelAb,
}

impl From<Group> for GroupKind {
    fn from(g: Group) -> Self {
        match g {
            Group::Closed => GroupKind::Closed,
            Group::Punctured => GroupKind::Punctured,
            Group::Mixed => GroupKind::Mixed,
            Group::MixedQuotient => GroupKind::MixedQuotient,
            Group::KernelAb => GroupKind::KernelAb,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum OutFormat {
    Json,
    #[default]
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print a presentation.
    Present {
        #[arg(long, value_enum)]
        group: Group,
        #[arg(long)]
        g: u32,
        /// number of strands in the fibre (ignored for `closed`)
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant factors of a group's abelianization, or the kernel exponent
    /// vector of a word in sigma, a, b, z.
    Abelianize {
        #[arg(long, value_enum, default_value = "punctured")]
        group: Group,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
    },
    /// Admissible strand counts for a section of the forgetful map.
    Obstruct {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, conflicts_with = "n_max")]
        n: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Check a candidate section against every constraint row.
    Verify {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: i64,
        /// JSON array of exponents, or an `obstruct` report
        #[arg(long)]
        witness: PathBuf,
    },
    /// Build and check the explicit sections for one fixed point.
    SectionDemo {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        resolution: u32,
        #[arg(long, value_enum, default_value_t)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn positive(name: &str, v: u32) -> Result<()> {
    if v == 0 {
        bail!("{name} = 0 is out of range (must be >= 1)");
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn present(
    group: Group,
    g: u32,
    n: Option<u32>,
    m: u32,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<u8> {
    let kind = GroupKind::from(group);
    let n = match (kind, n) {
        (GroupKind::Closed, _) => 0,
        (_, Some(n)) => n,
        (_, None) => bail!("--n is required for group `{}`", kind.name()),
    };
    let p = build(kind, Params { g, n, m })?;
    let fmt = match format {
        OutFormat::Json => presentations::Format::Json,
        OutFormat::Text => presentations::Format::Text,
    };
    let bytes = presentations::serialize(&p, fmt);
    emit(std::str::from_utf8(&bytes)?, out)?;
    Ok(0)
}

fn abelianize_cmd(
    group: Group,
    g: u32,
    n: u32,
    m: u32,
    word: Option<&str>,
    format: OutFormat,
) -> Result<u8> {
    for (name, v) in [("g", g), ("n", n), ("m", m)] {
        positive(name, v)?;
    }
    if let Some(w) = word {
        let w: Word = w.parse()?;
        let v = abelianize(&w, g, n, m)?;
        match format {
            OutFormat::Json => emit(&pretty(&serde_json::to_value(&v)?), None)?,
            OutFormat::Text => emit(&format!("{v}\n"), None)?,
        }
        return Ok(0);
    }
    let p = build(group.into(), Params { g, n, m })?;
    let f = presentations::abelianization(&p);
    let torsion: Vec<String> = f.torsion.iter().map(|t| t.to_string()).collect();
    match format {
        OutFormat::Json => emit(
            &pretty(&json!({
                "free_rank": f.free_rank,
                "torsion": torsion.iter().map(|t| serde_json::from_str::<Value>(t)).collect::<Result<Vec<_>, _>>()?,
            })),
            None,
        )?,
        OutFormat::Text => emit(
            &format!(
                "free rank {}\ntorsion [{}]\n",
                f.free_rank,
                torsion.join(", ")
            ),
            None,
        )?,
    }
    Ok(0)
}

fn obstruct(g: u32, m: u32, n: Option<u64>, n_max: Option<u64>) -> Result<u8> {
    positive("g", g)?;
    positive("m", m)?;
    let report = obstruction(g, m)?;
    if let Some(n) = n {
        if n == 0 {
            bail!("n = 0 is out of range (must be >= 1)");
        }
        return Ok(if report.parameter_set.contains(&BigInt::from(n)) {
            emit("admissible\n", None)?;
            0
        } else {
            emit("obstructed\n", None)?;
            1
        });
    }
    if let Some(k) = n_max {
        let list: Vec<u64> = (1..=k)
            .filter(|&n| report.parameter_set.contains(&BigInt::from(n)))
            .collect();
        emit(
            &pretty(
                &json!({ "g": g, "m": m, "modulus": report.to_json()["modulus"], "admissible": list }),
            ),
            None,
        )?;
        return Ok(0);
    }
    emit(&pretty(&report.to_json()), None)?;
    Ok(0)
}

fn read_witness(path: &Path) -> Result<Vec<BigInt>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let arr = match &v {
        Value::Array(a) => a,
        Value::Object(o) => match o.get("witness") {
            Some(Value::Array(a)) => a,
            _ => bail!("{}: no `witness` array", path.display()),
        },
        _ => bail!(
            "{}: expected an array or an object with `witness`",
            path.display()
        ),
    };
    arr.iter()
        .map(|x| match x {
            Value::Number(num) => num
                .as_i64()
                .map(BigInt::from)
                .context("non-integer exponent"),
            Value::String(s) => s.parse::<BigInt>().context("bad integer string"),
            _ => bail!("exponents must be integers"),
        })
        .collect()
}

fn verify(g: u32, m: u32, n: i64, witness: &Path) -> Result<u8> {
    positive("g", g)?;
    positive("m", m)?;
    let x = read_witness(witness)?;
    match verify_ansatz(g, m, &BigInt::from(n), &x)? {
        Verification::Pass => {
            emit("pass\n", None)?;
            Ok(0)
        }
        Verification::Violated(rows) => {
            let mut s = format!("fail: {} violated rows\n", rows.len());
            for r in rows {
                s.push_str(&format!("{r}\n"));
            }
            emit(&s, None)?;
            Ok(1)
        }
    }
}

fn section_demo(
    g: u32,
    n: u32,
    resolution: u32,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<u8> {
    positive("g", g)?;
    positive("n", n)?;
    let s = geometry::triangulate(g, resolution)?;
    let c = geometry::meridian(&s)?;
    let r = geometry::build_retraction(&s, &c)?;
    let maps = geometry::section_maps(&r, n)?;
    let report = geometry::verify_sections(&s, &c, &r, &maps);
    if let Some(path) = out {
        let samples = geometry::mesh_samples(&s, &c);
        geometry::export_section_data(&s, &c, &r, &maps, &samples, path)?;
    }
    match format {
        OutFormat::Json => emit(&pretty(&serde_json::to_value(&report)?), None)?,
        OutFormat::Text => {
            let mut t = format!(
                "surface g={g} resolution={resolution} vertices={} triangles={}\n",
                s.vertex_count,
                s.triangles.len()
            );
            t.push_str(&format!("cycle length {}\n", c.len()));
            t.push_str(&format!("samples {}\n", report.samples));
            t.push_str(&format!("retraction exact {}\n", report.retraction_exact));
            t.push_str(&format!("branch condition {}\n", report.branch_condition));
            t.push_str(&format!("winding {}\n", report.winding));
            t.push_str(&format!("pairwise distinct {}\n", report.pairwise_distinct));
            t.push_str(&format!(
                "min separation {} turn ({:.12} rad)\n",
                report.min_separation_turns, report.min_separation
            ));
            for f in &report.failures {
                t.push_str(&format!("failure: {f}\n"));
            }
            t.push_str(if report.passed() {
                "verified\n"
            } else {
                "FAILED\n"
            });
            emit(&t, None)?;
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Present {
            group,
            g,
            n,
            m,
            format,
            out,
        } => present(group, g, n, m, format, out.as_deref()),
        Command::Abelianize {
            group,
            g,
            n,
            m,
            word,
            format,
        } => abelianize_cmd(group, g, n, m, word.as_deref(), format),
        Command::Obstruct { g, m, n, n_max } => obstruct(g, m, n, n_max),
        Command::Verify { g, m, n, witness } => verify(g, m, n, &witness),
        Command::SectionDemo {
            g,
            n,
            resolution,
            format,
            out,
        } => section_demo(g, n, resolution, format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
