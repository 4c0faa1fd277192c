//! `alcovekit` command-line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use alcovekit::acceptance::{self, DEFAULT_SEED};
use alcovekit::apartment::{is_d_generic, parahoric_pattern, Level};
use alcovekit::figures::{self, FigureKind, FigureSpec};
use alcovekit::galois_types::{self, c_fixes_frobenius, frobenius_invariant, type_from_s_mu, GaloisType, CENSUS_CAP};
use alcovekit::iwahori_weyl::{h_mu, IwahoriWeyl};
use alcovekit::lattice;
use alcovekit::loop_sim::{self, straighten, Ring, StraightenProblem};
use alcovekit::rootdata::{unitary_involution, GammaData, RootDatum};
use alcovekit::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "alcovekit", version, about = "Galois types, apartments, admissible sets and loop-group straightening")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Emit::Json, global = true)]
    emit: Emit,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Psi {
    /// Trivial Frobenius action.
    Identity,
    /// Cyclic shift of identical factors.
    Cyclic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inertia {
    Split,
    /// `(a,b,c) ↦ (-c,-b,-a)` on a single `GL_3`.
    Unitary,
}

#[derive(Args, Clone)]
struct GammaArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    e: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, value_enum, default_value_t = Psi::Identity)]
    psi: Psi,
    #[arg(long, value_enum, default_value_t = Inertia::Split)]
    inertia: Inertia,
}

impl GammaArgs {
    fn build(&self) -> Result<(RootDatum, GammaData)> {
        let rd: RootDatum = self.group.parse()?;
        let psi = match self.psi {
            Psi::Identity => lattice::identity(rd.rank),
            Psi::Cyclic => rd.cyclic_factor_shift()?,
        };
        let inertia = match self.inertia {
            Inertia::Split => lattice::identity(rd.rank),
            Inertia::Unitary => {
                if rd.label.to_string() != "GL3" {
                    return Err(Error::Invalid("unitary inertia is defined on GL3".into()));
                }
                unitary_involution(3)
            }
        };
        let g = GammaData::new(&rd, self.p, self.e, self.r, psi, inertia)?;
        Ok((rd, g))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate type classes and test each for Frobenius invariance.
    Census {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, default_value_t = CENSUS_CAP)]
        cap: u64,
    },
    /// Frobenius invariance of the type `u^λ·o` with `λ` fixed by Γ.
    Frobinv {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<i64>,
    },
    /// Type attached to `(s, μ)` for products of GL_n with `e = p^r - 1`, and its genericity.
    Generic {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        d: i64,
    },
    /// Admissible set Adm(μ) with reduced words.
    Adm {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu: Vec<i64>,
    },
    /// `h_μ = max_a ⟨a, μ⟩`.
    Hmu {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu: Vec<i64>,
    },
    /// Valuation pattern of the parahoric at `u^λ·o` for a single GL_n.
    Pattern {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<i64>,
        /// Level `f`, as an integer or `num/den`.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        level: String,
        /// Use the level just above `f`.
        #[arg(long)]
        plus: bool,
        #[arg(long, default_value_t = 0)]
        slot: usize,
    },
    /// Solve `A⁻¹Xφ(A) = BX` on random GL_n instances.
    Straighten {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long, default_value_t = 1)]
        f: i64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
        mu: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        instances: usize,
        /// Window `W`; defaults to ALCOVEKIT_PRECISION or `4p`.
        #[arg(long)]
        window: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Compare `v`- and `(v+p)`-adic filtrations over `Z/p^a`.
    Compare {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        n: i64,
    },
    /// Render an SVG figure.
    Figure {
        /// sl2, genericity or adm.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 7)]
        p: u64,
        #[arg(long, default_value_t = 24)]
        e: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0,0")]
        mu: Vec<i64>,
        /// Mark the example point on the genericity figure.
        #[arg(long)]
        example: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

enum Status {
    Ok,
    Refused,
    Error,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Refused => "refused",
            Status::Error => "error",
        }
    }
}

struct Outcome {
    status: Status,
    payload: Value,
    text: String,
}

impl Outcome {
    fn ok(payload: Value, text: String) -> Self {
        Outcome { status: Status::Ok, payload, text }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Census { .. } => "census",
        Command::Frobinv { .. } => "frobinv",
        Command::Generic { .. } => "generic",
        Command::Adm { .. } => "adm",
        Command::Hmu { .. } => "hmu",
        Command::Pattern { .. } => "pattern",
        Command::Straighten { .. } => "straighten",
        Command::Compare { .. } => "compare",
        Command::Figure { .. } => "figure",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let status = if matches!(e, Error::Refused(_)) { Status::Refused } else { Status::Error };
            Outcome { status, payload: json!({ "message": e.to_string() }), text: e.to_string() }
        }
    };
    match cli.emit {
        Emit::Json => {
            let doc = json!({ "schema": 1, "command": name, "status": outcome.status.as_str(), "payload": outcome.payload });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Emit::Text => {
            if matches!(outcome.status, Status::Ok) {
                print!("{}", outcome.text);
            } else {
                eprintln!("{}: {}", outcome.status.as_str(), outcome.text);
            }
        }
    }
    match outcome.status {
        Status::Ok => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Census { gamma, cap } => {
            let (rd, g) = gamma.build()?;
            let c = galois_types::census(&rd, &g, *cap)?;
            let mut text = format!("{} classes, {} Frobenius-invariant\n", c.total, c.invariant);
            for k in &c.classes {
                text += &format!("  {:?} orbit {} {}\n", k.representative, k.orbit_size, if k.invariant { "invariant" } else { "-" });
            }
            Ok(Outcome::ok(c.to_json(&rd), text))
        }
        Command::Frobinv { gamma, lambda } => {
            let (rd, g) = gamma.build()?;
            let t = GaloisType::from_fixed(&rd, &g, lambda)?;
            let w = frobenius_invariant(&rd, &g, &t)?;
            let text = match &w {
                Some(w) => format!("invariant: w = {}, m = {:?}\n", w.w.cycle_string(&rd), w.m),
                None => "not invariant\n".to_string(),
            };
            let payload = json!({ "lambda": lambda, "invariant": w.is_some(), "witness": w.map(|w| w.to_json(&rd)) });
            Ok(Outcome::ok(payload, text))
        }
        Command::Generic { group, p, r, s, mu, d } => {
            let rd: RootDatum = group.parse()?;
            let psi = if rd.components.len() > 1 { rd.cyclic_factor_shift()? } else { lattice::identity(rd.rank) };
            let e = p.checked_pow(*r).ok_or_else(|| Error::Invalid("p^r overflows".into()))? - 1;
            let g = GammaData::new(&rd, *p, e, *r, psi, lattice::identity(rd.rank))?;
            let sw = rd.weyl_from_cycles(s)?;
            let out = type_from_s_mu(&rd, &sw, mu, &g)?;
            let dq = BigRational::from_integer((*d).into());
            let generic = is_d_generic(&rd, &out.x, &dq);
            let fixes = c_fixes_frobenius(&out.c, &out.x);
            let payload = json!({
                "lambda": out.t.lambda,
                "w": out.t.w.iter().map(|w| w.cycle_string(&rd)).collect::<Vec<_>>(),
                "c": out.c.iter().map(|c| c.display(&rd)).collect::<Vec<_>>(),
                "x": out.x.to_json(),
                "c_phi_x_equals_x": fixes,
                "d": d,
                "d_generic": generic,
            });
            let mut text = String::new();
            for (j, (l, w)) in out.t.lambda.iter().zip(&out.t.w).enumerate() {
                text += &format!("lambda_{j} = {l:?}  w_{j} = {}  c_{j} = {}\n", w.cycle_string(&rd), out.c[j].display(&rd));
            }
            text += &format!("c·phi(x) = x: {fixes}\n{d}-generic: {generic}\n");
            Ok(Outcome::ok(payload, text))
        }
        Command::Adm { group, mu } => {
            let rd: RootDatum = group.parse()?;
            let iw = IwahoriWeyl::new(&rd)?;
            let adm = iw.admissible_set(mu)?;
            let mut text = format!("|Adm({mu:?})| = {}\n", adm.len());
            let mut elems = Vec::new();
            for (x, rw) in &adm {
                text += &format!("  {}  =  {}\n", x.display(&rd), iw.word_string(rw));
                elems.push(iw.element_json(x));
            }
            Ok(Outcome::ok(json!({ "mu": mu, "size": adm.len(), "elements": elems }), text))
        }
        Command::Hmu { group, mu } => {
            let rd: RootDatum = group.parse()?;
            if mu.len() != rd.rank {
                return Err(Error::Dimension(format!("mu has {} coordinates, rank is {}", mu.len(), rd.rank)));
            }
            let h = h_mu(&rd, mu);
            Ok(Outcome::ok(json!({ "mu": mu, "h_mu": h }), format!("{h}\n")))
        }
        Command::Pattern { gamma, lambda, level, plus, slot } => {
            let (rd, g) = gamma.build()?;
            let t = GaloisType::from_fixed(&rd, &g, lambda)?;
            let x = t.point(&rd, &g)?;
            let f = alcovekit::apartment::parse_q(level)?;
            let lvl = if *plus { Level::Plus(f) } else { Level::At(f) };
            let pat = parahoric_pattern(&rd, &x, &lvl, *slot)?;
            let lb: Vec<Vec<String>> = pat.lower_bounds.iter().map(|r| r.iter().map(|b| b.to_string()).collect()).collect();
            let vb = pat.v_bounds();
            let mut text = String::from("u-exponent lower bounds:\n");
            for row in &lb {
                text += &format!("  {}\n", row.join(" "));
            }
            text += &format!("torus level (v-exponent) {}\n", pat.torus_level);
            let payload = json!({ "u_bounds": lb, "v_bounds": vb, "torus_level": pat.torus_level.to_string(), "x": x.to_json() });
            Ok(Outcome::ok(payload, text))
        }
        Command::Straighten { p, a, f, mu, instances, window, seed } => {
            let ring = Ring::new(*p, *a)?;
            let window = match window {
                Some(w) => *w,
                None => loop_sim::window_from_env(*p)?,
            };
            let mut runs = Vec::new();
            let mut text = String::new();
            for i in 0..*instances {
                let mut rng = loop_sim::rng_for(*seed, i as u64);
                let prob = StraightenProblem::random(ring, mu, *f, &mut rng);
                let rep = straighten::straighten_right(&prob, window, None)?;
                text += &format!(
                    "instance {i}: delta {} iterations {}/{} trace {:?} residual {}\n",
                    rep.delta, rep.iterations, rep.max_iterations, rep.trace, rep.residual_ok
                );
                runs.push(rep.to_json());
            }
            Ok(Outcome::ok(json!({ "p": p, "a": a, "f": f, "mu": mu, "window": window, "runs": runs }), text))
        }
        Command::Compare { p, a, n } => {
            let r = loop_sim::congruence_compare(*p, *a, *n)?;
            let text = format!(
                "(v+p)^n in v^(n-a+1): {}\nv^n in (v+p)^(n-a+1): {}\n(v+p)^(p^(a-1)) = v^(p^(a-1)) mod p: {}\n",
                r.first_divides,
                r.remainder.iter().all(|&c| c == 0),
                r.frobenius_congruence
            );
            if !r.holds() {
                return Ok(Outcome { status: Status::Error, payload: r.to_json(), text });
            }
            Ok(Outcome::ok(r.to_json(), text))
        }
        Command::Figure { kind, p, e, mu, example, out } => {
            let kind: FigureKind = kind.parse()?;
            let spec = match kind {
                FigureKind::Rank1Line => FigureSpec::sl2(*p, *e),
                FigureKind::Rank2A2 if *example => FigureSpec::genericity_example()?,
                FigureKind::Rank2A2 => FigureSpec::genericity(*p, *e),
                FigureKind::AdmissibleA2 => FigureSpec::admissible(mu),
            };
            let svg = figures::render(&spec)?;
            match out {
                Some(path) => {
                    std::fs::write(path, &svg).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
                    let text = format!("wrote {} ({} bytes)\n", path.display(), svg.len());
                    Ok(Outcome::ok(json!({ "path": path, "bytes": svg.len() }), text))
                }
                None => Ok(Outcome::ok(json!({ "svg": svg }), svg)),
            }
        }
        Command::Verify { seed } => {
            let results = acceptance::run_all(*seed);
            let mut text = String::new();
            for r in &results {
                text += &format!("criterion {}: {} - {} ({})\n", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            let all = results.iter().all(|r| r.passed);
            let payload = json!({ "seed": seed, "passed": all, "criteria": results });
            if all {
                Ok(Outcome::ok(payload, text))
            } else {
                Ok(Outcome { status: Status::Error, payload, text })
            }
        }
    }
}
