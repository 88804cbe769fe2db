//! Command dispatch. Every report is deterministic: primes in
//! registry order, monomials and vertices sorted, rationals in the
//! canonical `"p/q"` rendering.

use adjoint_kernel::chop::{self, ChopInstance};
use adjoint_kernel::cone::Cone;
use adjoint_kernel::dioph;
use adjoint_kernel::divisor::Divisor;
use adjoint_kernel::hilbert::hilbert_basis;
use adjoint_kernel::lifting::{
    self, LiftMode, LiftingInstance,
};
use adjoint_kernel::rat::{self, IntVec, Rat, RatVec};
use adjoint_kernel::regions::adjoint_regions;
use adjoint_kernel::toric::{ToricVariety, DEFAULT_LADDER_MAX};
use adjoint_kernel::QuadVec;
use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use crate::instance::{self, InstanceDoc};
use crate::EXIT_MATH_FAIL;

#[derive(Parser, Debug)]
#[command(
    name = "adjoint-kernel",
    about = "Exact computations on toric adjoint rings: sections, base loci, \
             finite-generation certificates, lifting checks, approximation certificates"
)]
pub struct Cli {
    /// Seed for randomized property checks (reports stay byte-identical
    /// for a fixed seed).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hilbert basis of a pointed cone, e.g. --cone "1,0;1,2".
    Hilbert {
        #[arg(long)]
        cone: String,
    },
    /// Sections (lattice points of the divisor polytope).
    Sections {
        file: String,
        #[arg(long)]
        divisor: String,
    },
    /// Fixed and mobile part of a linear system.
    Fixmob {
        file: String,
        #[arg(long)]
        divisor: String,
    },
    /// Stable base locus.
    Sbl {
        file: String,
        #[arg(long)]
        divisor: String,
        /// Multiple ladder height.
        #[arg(long, default_value_t = DEFAULT_LADDER_MAX)]
        nmax: u32,
    },
    /// Asymptotic fixed part.
    Asymfix {
        file: String,
        #[arg(long)]
        divisor: String,
        #[arg(long, default_value_t = DEFAULT_LADDER_MAX)]
        nmax: u32,
    },
    /// Adjoint coefficient regions (log-canonical box, pseudo-effective
    /// region, bS=1 slices).
    Regions { file: String },
    /// Back-face chop of the instance cone into strictly dlt pieces.
    Chop { file: String },
    /// Total-degree bound with minimality witness.
    DegreeBound { file: String },
    /// Full finite-generation pipeline; prints the certificate.
    VerifyFg {
        file: String,
        /// Extra total degrees verified above the computed bound.
        #[arg(long, default_value_t = chop::VERIFY_MARGIN)]
        bound: u32,
    },
    /// Lifting checks on the instance's lifting block.
    LiftCheck {
        file: String,
        #[arg(long, value_enum, default_value_t = Mode::Simple)]
        mode: Mode,
        /// Tinkering parameter ε (mode tinker).
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = DEFAULT_LADDER_MAX)]
        nmax: u32,
    },
    /// Approximation certificate for a quadratic-field point; prints an
    /// instance document consumable by check-cert.
    Dioph {
        /// Squarefree d of ℚ(√d).
        #[arg(long, default_value_t = 2)]
        d: u64,
        /// Coordinates "a,b;a,b;…", each entry a + b√d.
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        modulus: u64,
    },
    /// Verify a certificate file (dio_certificate or lift_certificate).
    CheckCert { file: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Simple,
    Sharp,
    Tinker,
}

/// Runs a command; `Ok` carries the process exit code, `Err` is a
/// usage or parse failure (exit 1).
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Hilbert { cone } => cmd_hilbert(cone),
        Command::Sections { file, divisor } => {
            with_divisor(file, divisor, |x, d| match x.sections(&d) {
                Ok(s) => {
                    println!("dim {}", s.dim());
                    let mut ms = s.monomials.clone();
                    ms.sort();
                    for m in ms {
                        println!("{}", fmt_int_vec(&m));
                    }
                    0
                }
                Err(e) => fail(e),
            })
        }
        Command::Fixmob { file, divisor } => {
            with_divisor(file, divisor, |x, d| match x.fix_mob(&d) {
                Ok((fix, mob)) => {
                    println!("fix: {}", fmt_divisor(x, &fix));
                    println!("mob: {}", fmt_divisor(x, &mob));
                    0
                }
                Err(e) => fail(e),
            })
        }
        Command::Sbl { file, divisor, nmax } => {
            with_divisor(file, divisor, |x, d| {
                let r = x.stable_base_locus_with(&d, *nmax);
                if r.whole_x {
                    println!("all of X");
                } else if r.is_empty {
                    println!("empty");
                } else {
                    println!("components: {}", r.components.join(","));
                }
                if !r.stabilized {
                    println!("warning: ladder not stabilized at n = {nmax}");
                }
                0
            })
        }
        Command::Asymfix { file, divisor, nmax } => {
            with_divisor(file, divisor, |x, d| match x.asymptotic_fixed_with(&d, *nmax) {
                Ok(f) => {
                    println!("F: {}", fmt_divisor(x, &f));
                    0
                }
                Err(e) => fail(e),
            })
        }
        Command::Regions { file } => cmd_regions(file),
        Command::Chop { file } => cmd_chop(file, false),
        Command::DegreeBound { file } => cmd_chop(file, true),
        Command::VerifyFg { file, bound } => cmd_verify_fg(file, *bound),
        Command::LiftCheck { file, mode, eps, nmax } => cmd_lift_check(file, *mode, eps, *nmax),
        Command::Dioph { d, x, eps, modulus } => cmd_dioph(*d, x, eps, *modulus),
        Command::CheckCert { file } => cmd_check_cert(file),
    }
}

fn fail(e: impl std::fmt::Display) -> i32 {
    println!("FAIL: {e}");
    EXIT_MATH_FAIL
}

fn fmt_int_vec(v: &IntVec) -> String {
    let mut s = String::from("(");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&x.to_string());
    }
    s.push(')');
    s
}

/// `name=p/q` pairs in registry order; `0` for the zero divisor.
fn fmt_divisor(x: &ToricVariety, d: &Divisor) -> String {
    let mut parts = Vec::new();
    for id in 0..x.registry.len() {
        let c = d.coeff_id(id);
        if !c.is_zero() {
            parts.push(format!("{}={}", x.registry.name_of(id), rat::format_rat(&c)));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(",")
    }
}

fn fmt_points(points: &[RatVec]) -> String {
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.iter().map(|p| rat::format_vec(p)).collect::<Vec<_>>().join(" ")
}

fn with_divisor(
    file: &str,
    divisor: &str,
    body: impl FnOnce(&ToricVariety, Divisor) -> i32,
) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    let x = doc.variety()?;
    let d = doc.divisor(&x, divisor)?;
    Ok(body(&x, d))
}

fn cmd_hilbert(spec: &str) -> Result<i32> {
    let gens: Vec<RatVec> = spec
        .split(';')
        .map(|g| {
            g.split(',')
                .map(|t| instance::prat(t, "--cone"))
                .collect::<Result<RatVec>>()
        })
        .collect::<Result<_>>()?;
    let dim = gens.first().map(|g| g.len()).ok_or_else(|| anyhow!("--cone is empty"))?;
    let cone = Cone::from_generators(dim, &gens)?;
    match hilbert_basis(&cone) {
        Ok(mut basis) => {
            basis.sort();
            let line =
                basis.iter().map(fmt_int_vec).collect::<Vec<_>>().join(" ");
            println!("{line}");
            Ok(0)
        }
        Err(e) => Ok(fail(e)),
    }
}

fn cmd_regions(file: &str) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    let x = doc.variety()?;
    let rd = doc.regions.clone().ok_or_else(|| anyhow!("no regions block"))?;
    let a = doc.divisor(&x, &rd.ample)?;
    match adjoint_regions(&x, &rd.v, &a) {
        Ok(r) => {
            println!("L_V: {}", fmt_points(&r.l_v.vertices));
            println!("E_VA: {}", fmt_points(&r.e_va.vertices));
            for (s, region) in &r.b_s1 {
                println!("B^{{S=1}} S={s}: {}", fmt_points(&region.vertices));
            }
            Ok(0)
        }
        Err(e) => Ok(fail(e)),
    }
}

fn chop_instance(doc: &InstanceDoc, x: &ToricVariety) -> Result<ChopInstance> {
    let cd = doc.chop.clone().ok_or_else(|| anyhow!("no chop block"))?;
    let a = doc.divisor(x, &cd.ample)?;
    let base: RatVec = cd
        .base
        .iter()
        .enumerate()
        .map(|(i, s)| instance::prat(s, &format!("chop.base[{i}]")))
        .collect::<Result<_>>()?;
    Ok(ChopInstance::new(x, &a, &cd.boundary, &base)?)
}

fn cmd_chop(file: &str, with_bound: bool) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    let x = doc.variety()?;
    let inst = match chop_instance(&doc, &x) {
        Ok(i) => i,
        Err(e) => return Ok(fail(e)),
    };
    let result = match chop::chop_backfaces(&inst) {
        Ok(r) => r,
        Err(e) => return Ok(fail(e)),
    };
    if with_bound {
        let pieces: Vec<(Cone, usize)> =
            result.pieces.iter().map(|p| (p.cone.clone(), p.j)).collect();
        match chop::degree_bound(&inst.cone, &pieces) {
            Ok(db) => {
                println!("N = {}", db.n);
                match &db.witness {
                    Some(w) => println!("witness = {}", fmt_int_vec(w)),
                    None => println!("witness: none"),
                }
                Ok(0)
            }
            Err(e) => Ok(fail(e)),
        }
    } else {
        println!("pieces: {}", result.pieces.len());
        for (i, p) in result.pieces.iter().enumerate() {
            println!("piece {i}: strictly dlt with {}", p.strictly_dlt_with);
        }
        Ok(0)
    }
}

fn cmd_verify_fg(file: &str, margin: u32) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    let x = doc.variety()?;
    let sys = doc.system(&x)?;
    match chop::run_pipeline_with(&sys, &x, margin) {
        Ok(cert) => {
            for (i, inst) in cert.instances.iter().enumerate() {
                println!(
                    "instance {i}: boundary=[{}] base={} N={} verified_to={} generators={}",
                    inst.boundary.join(","),
                    rat::format_vec(&inst.base),
                    inst.degree_bound,
                    inst.verified_up_to,
                    inst.generators.elements.len()
                );
            }
            println!("PASS: finitely generated with {} generators", cert.generator_count());
            Ok(0)
        }
        Err(e) => Ok(fail(e)),
    }
}

fn cmd_lift_check(file: &str, mode: Mode, eps: &str, nmax: u32) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    let x = doc.variety()?;
    let inst = match doc.lifting_instance(&x) {
        Ok(i) => i,
        Err(e) => {
            // Constructor preconditions are mathematical checks.
            return match e.downcast_ref::<adjoint_kernel::KernelError>() {
                Some(k) => Ok(fail(k)),
                None => Err(e),
            };
        }
    };
    match mode {
        Mode::Simple => match lifting::simple_lifting_check(&inst) {
            Ok(r) if r.holds => {
                println!("simple: equality holds ({} member(s))", r.lhs.len());
                Ok(0)
            }
            Ok(_) => Ok(fail("simple: restricted systems differ")),
            Err(e) => Ok(fail(e)),
        },
        Mode::Sharp | Mode::Tinker => {
            let lift_mode = match mode {
                Mode::Sharp => LiftMode::Sharp,
                _ => LiftMode::Tinkering(instance::prat(eps, "--eps")?),
            };
            Ok(sharp_grid(&inst, &x, &lift_mode, nmax))
        }
    }
}

/// Runs the sharp/tinkering check on five Φ values spanning
/// [Ω∧𝐅_S, Ω]; grid points where pΦ is not integral are reported as
/// inadmissible and skipped.
fn sharp_grid(inst: &LiftingInstance, x: &ToricVariety, mode: &LiftMode, nmax: u32) -> i32 {
    let br = inst.restriction();
    let omega = inst.omega(br);
    let f_s = match br.restricted_asymptotic_fixed(x, &inst.kd(), nmax) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let phi_min = omega.wedge(&f_s);
    let gap = omega.sub(&phi_min);
    let p = Rat::from(rat::Int::from(inst.p));
    let mut all_hold = true;
    let mut admissible = 0usize;
    for k in 0..=4i64 {
        let t = rat::rat(k, 4);
        let phi = phi_min.add(&gap.scale(&t));
        let label = rat::format_rat(&t);
        let integral = phi
            .iter()
            .all(|(_, c)| (c * &p).is_integer());
        if !integral {
            println!("phi[{label}]: inadmissible (pΦ not integral)");
            continue;
        }
        admissible += 1;
        match lifting::sharp_lifting_check(inst, &phi, mode) {
            Ok(r) if r.holds => println!("phi[{label}]: inclusion holds"),
            Ok(_) => {
                println!("phi[{label}]: inclusion fails");
                all_hold = false;
            }
            Err(e) => {
                println!("phi[{label}]: FAIL: {e}");
                all_hold = false;
            }
        }
    }
    if admissible == 0 {
        return fail("no admissible Φ on the grid");
    }
    if all_hold {
        0
    } else {
        EXIT_MATH_FAIL
    }
}

fn cmd_dioph(d: u64, x_spec: &str, eps: &str, modulus: u64) -> Result<i32> {
    let entries: Vec<(Rat, Rat)> = x_spec
        .split(';')
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| anyhow!("--x entries are \"a,b\" pairs"))?;
            Ok((instance::prat(a, "--x")?, instance::prat(b, "--x")?))
        })
        .collect::<Result<_>>()?;
    let all_rational = entries.iter().all(|(_, b)| b.is_zero());
    let x = if all_rational {
        let coords: RatVec = entries.iter().map(|(a, _)| a.clone()).collect();
        QuadVec::from_rational(&coords)
    } else {
        QuadVec::new(d, entries)?
    };
    let eps = instance::prat(eps, "--eps")?;
    match dioph::approximate(&x, &eps, modulus) {
        Ok(cert) => {
            let doc = InstanceDoc {
                version: instance::FORMAT_VERSION,
                variety: None,
                divisors: Default::default(),
                system: None,
                lifting: None,
                regions: None,
                chop: None,
                dio_certificate: Some(instance::dio_certificate_doc(&cert)),
                lift_certificate: None,
            };
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            Ok(0)
        }
        Err(e) => Ok(fail(e)),
    }
}

fn cmd_check_cert(file: &str) -> Result<i32> {
    let doc = instance::parse_instance(file)?;
    if doc.dio_certificate.is_some() {
        let cert = doc.dio_certificate()?;
        let report = dioph::check_certificate(&cert);
        for f in &report.failed {
            println!("failed: {f}");
        }
        if report.pass {
            println!("PASS");
            return Ok(0);
        }
        println!("FAIL");
        return Ok(EXIT_MATH_FAIL);
    }
    if doc.lift_certificate.is_some() {
        let x = doc.variety()?;
        let sys = doc.system(&x)?;
        let inst = doc.lifting_instance(&x)?;
        let cert = doc.lift_certificate(&inst)?;
        return match lifting::verify_dio_certificate(&cert, &inst, &sys) {
            Ok(report) => {
                for f in &report.failed {
                    println!("failed: {f}");
                }
                if report.pass {
                    println!("PASS");
                    Ok(0)
                } else {
                    println!("FAIL");
                    Ok(EXIT_MATH_FAIL)
                }
            }
            Err(e) => Ok(fail(e)),
        };
    }
    bail!("the file contains no certificate block");
}
