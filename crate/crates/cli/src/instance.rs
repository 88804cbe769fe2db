//! The JSON instance format: strict (unknown fields rejected), exact
//! (all rationals are `"p/q"` strings), versioned. Parsing produces
//! fully validated kernel objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use adjoint_kernel::affine::AffineSubspaceQ;
use adjoint_kernel::charsys::{CharacteristicSystem, DivLinMap, Piece};
use adjoint_kernel::cone::{Cone, ConeDecomposition};
use adjoint_kernel::dioph::DioCertificate;
use adjoint_kernel::divisor::{Divisor, Registry};
use adjoint_kernel::lifting::{ApproxPoint, LiftCertificate, LiftingInstance};
use adjoint_kernel::rat::{self, Rat, RatVec};
use adjoint_kernel::toric::ToricVariety;
use adjoint_kernel::{QuadExt, QuadVec};
use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variety: Option<VarietyDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub divisors: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting: Option<LiftingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chop: Option<ChopDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dio_certificate: Option<DioCertDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_certificate: Option<LiftCertDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyDoc {
    pub dim: usize,
    pub rays: Vec<RayDoc>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayDoc {
    pub name: String,
    pub coords: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    /// Generators of the parent grading cone, rational strings.
    pub cone: Vec<Vec<String>>,
    pub pieces: Vec<PieceDoc>,
    /// Name of the declared ample part in `divisors`.
    pub ample: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub cone: Vec<Vec<String>>,
    pub r: Vec<String>,
    pub rb: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftingDoc {
    pub s: String,
    pub ample: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    pub p: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsDoc {
    pub v: Vec<String>,
    pub ample: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChopDoc {
    pub boundary: Vec<String>,
    pub base: Vec<String>,
    pub ample: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DioCertDoc {
    pub d: u64,
    /// Coordinates of x as (rational, irrational) string pairs.
    pub x: Vec<[String; 2]>,
    pub subspace_base: Vec<String>,
    pub subspace_directions: Vec<Vec<String>>,
    pub points: Vec<Vec<String>>,
    pub weights: Vec<[String; 2]>,
    pub denominators: Vec<u64>,
    pub eps: String,
    pub modulus: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftCertDoc {
    pub d: u64,
    pub x: Vec<[String; 2]>,
    pub eps: String,
    pub delta: String,
    pub c_lipschitz: String,
    pub points: Vec<LiftPointDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftPointDoc {
    pub w: Vec<String>,
    /// Θ_i on the boundary star, by prime name.
    pub theta: BTreeMap<String, String>,
    pub mu: [String; 2],
    pub p: u32,
}

/// Exact rational from a `"p"`/`"p/q"` string, with field context in
/// the error.
pub fn prat(s: &str, ctx: &str) -> Result<Rat> {
    rat::parse_rat(s).map_err(|e| anyhow!("{ctx}: {e}"))
}

fn prat_vec(v: &[String], ctx: &str) -> Result<RatVec> {
    v.iter().enumerate().map(|(i, s)| prat(s, &format!("{ctx}[{i}]"))).collect()
}

pub fn parse_instance(path: &str) -> Result<InstanceDoc> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    parse_instance_str(&text).with_context(|| format!("parsing {path}"))
}

pub fn parse_instance_str(text: &str) -> Result<InstanceDoc> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        bail!("unsupported version {} (expected {FORMAT_VERSION})", doc.version);
    }
    Ok(doc)
}

impl InstanceDoc {
    pub fn variety(&self) -> Result<ToricVariety> {
        let v = self.variety.as_ref().ok_or_else(|| anyhow!("no variety block"))?;
        let rays = v
            .rays
            .iter()
            .map(|r| r.coords.iter().map(|&c| rat::Int::from(c)).collect())
            .collect();
        let names = v.rays.iter().map(|r| r.name.clone()).collect();
        Ok(ToricVariety::with_names(v.dim, rays, v.max_cones.clone(), Some(names))?)
    }

    pub fn divisor(&self, x: &ToricVariety, name: &str) -> Result<Divisor> {
        let map = self
            .divisors
            .get(name)
            .ok_or_else(|| anyhow!("divisor {name} is not defined"))?;
        let mut d = Divisor::zero(&x.registry);
        for (prime, coeff) in map {
            let id = x.ray_index(prime)?;
            d.set_coeff_id(id, prat(coeff, &format!("divisors.{name}.{prime}"))?);
        }
        Ok(d)
    }

    pub fn system(&self, x: &ToricVariety) -> Result<CharacteristicSystem> {
        let s = self.system.as_ref().ok_or_else(|| anyhow!("no system block"))?;
        let dim = s
            .cone
            .first()
            .map(|g| g.len())
            .ok_or_else(|| anyhow!("system.cone has no generators"))?;
        let parent = cone_from(&s.cone, dim, "system.cone")?;
        let mut cones = Vec::new();
        let mut pieces = Vec::new();
        for (i, p) in s.pieces.iter().enumerate() {
            let ctx = format!("system.pieces[{i}]");
            cones.push(cone_from(&p.cone, dim, &format!("{ctx}.cone"))?);
            let r = prat_vec(&p.r, &format!("{ctx}.r"))?;
            let mut rb = DivLinMap::zero(&x.registry, dim);
            for (prime, row) in &p.rb {
                let id = x.ray_index(prime)?;
                rb.set_row(id, prat_vec(row, &format!("{ctx}.rb.{prime}"))?);
            }
            pieces.push(Piece { r, rb });
        }
        let dec = ConeDecomposition::new(parent, cones)?;
        let a = self.divisor(x, &s.ample)?;
        Ok(CharacteristicSystem::new(
            x.registry.clone(),
            dec,
            pieces,
            x.canonical_divisor(),
            Some(a),
        )?)
    }

    pub fn lifting_instance(&self, x: &ToricVariety) -> Result<LiftingInstance> {
        let l = self.lifting.as_ref().ok_or_else(|| anyhow!("no lifting block"))?;
        let a = self.divisor(x, &l.ample)?;
        let b = match &l.boundary {
            Some(name) => self.divisor(x, name)?,
            None => Divisor::zero(&x.registry),
        };
        Ok(LiftingInstance::new(x, &l.s, &a, &b, l.p)?)
    }

    pub fn dio_certificate(&self) -> Result<DioCertificate> {
        let c = self
            .dio_certificate
            .as_ref()
            .ok_or_else(|| anyhow!("no dio_certificate block"))?;
        let x = quad_vec(c.d, &c.x, "dio_certificate.x")?;
        let subspace = AffineSubspaceQ {
            base_point: prat_vec(&c.subspace_base, "dio_certificate.subspace_base")?,
            direction_basis: c
                .subspace_directions
                .iter()
                .enumerate()
                .map(|(i, v)| prat_vec(v, &format!("dio_certificate.subspace_directions[{i}]")))
                .collect::<Result<_>>()?,
        };
        let points = c
            .points
            .iter()
            .enumerate()
            .map(|(i, v)| prat_vec(v, &format!("dio_certificate.points[{i}]")))
            .collect::<Result<_>>()?;
        let weights = c
            .weights
            .iter()
            .enumerate()
            .map(|(i, [a, b])| {
                let ctx = format!("dio_certificate.weights[{i}]");
                Ok(QuadExt::new(c.d, prat(a, &ctx)?, prat(b, &ctx)?)?)
            })
            .collect::<Result<_>>()?;
        Ok(DioCertificate {
            x,
            subspace,
            points,
            weights,
            denominators: c.denominators.clone(),
            eps: prat(&c.eps, "dio_certificate.eps")?,
            modulus: c.modulus,
        })
    }

    /// The Θ-certificate; divisors are built on the boundary-star
    /// registry of the given lifting instance.
    pub fn lift_certificate(&self, inst: &LiftingInstance) -> Result<LiftCertificate> {
        let c = self
            .lift_certificate
            .as_ref()
            .ok_or_else(|| anyhow!("no lift_certificate block"))?;
        let star = &inst.restriction().variety.registry;
        let x = quad_vec(c.d, &c.x, "lift_certificate.x")?;
        let mut points = Vec::new();
        for (i, p) in c.points.iter().enumerate() {
            let ctx = format!("lift_certificate.points[{i}]");
            let theta = divisor_from_map(star, &p.theta, &format!("{ctx}.theta"))?;
            let [ma, mb] = &p.mu;
            let mu = QuadExt::new(c.d, prat(ma, &ctx)?, prat(mb, &ctx)?)?;
            points.push(ApproxPoint { w: prat_vec(&p.w, &format!("{ctx}.w"))?, theta, mu, p: p.p });
        }
        Ok(LiftCertificate {
            x,
            points,
            eps: prat(&c.eps, "lift_certificate.eps")?,
            delta: prat(&c.delta, "lift_certificate.delta")?,
            c_lipschitz: prat(&c.c_lipschitz, "lift_certificate.c_lipschitz")?,
        })
    }
}

fn divisor_from_map(
    registry: &Arc<Registry>,
    map: &BTreeMap<String, String>,
    ctx: &str,
) -> Result<Divisor> {
    let mut d = Divisor::zero(registry);
    for (prime, coeff) in map {
        let id = registry.id_of(prime)?;
        d.set_coeff_id(id, prat(coeff, &format!("{ctx}.{prime}"))?);
    }
    Ok(d)
}

fn cone_from(gens: &[Vec<String>], dim: usize, ctx: &str) -> Result<Cone> {
    let g: Vec<RatVec> = gens
        .iter()
        .enumerate()
        .map(|(i, v)| prat_vec(v, &format!("{ctx}[{i}]")))
        .collect::<Result<_>>()?;
    Ok(Cone::from_generators(dim, &g)?)
}

fn quad_vec(d: u64, entries: &[[String; 2]], ctx: &str) -> Result<QuadVec> {
    let parsed: Vec<(Rat, Rat)> = entries
        .iter()
        .enumerate()
        .map(|(i, [a, b])| {
            let c = format!("{ctx}[{i}]");
            Ok((prat(a, &c)?, prat(b, &c)?))
        })
        .collect::<Result<_>>()?;
    Ok(QuadVec::new(d, parsed)?)
}

/// Serialization of a computed approximation certificate back into the
/// document format (the inverse of `dio_certificate`).
pub fn dio_certificate_doc(c: &DioCertificate) -> DioCertDoc {
    let fr = rat::format_rat;
    DioCertDoc {
        d: c.x.d,
        x: c.x
            .entries
            .iter()
            .map(|e| [fr(&e.a), fr(&e.b)])
            .collect(),
        subspace_base: c.subspace.base_point.iter().map(fr).collect(),
        subspace_directions: c
            .subspace
            .direction_basis
            .iter()
            .map(|v| v.iter().map(fr).collect())
            .collect(),
        points: c.points.iter().map(|v| v.iter().map(fr).collect()).collect(),
        weights: c.weights.iter().map(|w| [fr(&w.a), fr(&w.b)]).collect(),
        denominators: c.denominators.clone(),
        eps: fr(&c.eps),
        modulus: c.modulus,
    }
}
