//! Built-in example structures and seeded generators of admissible ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::almost_contact::AlmostContactData;
use crate::error::{Error, Result};
use crate::manifold::{ChartManifold, SamplingBox, EXACT_TOL, POLYNOMIAL_TOL};
use crate::metric_geometry::MetricField;
use crate::statistical::{difference_from_connection, DifferenceTensorField};
use crate::tensor_core::{coordinates, Coordinates, ScalarField};

/// Outcomes an entry is known to produce; `None` where no single value
/// applies (for instance λ varying over the chart).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpectedOutcomes {
    pub lambda: Option<f64>,
    /// 𝒦_φ on every φ-section at every point.
    pub k_phi: Option<f64>,
    pub cosymplectic: Option<bool>,
    pub phi_compatible: Option<bool>,
    /// Whether the nine vanishing conditions all hold (`Some(false)`: all fail).
    pub vanishing: Option<bool>,
    /// `(‖∇°_ξ ξ‖, ‖∇_ξ ξ‖)` at every point.
    pub geodesic: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub manifold: ChartManifold,
    pub expected: ExpectedOutcomes,
}

/// Generator families for [`generate_random_acs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `K = λ(x) η⊗η⊗ξ` with a random polynomial λ.
    TrivialLambda,
    /// One planar block `K(e,e) = a(−½e + ½φe)` with polynomial `a(x)`,
    /// optionally plus a λ term.
    PlanarBlock,
    /// Constant planar blocks of distinct magnitudes on every `(e_i, φe_i)`.
    Mixed,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::TrivialLambda, Family::PlanarBlock, Family::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Family::TrivialLambda => "trivial-lambda",
            Family::PlanarBlock => "planar-block",
            Family::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Coordinates `x1, y1, …, xn, yn, z`.
pub fn block_coordinates(n: usize) -> Vec<String> {
    let mut c = Vec::with_capacity(2 * n + 1);
    for i in 1..=n {
        c.push(format!("x{i}"));
        c.push(format!("y{i}"));
    }
    c.push("z".into());
    c
}

fn parse_all(texts: &[String], coords: &Coordinates) -> Result<Vec<ScalarField>> {
    texts
        .iter()
        .map(|t| ScalarField::parse(t, coords).map_err(Error::from))
        .collect()
}

fn zeros(len: usize) -> Vec<String> {
    vec!["0".to_string(); len]
}

fn identity_metric(d: usize) -> Vec<String> {
    let mut g = zeros(d * d);
    for i in 0..d {
        g[i * d + i] = "1".into();
    }
    g
}

/// φ∂x_i = ∂y_i, φ∂y_i = −∂x_i, φ∂z = 0, row-major `φ^i_j`.
fn standard_phi(n: usize) -> Vec<String> {
    let d = 2 * n + 1;
    let mut phi = zeros(d * d);
    for b in 0..n {
        let (x, y) = (2 * b, 2 * b + 1);
        phi[y * d + x] = "1".into();
        phi[x * d + y] = "-1".into();
    }
    phi
}

fn last_axis(d: usize) -> Vec<String> {
    let mut v = zeros(d);
    v[d - 1] = "1".into();
    v
}

/// Source of `K` in string form.
enum KTable {
    Components(Vec<String>),
    Connection(Vec<String>),
    CubicForm(Vec<String>),
}

struct Tables {
    name: String,
    coords: Vec<String>,
    metric: Vec<String>,
    phi: Vec<String>,
    xi: Vec<String>,
    k: KTable,
    sampling: SamplingBox,
    tolerance: f64,
}

impl Tables {
    fn flat(name: String, n: usize, k: KTable, tolerance: f64) -> Tables {
        let d = 2 * n + 1;
        Tables {
            name,
            coords: block_coordinates(n),
            metric: identity_metric(d),
            phi: standard_phi(n),
            xi: last_axis(d),
            k,
            sampling: SamplingBox::symmetric(d, 1.0),
            tolerance,
        }
    }

    fn build(self) -> Result<ChartManifold> {
        let d = self.coords.len();
        let coords = coordinates(&self.coords);
        let metric = MetricField::new(d, parse_all(&self.metric, &coords)?)?;
        let structure = AlmostContactData {
            phi: parse_all(&self.phi, &coords)?,
            xi: parse_all(&self.xi, &coords)?,
            eta: None,
        };
        let k = match &self.k {
            KTable::Components(t) => DifferenceTensorField::Components(parse_all(t, &coords)?),
            KTable::Connection(t) => difference_from_connection(
                parse_all(t, &coords)?,
                &metric,
                &self.sampling.grid(None),
            )?,
            KTable::CubicForm(t) => DifferenceTensorField::CubicForm(parse_all(t, &coords)?),
        };
        let m = ChartManifold {
            name: self.name,
            coords,
            sampling: self.sampling,
            metric,
            structure,
            k,
            tolerance: self.tolerance,
        };
        m.check_shape()?;
        Ok(m)
    }
}

fn idx(d: usize, i: usize, j: usize, k: usize) -> usize {
    (i * d + j) * d + k
}

/// Sets `t^i_jk` and `t^i_kj`.
fn set_sym(t: &mut [String], d: usize, i: usize, j: usize, k: usize, v: &str) {
    t[idx(d, i, j, k)] = v.to_string();
    t[idx(d, i, k, j)] = v.to_string();
}

/// `ℝ^{2n+1}` with the flat metric, the standard φ, `ξ = ∂z`, and the
/// connection whose only nonzero coefficient is `∇_ξ ξ = ξ`.
pub fn example_flat_acs(n: usize) -> Result<ZooEntry> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(1));
    }
    let d = 2 * n + 1;
    let mut gamma = zeros(d * d * d);
    gamma[idx(d, d - 1, d - 1, d - 1)] = "1".into();
    let name = if n == 1 {
        "zoo:example_flat_acs".to_string()
    } else {
        format!("zoo:example_flat_acs:{n}")
    };
    let manifold = Tables::flat(name.clone(), n, KTable::Connection(gamma), EXACT_TOL).build()?;
    Ok(ZooEntry {
        name,
        manifold,
        expected: ExpectedOutcomes {
            lambda: Some(1.0),
            k_phi: Some(0.0),
            cosymplectic: Some(true),
            phi_compatible: Some(true),
            vanishing: Some(true),
            geodesic: Some((0.0, 1.0)),
        },
    })
}

/// Writes the planar pattern with magnitude expression `a` on the block
/// `(x, y)`: `K(∂x,∂x) = −a/2 ∂x + a/2 ∂y`, `K(∂x,∂y) = a/2 ∂x + a/2 ∂y`,
/// `K(∂y,∂y) = a/2 ∂x − a/2 ∂y`.
fn planar_block(t: &mut [String], d: usize, x: usize, y: usize, a: &str) {
    let half = format!("0.5*({a})");
    let neg_half = format!("-0.5*({a})");
    set_sym(t, d, x, x, x, &neg_half);
    set_sym(t, d, y, x, x, &half);
    set_sym(t, d, x, x, y, &half);
    set_sym(t, d, y, x, y, &half);
    set_sym(t, d, x, y, y, &half);
    set_sym(t, d, y, y, y, &neg_half);
}

/// `ℝ³` with the flat metric and the connection
/// `∇_∂x ∂x = −½∂x + ½∂y`, `∇_∂x ∂y = ½∂x + ½∂y`, `∇_∂y ∂y = ½∂x − ½∂y`,
/// all other coefficients zero.
pub fn example_r3_negative() -> ZooEntry {
    let d = 3;
    let mut gamma = zeros(27);
    gamma[idx(d, 0, 0, 0)] = "-0.5".into();
    gamma[idx(d, 1, 0, 0)] = "0.5".into();
    for (i, v) in [(0, "0.5"), (1, "0.5")] {
        set_sym(&mut gamma, d, i, 0, 1, v);
    }
    gamma[idx(d, 0, 1, 1)] = "0.5".into();
    gamma[idx(d, 1, 1, 1)] = "-0.5".into();
    let name = "zoo:example_r3_negative".to_string();
    let mut t = Tables::flat(name.clone(), 1, KTable::Connection(gamma), EXACT_TOL);
    t.coords = vec!["x".into(), "y".into(), "z".into()];
    let manifold = t.build().expect("constant example tables are well formed");
    ZooEntry {
        name,
        manifold,
        expected: ExpectedOutcomes {
            lambda: Some(0.0),
            k_phi: Some(-1.0),
            cosymplectic: Some(true),
            phi_compatible: Some(false),
            vanishing: Some(false),
            geodesic: Some((0.0, 0.0)),
        },
    }
}

/// `S² × ℝ` in coordinates `(θ, ϕ, z)` with `g = dθ² + sin²θ dϕ² + dz²`,
/// the rotation φ of the sphere factor, `ξ = ∂z`, and a planar `K` of
/// magnitude `a` in the orthonormal frame `(∂θ, ∂ϕ/sin θ)`.
pub fn example_sphere_product(a: f64) -> ZooEntry {
    let d = 3;
    let coords = vec!["theta".to_string(), "varphi".to_string(), "z".to_string()];
    let mut metric = identity_metric(d);
    metric[d + 1] = "sin(theta)^2".into();
    let mut phi = zeros(9);
    phi[d] = "1/sin(theta)".into();
    phi[1] = "-sin(theta)".into();
    let mut k = zeros(27);
    let av = format!("{a:?}");
    let (t, p) = (0, 1);
    set_sym(&mut k, d, t, t, t, &format!("-0.5*{av}"));
    set_sym(&mut k, d, p, t, t, &format!("0.5*{av}/sin(theta)"));
    set_sym(&mut k, d, t, t, p, &format!("0.5*{av}*sin(theta)"));
    set_sym(&mut k, d, p, t, p, &format!("0.5*{av}"));
    set_sym(&mut k, d, t, p, p, &format!("0.5*{av}*sin(theta)^2"));
    set_sym(&mut k, d, p, p, p, &format!("-0.5*{av}*sin(theta)"));
    let name = format!("zoo:sphere_product:{av}");
    let manifold = Tables {
        name: name.clone(),
        coords,
        metric,
        phi,
        xi: last_axis(d),
        k: KTable::Components(k),
        sampling: SamplingBox {
            lo: vec![0.5, -1.0, -1.0],
            hi: vec![2.5, 1.0, 1.0],
            counts: None,
        },
        tolerance: EXACT_TOL,
    }
    .build()
    .expect("sphere product tables are well formed");
    let flat_k = a == 0.0;
    ZooEntry {
        name,
        manifold,
        expected: ExpectedOutcomes {
            lambda: Some(0.0),
            k_phi: Some(-a * a),
            cosymplectic: Some(true),
            phi_compatible: Some(flat_k),
            vanishing: Some(flat_k),
            geodesic: Some((0.0, 0.0)),
        },
    }
}

/// Flat `ℝ³` with an orthonormal frame twisting along z:
/// `e = ∂x`, `φe = cos z ∂y + sin z ∂z`, `ξ = −sin z ∂y + cos z ∂z`, and
/// `K = 0`. An almost contact metric structure that is not cosymplectic.
pub fn example_twisted_frame() -> ZooEntry {
    let mut phi = zeros(9);
    phi[1] = "-cos(z)".into();
    phi[2] = "-sin(z)".into();
    phi[3] = "cos(z)".into();
    phi[6] = "sin(z)".into();
    let name = "zoo:twisted_frame".to_string();
    let manifold = Tables {
        name: name.clone(),
        coords: vec!["x".into(), "y".into(), "z".into()],
        metric: identity_metric(3),
        phi,
        xi: vec!["0".into(), "-sin(z)".into(), "cos(z)".into()],
        k: KTable::Components(zeros(27)),
        sampling: SamplingBox::symmetric(3, 1.0),
        tolerance: EXACT_TOL,
    }
    .build()
    .expect("twisted frame tables are well formed");
    ZooEntry {
        name,
        manifold,
        expected: ExpectedOutcomes {
            lambda: Some(0.0),
            k_phi: Some(0.0),
            cosymplectic: Some(false),
            phi_compatible: Some(false),
            vanishing: Some(true),
            geodesic: None,
        },
    }
}

/// Coefficient in steps of 1e-3 within `[lo, hi]`, so expressions print
/// compactly and reparse exactly.
fn coef(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) * 1000.0).round() as i64;
    lo + rng.gen_range(0..=steps) as f64 / 1000.0
}

/// Random polynomial with a constant term and `terms` monomials of degree
/// one or two, coefficients in `[-1, 1]`.
fn random_poly(rng: &mut ChaCha8Rng, names: &[String], terms: usize) -> String {
    let mut s = format!("{:?}", coef(rng, -1.0, 1.0));
    for _ in 0..terms {
        let c = coef(rng, -1.0, 1.0);
        let a = &names[rng.gen_range(0..names.len())];
        let mono = if rng.gen_bool(0.5) {
            a.clone()
        } else {
            format!("{a}*{}", names[rng.gen_range(0..names.len())])
        };
        let sign = if c < 0.0 { '-' } else { '+' };
        s.push_str(&format!(" {sign} {:?}*{mono}", c.abs()));
    }
    s
}

fn check_odd(dim: usize) -> Result<usize> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok((dim - 1) / 2)
}

/// A structure from one of the three admissible families on flat
/// `ℝ^dim`, deterministic in `(dim, seed, family)`.
pub fn generate_random_acs(dim: usize, seed: u64, family: Family) -> Result<ZooEntry> {
    let n = check_odd(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dim as u64) << 32) ^ family as u64);
    let names = block_coordinates(n);
    let mut k = zeros(dim.pow(3));
    let z = dim - 1;
    let mut expected = ExpectedOutcomes {
        cosymplectic: Some(true),
        ..ExpectedOutcomes::default()
    };
    match family {
        Family::TrivialLambda => {
            k[idx(dim, z, z, z)] = random_poly(&mut rng, &names, 3);
            expected.k_phi = Some(0.0);
            expected.phi_compatible = Some(true);
            expected.vanishing = Some(true);
        }
        Family::PlanarBlock => {
            let b = rng.gen_range(0..n);
            let a0 = coef(&mut rng, 0.5, 2.0);
            let a = format!("{a0:?} + 0.1*({})", random_poly(&mut rng, &names, 2));
            planar_block(&mut k, dim, 2 * b, 2 * b + 1, &a);
            if rng.gen_bool(0.5) {
                k[idx(dim, z, z, z)] = random_poly(&mut rng, &names, 2);
            }
            expected.phi_compatible = Some(false);
            expected.vanishing = Some(false);
        }
        Family::Mixed => {
            for b in 0..n {
                let a = 0.5 + 0.6 * b as f64 + coef(&mut rng, 0.0, 0.4);
                planar_block(&mut k, dim, 2 * b, 2 * b + 1, &format!("{a:?}"));
            }
            if rng.gen_bool(0.5) {
                k[idx(dim, z, z, z)] = format!("{:?}", coef(&mut rng, -1.0, 1.0));
            }
            expected.phi_compatible = Some(false);
            expected.vanishing = Some(false);
        }
    }
    let name = format!("zoo:random:{dim}:{seed}:{}", family.name());
    let manifold = Tables::flat(name.clone(), n, KTable::Components(k), POLYNOMIAL_TOL).build()?;
    Ok(ZooEntry {
        name,
        manifold,
        expected,
    })
}

/// A single planar block of constant magnitude `a` on a seed-chosen block,
/// with a seed-chosen λ term. On `ℝ³` every φ-section gives `𝒦_φ = −a²`.
pub fn generate_planar_block(dim: usize, seed: u64, a: f64) -> Result<ZooEntry> {
    let n = check_odd(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = zeros(dim.pow(3));
    let b = rng.gen_range(0..n);
    planar_block(&mut k, dim, 2 * b, 2 * b + 1, &format!("{a:?}"));
    if rng.gen_bool(0.5) {
        let z = dim - 1;
        k[idx(dim, z, z, z)] = format!("{:?}", coef(&mut rng, -1.0, 1.0));
    }
    let name = format!("zoo:planar_block:{dim}:{seed}:{a:?}");
    let manifold = Tables::flat(name.clone(), n, KTable::Components(k), EXACT_TOL).build()?;
    Ok(ZooEntry {
        name,
        manifold,
        expected: ExpectedOutcomes {
            k_phi: (dim == 3).then_some(-a * a),
            cosymplectic: Some(true),
            phi_compatible: Some(a == 0.0),
            vanishing: Some(a == 0.0),
            ..ExpectedOutcomes::default()
        },
    })
}

/// A curved statistical chart: metric `I + ε S(x)` with random polynomial
/// `S` and, if `with_k`, `K = g⁻¹C` for a random totally symmetric
/// polynomial cubic form `C`. The almost contact fields are zero, so only
/// metric and statistical checks apply.
pub fn random_curved_statistical(dim: usize, seed: u64, with_k: bool) -> Result<ChartManifold> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let names: Vec<String> = (1..=dim).map(|i| format!("u{i}")).collect();
    // keeps the metric diagonally dominant on the unit box
    let eps = format!("{:?}", 0.2 / dim as f64);
    let mut metric = zeros(dim * dim);
    for i in 0..dim {
        for j in 0..=i {
            let p = random_poly(&mut rng, &names, 2);
            let e = if i == j {
                format!("1 + {eps}*({p})")
            } else {
                format!("{eps}*({p})")
            };
            metric[i * dim + j] = e.clone();
            metric[j * dim + i] = e;
        }
    }
    let mut c = zeros(dim.pow(3));
    if with_k {
        for i in 0..dim {
            for j in i..dim {
                for k in j..dim {
                    let p = format!("0.5*({})", random_poly(&mut rng, &names, 2));
                    for (a, b, cc) in [
                        (i, j, k),
                        (i, k, j),
                        (j, i, k),
                        (j, k, i),
                        (k, i, j),
                        (k, j, i),
                    ] {
                        c[idx(dim, a, b, cc)] = p.clone();
                    }
                }
            }
        }
    }
    Tables {
        name: format!("curved:{dim}:{seed}"),
        coords: names,
        metric,
        phi: zeros(dim * dim),
        xi: zeros(dim),
        k: KTable::CubicForm(c),
        sampling: SamplingBox::symmetric(dim, 1.0),
        tolerance: POLYNOMIAL_TOL,
    }
    .build_unchecked()
}

impl Tables {
    /// Like `build`, without the odd-dimension requirement.
    fn build_unchecked(self) -> Result<ChartManifold> {
        let d = self.coords.len();
        let coords = coordinates(&self.coords);
        let metric = MetricField::new(d, parse_all(&self.metric, &coords)?)?;
        let k = match &self.k {
            KTable::CubicForm(t) => DifferenceTensorField::CubicForm(parse_all(t, &coords)?),
            KTable::Components(t) => DifferenceTensorField::Components(parse_all(t, &coords)?),
            KTable::Connection(t) => DifferenceTensorField::Connection(parse_all(t, &coords)?),
        };
        Ok(ChartManifold {
            name: self.name,
            structure: AlmostContactData {
                phi: parse_all(&self.phi, &coords)?,
                xi: parse_all(&self.xi, &coords)?,
                eta: None,
            },
            coords,
            sampling: self.sampling,
            metric,
            k,
            tolerance: self.tolerance,
        })
    }
}

/// Names accepted by [`resolve`], with a one-line description each.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "zoo:example_flat_acs[:n]",
            "flat R^(2n+1), K(xi,xi) = xi; kphi = 0, lambda = 1",
        ),
        (
            "zoo:example_r3_negative",
            "flat R^3 with a planar K; kphi = -1",
        ),
        (
            "zoo:sphere_product[:a]",
            "S^2 x R with a planar K of magnitude a; kphi = -a^2",
        ),
        (
            "zoo:twisted_frame",
            "flat R^3 with a z-twisted frame, K = 0; not cosymplectic",
        ),
        (
            "zoo:random:<dim>:<seed>:<family>",
            "generated; family trivial-lambda | planar-block | mixed",
        ),
        (
            "zoo:planar_block:<dim>:<seed>:<a>",
            "generated single block of constant magnitude a",
        ),
    ]
}

/// Looks up a zoo entry by name.
pub fn resolve(name: &str) -> Result<ZooEntry> {
    let unknown = || Error::UnknownZooEntry(name.to_string());
    let rest = name.strip_prefix("zoo:").ok_or_else(unknown)?;
    let parts: Vec<&str> = rest.split(':').collect();
    let int = |s: &str| s.parse::<u64>().map_err(|_| unknown());
    let real = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(unknown)
    };
    match parts.as_slice() {
        ["example_flat_acs"] => example_flat_acs(1),
        ["example_flat_acs", n] => example_flat_acs(int(n)? as usize),
        ["example_r3_negative"] => Ok(example_r3_negative()),
        ["sphere_product"] => Ok(example_sphere_product(1.0)),
        ["sphere_product", a] => Ok(example_sphere_product(real(a)?)),
        ["twisted_frame"] => Ok(example_twisted_frame()),
        ["random", dim, seed, family] => {
            let f = Family::parse(family).ok_or_else(unknown)?;
            generate_random_acs(int(dim)? as usize, int(seed)?, f)
        }
        ["planar_block", dim, seed, a] => {
            generate_planar_block(int(dim)? as usize, int(seed)?, real(a)?)
        }
        _ => Err(unknown()),
    }
}
