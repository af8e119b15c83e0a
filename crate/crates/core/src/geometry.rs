//! A triangulated closed surface of genus `g`, a non-separating meridian
//! `C`, a piecewise-linear retraction `r: S_g -> C`, and the coincidence-free
//! family `f_i = R_i o r` obtained by rotating `C` through `i/(n+1)` turns.
//!
//! The surface is the regular `4g`-gon with edges glued by the word
//! `alpha_1 beta_1 alpha_1^-1 beta_1^-1 ...`, cut into `4g` sectors around
//! the center and each sector subdivided into `R^2` triangles. Angles are
//! measured in turns; values on `C` are kept as exact rationals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Turns = Ratio<i64>;

pub const MIN_RESOLUTION: u32 = 3;
/// Largest accepted residual of the discrete Laplace solve.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("genus must be at least 1")]
    Genus,
    #[error("resolution {got} is too coarse to keep the meridian simple; use at least {min}")]
    ResolutionTooCoarse { got: u32, min: u32 },
    #[error("mesh is not a closed oriented surface: {0}")]
    Mesh(String),
    #[error("meridian is not a simple non-separating cycle: {0}")]
    Meridian(String),
    #[error("retraction failed: {0}; try a higher resolution")]
    Retraction(String),
    #[error("need n >= 1")]
    Strands,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Where a point of the polygon chart sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKey {
    Center,
    /// On the segment from the center to corner `k`, `i` steps out.
    Radial(u32, u32),
    Corner(u32),
    /// On polygon edge `k` (from corner `k` to `k+1`), `p` steps along.
    Edge(u32, u32),
    Interior(u32, u32, u32),
}

#[derive(Debug, Clone)]
pub struct ChartPoint {
    pub key: ChartKey,
    pub pos: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct TriangulatedSurface {
    pub genus: u32,
    pub resolution: u32,
    pub vertex_count: usize,
    /// Oriented triangles as surface vertex ids.
    pub triangles: Vec<[usize; 3]>,
    /// The same triangles as chart point ids.
    pub chart_triangles: Vec<[usize; 3]>,
    pub chart_points: Vec<ChartPoint>,
    /// Surface vertex of each chart point.
    pub vertex_of: Vec<usize>,
}

impl TriangulatedSurface {
    /// Unoriented edges with the triangles on each side.
    pub fn edges(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        map
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Closedness, orientability and Euler characteristic.
    pub fn check(&self) -> Result<(), GeometryError> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(GeometryError::Mesh(format!("degenerate triangle {tri:?}")));
            }
            for k in 0..3 {
                *directed.entry((tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 || directed.get(&(b, a)) != Some(&1) {
                return Err(GeometryError::Mesh(format!(
                    "edge {a}-{b} is not shared by exactly two oppositely oriented triangles"
                )));
            }
        }
        let chi = self.euler_characteristic();
        let expect = 2 - 2 * self.genus as i64;
        if chi != expect {
            return Err(GeometryError::Mesh(format!(
                "Euler characteristic {chi}, expected {expect}"
            )));
        }
        Ok(())
    }

    fn corner_pos(g: u32, k: u32) -> [f64; 2] {
        if g == 1 {
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]][(k % 4) as usize]
        } else {
            let a = 2.0 * PI * k as f64 / (4 * g) as f64;
            [a.cos(), a.sin()]
        }
    }

    fn center_pos(g: u32) -> [f64; 2] {
        if g == 1 {
            [0.5, 0.5]
        } else {
            [0.0, 0.0]
        }
    }

    /// Surface vertex key of a chart key (applies the edge gluing).
    fn glue(key: ChartKey, resolution: u32) -> ChartKey {
        match key {
            ChartKey::Corner(_) => ChartKey::Corner(0),
            ChartKey::Edge(e, p) => match e % 4 {
                2 => ChartKey::Edge(e - 2, resolution - p),
                3 => ChartKey::Edge(e - 2, resolution - p),
                _ => key,
            },
            other => other,
        }
    }
}

/// Regular `4g`-gon (the unit square for `g = 1`) with sector subdivision.
pub fn triangulate(g: u32, resolution: u32) -> Result<TriangulatedSurface, GeometryError> {
    if g == 0 {
        return Err(GeometryError::Genus);
    }
    if resolution < MIN_RESOLUTION {
        return Err(GeometryError::ResolutionTooCoarse {
            got: resolution,
            min: MIN_RESOLUTION,
        });
    }
    let r = resolution;
    let sides = 4 * g;
    let center = TriangulatedSurface::center_pos(g);

    let mut chart_index: HashMap<ChartKey, usize> = HashMap::new();
    let mut chart_points = Vec::new();
    let mut vertex_index: HashMap<ChartKey, usize> = HashMap::new();
    let mut vertex_of = Vec::new();

    let key_of = |k: u32, i: u32, j: u32| -> ChartKey {
        let next = (k + 1) % sides;
        match (i, j) {
            (0, 0) => ChartKey::Center,
            (i, 0) if i == r => ChartKey::Corner(k),
            (i, 0) => ChartKey::Radial(k, i),
            (0, j) if j == r => ChartKey::Corner(next),
            (0, j) => ChartKey::Radial(next, j),
            (i, j) if i + j == r => ChartKey::Edge(k, j),
            (i, j) => ChartKey::Interior(k, i, j),
        }
    };

    let mut chart_triangles = Vec::new();
    for k in 0..sides {
        let p = TriangulatedSurface::corner_pos(g, k);
        let q = TriangulatedSurface::corner_pos(g, k + 1);
        let mut id = |i: u32, j: u32| -> usize {
            let key = key_of(k, i, j);
            *chart_index.entry(key).or_insert_with(|| {
                let (s, t) = (i as f64 / r as f64, j as f64 / r as f64);
                let pos = [
                    center[0] + s * (p[0] - center[0]) + t * (q[0] - center[0]),
                    center[1] + s * (p[1] - center[1]) + t * (q[1] - center[1]),
                ];
                chart_points.push(ChartPoint { key, pos });
                let glued = TriangulatedSurface::glue(key, r);
                let next = vertex_index.len();
                let v = *vertex_index.entry(glued).or_insert(next);
                vertex_of.push(v);
                chart_points.len() - 1
            })
        };
        for i in 0..r {
            for j in 0..r - i {
                chart_triangles.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                if i + j + 2 <= r {
                    chart_triangles.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
    }
    let triangles = chart_triangles
        .iter()
        .map(|t| [vertex_of[t[0]], vertex_of[t[1]], vertex_of[t[2]]])
        .collect();
    let s = TriangulatedSurface {
        genus: g,
        resolution,
        vertex_count: vertex_index.len(),
        triangles,
        chart_triangles,
        chart_points,
        vertex_of,
    };
    s.check()?;
    Ok(s)
}

/// The image of polygon edge `alpha_1`: `K = resolution` vertices starting
/// at the glued corner, with angle `k/K` turns at the `k`-th vertex.
#[derive(Debug, Clone)]
pub struct MeridianCycle {
    pub vertices: Vec<usize>,
    pub angles: Vec<Turns>,
}

impl MeridianCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.edges().contains(&(a.min(b), a.max(b)))
    }
}

pub fn meridian(s: &TriangulatedSurface) -> Result<MeridianCycle, GeometryError> {
    let r = s.resolution;
    let lookup: HashMap<ChartKey, usize> = s
        .chart_points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.key, s.vertex_of[i]))
        .collect();
    let mut vertices = vec![lookup[&ChartKey::Corner(0)]];
    for p in 1..r {
        vertices.push(lookup[&ChartKey::Edge(0, p)]);
    }
    let angles = (0..r as i64).map(|k| Turns::new(k, r as i64)).collect();
    let c = MeridianCycle { vertices, angles };

    let mut seen = std::collections::HashSet::new();
    if !c.vertices.iter().all(|v| seen.insert(*v)) {
        return Err(GeometryError::Meridian("repeated vertex".into()));
    }
    let edges = s.edges();
    for e in c.edges() {
        if !edges.contains_key(&e) {
            return Err(GeometryError::Meridian(format!("{e:?} is not a mesh edge")));
        }
    }
    if !vertex_graph_connected_without(s, &c) {
        return Err(GeometryError::Meridian(
            "removing C disconnects the 1-skeleton".into(),
        ));
    }
    if !dual_graph_connected_without(s, &c) {
        return Err(GeometryError::Meridian(
            "cutting along C separates the surface".into(),
        ));
    }
    Ok(c)
}

/// Connectivity of the vertex graph after deleting the edges of `c`.
pub fn vertex_graph_connected_without(s: &TriangulatedSurface, c: &MeridianCycle) -> bool {
    let mut uf = UnionFind::<usize>::new(s.vertex_count);
    let cut = c.edges();
    for &(a, b) in s.edges().keys() {
        if !cut.contains(&(a, b)) {
            uf.union(a, b);
        }
    }
    (0..s.vertex_count).all(|v| uf.equiv(0, v))
}

/// Connectivity of the triangles across edges not in `c`.
pub fn dual_graph_connected_without(s: &TriangulatedSurface, c: &MeridianCycle) -> bool {
    let mut uf = UnionFind::<usize>::new(s.triangles.len());
    let cut = c.edges();
    for (e, ts) in s.edges() {
        if !cut.contains(&e) {
            for w in ts.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    (0..s.triangles.len()).all(|t| uf.equiv(0, t))
}

/// An angle in turns, exact where the construction prescribes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Exact(Turns),
    Approx(f64),
}

impl Angle {
    pub fn to_f64(self) -> f64 {
        match self {
            Angle::Exact(q) => q.to_f64().expect("small rational"),
            Angle::Approx(x) => x,
        }
    }

    /// Representative in `[0, 1)`.
    pub fn reduced(self) -> Angle {
        match self {
            Angle::Exact(q) => Angle::Exact(q - q.floor()),
            Angle::Approx(x) => Angle::Approx(x - x.floor()),
        }
    }

    pub fn radians(self) -> f64 {
        2.0 * PI * self.reduced().to_f64()
    }

    fn add(self, q: Turns) -> Angle {
        match self {
            Angle::Exact(p) => Angle::Exact(p + q),
            Angle::Approx(x) => Angle::Approx(x + q.to_f64().unwrap()),
        }
    }
}

/// Circle-valued vertex map `theta` with a real lift on the polygon chart.
#[derive(Debug, Clone)]
pub struct RetractionMap {
    /// Lift of `theta` at every chart point, in turns.
    pub lift: Vec<Angle>,
    /// `theta` per surface vertex, reduced to `[0, 1)`.
    pub theta: Vec<Angle>,
    pub residual: f64,
}

impl RetractionMap {
    /// `theta` at a point given by triangle and barycentric coordinates.
    pub fn theta_at(&self, s: &TriangulatedSurface, tri: usize, bary: [Turns; 3]) -> Angle {
        let ct = s.chart_triangles[tri];
        let lifts = [self.lift[ct[0]], self.lift[ct[1]], self.lift[ct[2]]];
        let exact: Option<Vec<Turns>> = lifts
            .iter()
            .zip(&bary)
            .map(|(a, b)| match a {
                _ if b.is_zero() => Some(Turns::zero()),
                Angle::Exact(q) => Some(*q),
                Angle::Approx(_) => None,
            })
            .collect();
        let value = match exact {
            Some(q) => Angle::Exact(q.iter().zip(&bary).map(|(a, b)| a * b).sum()),
            None => Angle::Approx(
                lifts
                    .iter()
                    .zip(&bary)
                    .map(|(a, b)| a.to_f64() * b.to_f64().unwrap())
                    .sum(),
            ),
        };
        value.reduced()
    }

    /// Largest spread of lifted values over a triangle, in turns.
    pub fn max_triangle_spread(&self, s: &TriangulatedSurface) -> f64 {
        s.chart_triangles
            .iter()
            .map(|t| {
                let v: Vec<f64> = t.iter().map(|&i| self.lift[i].to_f64()).collect();
                let hi = v.iter().cloned().fold(f64::MIN, f64::max);
                let lo = v.iter().cloned().fold(f64::MAX, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

/// Prescribed lift on the polygon boundary: `alpha_1` runs once around `C`,
/// the lift jumps by one turn across `beta_1`, all other edges map to 0.
fn boundary_lift(key: ChartKey, r: u32, sides: u32) -> Option<Turns> {
    let on_edge = |e: u32, p: u32| -> Turns {
        let rr = r as i64;
        match e {
            0 => Turns::new(p as i64, rr),
            1 => Turns::from_integer(1),
            2 => Turns::new(rr - p as i64, rr),
            _ => Turns::zero(),
        }
    };
    match key {
        ChartKey::Edge(e, p) => Some(on_edge(e, p)),
        ChartKey::Corner(k) => Some(on_edge(k % sides, 0)),
        _ => None,
    }
}

fn cot(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    // cotangent of the angle at `a`
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [c[0] - a[0], c[1] - a[1]];
    let dot = u[0] * v[0] + u[1] * v[1];
    let cross = (u[0] * v[1] - u[1] * v[0]).abs();
    dot / cross
}

/// Harmonic lift (cotangent weights) with `C` and the polygon boundary as
/// hard Dirichlet data.
pub fn build_retraction(
    s: &TriangulatedSurface,
    c: &MeridianCycle,
) -> Result<RetractionMap, GeometryError> {
    let r = s.resolution;
    let sides = 4 * s.genus;
    let fixed: Vec<Option<Turns>> = s
        .chart_points
        .iter()
        .map(|p| boundary_lift(p.key, r, sides))
        .collect();
    let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
    let mut slot = vec![usize::MAX; fixed.len()];
    for (k, &i) in free.iter().enumerate() {
        slot[i] = k;
    }
    let nf = free.len();
    let mut lap = DMatrix::<f64>::zeros(nf, nf);
    let mut rhs = DVector::<f64>::zeros(nf);
    for t in &s.chart_triangles {
        let pos = |i: usize| s.chart_points[t[i]].pos;
        for k in 0..3 {
            let (a, b, o) = (t[(k + 1) % 3], t[(k + 2) % 3], k);
            let w = 0.5 * cot(pos(o), pos((k + 1) % 3), pos((k + 2) % 3));
            for (x, y) in [(a, b), (b, a)] {
                if slot[x] == usize::MAX {
                    continue;
                }
                lap[(slot[x], slot[x])] += w;
                match fixed[y] {
                    Some(q) => rhs[slot[x]] += w * q.to_f64().unwrap(),
                    None => lap[(slot[x], slot[y])] -= w,
                }
            }
        }
    }
    let sol = lap
        .clone()
        .cholesky()
        .ok_or_else(|| GeometryError::Retraction("Laplacian is not positive definite".into()))?
        .solve(&rhs);
    let residual = (&lap * &sol - &rhs).amax();
    if residual.is_nan() || residual > SOLVE_RESIDUAL_TOL {
        return Err(GeometryError::Retraction(format!("residual {residual:e}")));
    }
    let lift: Vec<Angle> = (0..fixed.len())
        .map(|i| match fixed[i] {
            Some(q) => Angle::Exact(q),
            None => Angle::Approx(sol[slot[i]]),
        })
        .collect();

    let mut theta: Vec<Option<Angle>> = vec![None; s.vertex_count];
    for (i, a) in lift.iter().enumerate() {
        let v = s.vertex_of[i];
        let a = a.reduced();
        match theta[v] {
            None => theta[v] = Some(a),
            Some(prev) if prev != a => {
                return Err(GeometryError::Retraction(format!(
                    "vertex {v} receives inconsistent angles {prev:?} and {a:?}"
                )))
            }
            Some(_) => {}
        }
    }
    let theta: Vec<Angle> = theta
        .into_iter()
        .map(|a| a.expect("every vertex charted"))
        .collect();
    for (k, &v) in c.vertices.iter().enumerate() {
        if theta[v] != Angle::Exact(c.angles[k]) {
            return Err(GeometryError::Retraction(format!(
                "C vertex {v} is not fixed"
            )));
        }
    }
    let map = RetractionMap {
        lift,
        theta,
        residual,
    };
    if map.max_triangle_spread(s) >= 0.5 {
        return Err(GeometryError::Retraction(
            "a triangle spans half a turn or more".into(),
        ));
    }
    Ok(map)
}

/// Signed sum of the lifted increments of `theta` once around `C`.
pub fn winding_along(c: &MeridianCycle, r: &RetractionMap) -> Option<Turns> {
    let k = c.len();
    let mut total = Turns::zero();
    for i in 0..k {
        let (Angle::Exact(a), Angle::Exact(b)) =
            (r.theta[c.vertices[i]], r.theta[c.vertices[(i + 1) % k]])
        else {
            return None;
        };
        let mut d = b - a;
        // branch with |d| < 1/2
        while d >= Turns::new(1, 2) {
            d -= 1;
        }
        while d < Turns::new(-1, 2) {
            d += 1;
        }
        total += d;
    }
    Some(total)
}

/// `f_i = R_i o r` for `i = 1..n`, with `R_i` the rotation of `C` by
/// `i/(n+1)` turns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionMaps {
    pub n: u32,
    pub offsets: Vec<Turns>,
}

impl SectionMaps {
    /// Angles on `C` of `f_1(x), ..., f_n(x)` for `theta = r(x)`.
    pub fn images(&self, theta: Angle) -> Vec<Angle> {
        self.offsets
            .iter()
            .map(|&q| theta.add(q).reduced())
            .collect()
    }
}

pub fn section_maps(_r: &RetractionMap, n: u32) -> Result<SectionMaps, GeometryError> {
    if n == 0 {
        return Err(GeometryError::Strands);
    }
    let slots = n as i64 + 1;
    Ok(SectionMaps {
        n,
        offsets: (1..slots).map(|i| Turns::new(i, slots)).collect(),
    })
}

/// A point of the surface: triangle id and barycentric coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplePoint {
    pub triangle: usize,
    pub bary: [Turns; 3],
    /// The sample is a point of `C`.
    pub on_cycle: bool,
}

/// Every vertex (once) and every edge midpoint (once).
pub fn mesh_samples(s: &TriangulatedSurface, c: &MeridianCycle) -> Vec<SamplePoint> {
    let one = Turns::from_integer(1);
    let half = Turns::new(1, 2);
    let zero = Turns::zero();
    let mut out = Vec::new();
    let mut seen_v = vec![false; s.vertex_count];
    let mut seen_e = std::collections::HashSet::new();
    let on_c: Vec<bool> = {
        let mut v = vec![false; s.vertex_count];
        for &x in &c.vertices {
            v[x] = true;
        }
        v
    };
    for (t, tri) in s.triangles.iter().enumerate() {
        for k in 0..3 {
            let v = tri[k];
            if !seen_v[v] {
                seen_v[v] = true;
                let mut bary = [zero; 3];
                bary[k] = one;
                out.push(SamplePoint {
                    triangle: t,
                    bary,
                    on_cycle: on_c[v],
                });
            }
            let w = tri[(k + 1) % 3];
            if seen_e.insert((v.min(w), v.max(w))) {
                let mut bary = [zero; 3];
                bary[k] = half;
                bary[(k + 1) % 3] = half;
                out.push(SamplePoint {
                    triangle: t,
                    bary,
                    on_cycle: c.contains_edge(v, w),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub samples: usize,
    /// `r o i = id` at every cycle vertex and cycle-edge midpoint, exactly.
    pub retraction_exact: bool,
    /// Lifted values on each triangle span less than half a turn.
    pub branch_condition: bool,
    /// Winding of `theta` along `C` in turns (must be 1).
    pub winding: String,
    pub image_in_cycle: bool,
    pub no_fixed_points_on_cycle: bool,
    pub no_fixed_points_off_cycle: bool,
    pub pairwise_distinct: bool,
    /// `min_{i != j} |i - j| / (n+1)` over slots `0..=n`, as a fraction of a turn.
    pub min_separation_turns: String,
    pub min_separation: f64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.retraction_exact
            && self.branch_condition
            && self.winding == "1"
            && self.image_in_cycle
            && self.no_fixed_points_on_cycle
            && self.no_fixed_points_off_cycle
            && self.pairwise_distinct
            && self.failures.is_empty()
    }
}

/// Exact minimum circular distance between the `n+1` slot offsets.
pub fn min_separation(maps: &SectionMaps) -> Turns {
    let mut all = vec![Turns::zero()];
    all.extend(maps.offsets.iter().copied());
    let mut best = Turns::from_integer(1);
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let d = (all[i] - all[j]).abs();
            let d = d.min(Turns::from_integer(1) - d);
            best = best.min(d);
        }
    }
    best
}

/// Checks the premises of coincidence-freeness exactly and the conclusion
/// at every sample point.
pub fn verify_sections(
    s: &TriangulatedSurface,
    c: &MeridianCycle,
    r: &RetractionMap,
    maps: &SectionMaps,
) -> VerificationReport {
    let mut failures = Vec::new();
    let samples = mesh_samples(s, c);

    let mut retraction_exact = true;
    for (k, &v) in c.vertices.iter().enumerate() {
        if r.theta[v] != Angle::Exact(c.angles[k]) {
            retraction_exact = false;
            failures.push(format!("theta moves cycle vertex {v}"));
        }
    }
    let kk = c.len() as i64;
    for sp in samples
        .iter()
        .filter(|sp| sp.on_cycle && sp.bary.contains(&Turns::new(1, 2)))
    {
        let tri = s.triangles[sp.triangle];
        let ends: Vec<usize> = (0..3)
            .filter(|&i| !sp.bary[i].is_zero())
            .map(|i| tri[i])
            .collect();
        let (i, j) = (
            c.position(ends[0]).unwrap() as i64,
            c.position(ends[1]).unwrap() as i64,
        );
        let lo = if (i - j).abs() == 1 {
            i.min(j)
        } else {
            i.max(j)
        };
        let expect = Turns::new(2 * lo + 1, 2 * kk);
        if r.theta_at(s, sp.triangle, sp.bary) != Angle::Exact(expect) {
            retraction_exact = false;
            failures.push(format!("theta is not the identity on cycle edge {ends:?}"));
        }
    }

    let branch_condition = r.max_triangle_spread(s) < 0.5;
    if !branch_condition {
        failures.push("branch condition violated".into());
    }
    let winding = winding_along(c, r)
        .map(|w| w.to_string())
        .unwrap_or_else(|| "inexact".into());

    let (mut image_in_cycle, mut fixed_on, mut fixed_off, mut distinct) = (true, true, true, true);
    for sp in &samples {
        let theta = r.theta_at(s, sp.triangle, sp.bary);
        let images = maps.images(theta);
        // images are points of C parametrized by angle; they lie on C by
        // construction, so the check is that each angle is a valid parameter
        if images.iter().any(|a| !(0.0..1.0).contains(&a.to_f64())) {
            image_in_cycle = false;
        }
        if sp.on_cycle {
            let Angle::Exact(q) = theta else {
                fixed_on = false;
                failures.push(format!("inexact angle on C at {sp:?}"));
                continue;
            };
            for img in &images {
                if *img == Angle::Exact(q) {
                    fixed_on = false;
                    failures.push(format!("f_i fixes {sp:?}"));
                }
            }
        } else if images.is_empty() {
            fixed_off = false;
        }
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                let same = match (images[i], images[j]) {
                    (Angle::Exact(a), Angle::Exact(b)) => a == b,
                    (a, b) => {
                        let d = (a.to_f64() - b.to_f64()).abs();
                        d.min(1.0 - d) < 1e-12
                    }
                };
                if same {
                    distinct = false;
                    failures.push(format!("f_{} and f_{} agree at {sp:?}", i + 1, j + 1));
                }
            }
        }
    }
    let sep = min_separation(maps);
    VerificationReport {
        samples: samples.len(),
        retraction_exact,
        branch_condition,
        winding,
        image_in_cycle,
        no_fixed_points_on_cycle: fixed_on,
        no_fixed_points_off_cycle: fixed_off,
        pairwise_distinct: distinct,
        min_separation_turns: sep.to_string(),
        min_separation: 2.0 * PI * sep.to_f64().unwrap(),
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// `[triangle id, [b0, b1, b2]]`
    pub point: (usize, [f64; 3]),
    pub theta: f64,
    pub images: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionData {
    pub g: u32,
    pub n: u32,
    pub resolution: u32,
    pub cycle: Vec<usize>,
    pub samples: Vec<SampleRecord>,
}

/// Plot-ready record of `theta` and the image angles (radians).
pub fn section_data(
    s: &TriangulatedSurface,
    c: &MeridianCycle,
    r: &RetractionMap,
    maps: &SectionMaps,
    samples: &[SamplePoint],
) -> SectionData {
    let records = samples
        .iter()
        .map(|sp| {
            let theta = r.theta_at(s, sp.triangle, sp.bary);
            SampleRecord {
                point: (sp.triangle, sp.bary.map(|b| b.to_f64().unwrap())),
                theta: theta.radians(),
                images: maps.images(theta).iter().map(|a| a.radians()).collect(),
            }
        })
        .collect();
    SectionData {
        g: s.genus,
        n: maps.n,
        resolution: s.resolution,
        cycle: c.vertices.clone(),
        samples: records,
    }
}

pub fn export_section_data(
    s: &TriangulatedSurface,
    c: &MeridianCycle,
    r: &RetractionMap,
    maps: &SectionMaps,
    samples: &[SamplePoint],
    path: &Path,
) -> Result<SectionData, GeometryError> {
    let data = section_data(s, c, r, maps, samples);
    fs::write(path, serde_json::to_vec_pretty(&data)?)?;
    Ok(data)
}
