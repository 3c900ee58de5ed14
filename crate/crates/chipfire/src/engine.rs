//! Chip-firing for a signed graph via the pair of reduced Laplacians.
//!
//! The pair `(L, M)` consists of the reduced signed Laplacian `L` and
//! the reduced Laplacian `M` of the underlying graph. Firing site `i`
//! subtracts the `i`th column of `L`; a configuration is valid when
//! `M L^-1 c` is componentwise nonnegative. The engine works in the
//! `R+` coordinates `x = M L^-1 c`, where a valid `x` is ready to fire
//! at `i` exactly when `x_i >= deg(v_i)`, and transfers results back.
//!
//! ```
//! use chipfire::engine::{cfg, ChipFiringPair};
//! use chipfire::fixtures::negative_triangle;
//!
//! let pair = ChipFiringPair::new(negative_triangle()).unwrap();
//! assert!(pair.is_valid(&cfg(&[1, 1])).unwrap());
//! // (1, 0) maps to (5/3, -4/3): not valid
//! assert!(!pair.is_valid(&cfg(&[1, 0])).unwrap());
//! // but (1, 0) - (0, 1) = L * (1, -1), so the two are equivalent
//! assert!(pair.same_class(&cfg(&[1, 0]), &cfg(&[0, 1])).unwrap());
//!
//! let (stable, fired) = pair.stabilize(&cfg(&[6, 6])).unwrap();
//! assert_eq!(stable, cfg(&[3, 3]));
//! assert_eq!(fired, vec![1.into(), 1.into()]);
//!
//! let sup = pair.enumerate_superstables().unwrap();
//! assert_eq!(sup, vec![cfg(&[0, 0]), cfg(&[1, 1]), cfg(&[2, 2])]);
//! let e = pair.identity().unwrap();
//! assert_eq!(pair.group_add(&e, &e).unwrap(), e);
//! assert_eq!(pair.max_critical().unwrap(), cfg(&[5, 5]));
//! ```
//!
//! ```
//! use chipfire::engine::{cfg, ChipFiringPair};
//! use chipfire::fixtures::example_g_phi;
//! let pair = ChipFiringPair::new(example_g_phi()).unwrap();
//! let (stable, _fired) = pair.stabilize(&cfg(&[6, 6, 2])).unwrap();
//! assert_eq!(stable, cfg(&[3, 3, 1]));
//! assert_eq!(pair.identity().unwrap(), cfg(&[3, 3, 1]));
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Sign, SignedGraph};
use crate::linalg::{IntMatrix, RatMatrix, SNFDecomposition};

/// Integer chip configuration over the nonsink vertices.
pub type Configuration = Vec<BigInt>;

/// Rational point in the `R+` coordinates.
pub type RPoint = Vec<BigRational>;

pub fn cfg(entries: &[i64]) -> Configuration {
    entries.iter().map(|&x| BigInt::from(x)).collect()
}

/// Residues identifying an equivalence class modulo the image of `L`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(pub Vec<BigInt>);

/// The critical group as its nontrivial invariant factors and order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalGroup {
    pub invariant_factors: Vec<BigInt>,
    pub order: BigInt,
}

/// Default cap on the dimension of the subset superstability test.
pub const DEFAULT_CHI_CAP: usize = 20;

/// Guard against runaway stabilization; never reached on valid input.
const MAX_FIRINGS: u64 = 10_000_000;

/// A signed graph together with every matrix the chip-firing operations
/// need, all computed exactly up front.
pub struct ChipFiringPair {
    graph: SignedGraph,
    l: IntMatrix,
    m: IntMatrix,
    l_inv: RatMatrix,
    m_inv: RatMatrix,
    lm_inv: RatMatrix,
    ml_inv: RatMatrix,
    det_l: BigInt,
    /// |det L| * ML^-1, an integer matrix used for fast validity checks.
    scaled_ml_inv: IntMatrix,
    scale: BigInt,
    s: Configuration,
    degrees: Vec<BigInt>,
    snf: SNFDecomposition,
    u_inv: IntMatrix,
    chi_cap: usize,
    scan_bound: Option<BigInt>,
}

impl ChipFiringPair {
    pub fn new(graph: SignedGraph) -> Result<Self> {
        if graph.vertex_count() < 2 {
            return Err(Error::Precondition("need at least two vertices".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let (l, m) = graph.reduced_laplacians()?;
        let det_l = l.det()?;
        if det_l.is_zero() {
            return Err(Error::Singular);
        }
        let l_inv = l.invert()?;
        let m_inv = m.invert()?;
        let lm_inv = l.to_rational().mul(&m_inv)?;
        let ml_inv = m.to_rational().mul(&l_inv)?;
        let scale = det_l.abs();
        let scaled_ml_inv = {
            let s = BigRational::from(scale.clone());
            let data = (0..ml_inv.rows())
                .flat_map(|i| ml_inv.row(i).iter().map(|e| e * &s).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            RatMatrix::new(ml_inv.rows(), ml_inv.cols(), data).to_integer()?
        };
        let nonsink = graph.nonsink_vertices();
        let s = nonsink
            .iter()
            .map(|&v| {
                let adj = graph.neighbors(v).iter().any(|&(w, _)| w == graph.sink());
                BigInt::from(adj as u8)
            })
            .collect();
        let degrees = graph.nonsink_degrees();
        let snf = l.smith_normal_form();
        let u_inv = snf.u.invert()?.to_integer()?;
        Ok(ChipFiringPair {
            graph,
            l,
            m,
            l_inv,
            m_inv,
            lm_inv,
            ml_inv,
            det_l,
            scaled_ml_inv,
            scale,
            s,
            degrees,
            snf,
            u_inv,
            chi_cap: DEFAULT_CHI_CAP,
            scan_bound: None,
        })
    }

    pub fn with_chi_cap(mut self, cap: usize) -> Self {
        self.chi_cap = cap;
        self
    }

    /// Caps every coordinate of the stable-configuration scan box. The
    /// derived box is already complete; a smaller cap trades
    /// completeness for speed.
    pub fn with_scan_bound(mut self, bound: BigInt) -> Self {
        self.scan_bound = Some(bound);
        self
    }

    pub fn graph(&self) -> &SignedGraph {
        &self.graph
    }

    /// Number of nonsink vertices (the pair dimension).
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn laplacian(&self) -> &IntMatrix {
        &self.l
    }

    pub fn underlying_laplacian(&self) -> &IntMatrix {
        &self.m
    }

    pub fn lm_inv(&self) -> &RatMatrix {
        &self.lm_inv
    }

    pub fn ml_inv(&self) -> &RatMatrix {
        &self.ml_inv
    }

    pub fn l_inv(&self) -> &RatMatrix {
        &self.l_inv
    }

    pub fn m_inv(&self) -> &RatMatrix {
        &self.m_inv
    }

    pub fn det_l(&self) -> &BigInt {
        &self.det_l
    }

    pub fn sink_indicator(&self) -> &Configuration {
        &self.s
    }

    pub fn degrees(&self) -> &[BigInt] {
        &self.degrees
    }

    fn check_dim(&self, c: &[BigInt]) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "configuration length {} vs pair dimension {}",
                c.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `|det L| * ML^-1 c`; nonnegative exactly when `c` is valid.
    fn scaled_point(&self, c: &Configuration) -> Result<Vec<BigInt>> {
        self.scaled_ml_inv.mat_vec(c)
    }

    pub fn is_valid(&self, c: &Configuration) -> Result<bool> {
        self.check_dim(c)?;
        Ok(self.scaled_point(c)?.iter().all(|e| !e.is_negative()))
    }

    pub fn to_r(&self, c: &Configuration) -> Result<RPoint> {
        self.check_dim(c)?;
        self.ml_inv.mat_vec_int(c)
    }

    pub fn from_r(&self, x: &RPoint) -> Result<Configuration> {
        if x.len() != self.dim() {
            return Err(Error::Dimension("R-point length".into()));
        }
        let c = self.lm_inv.mat_vec(x)?;
        let mut out = Vec::with_capacity(c.len());
        for e in c {
            if !e.is_integer() {
                return Err(Error::NonIntegral(format!("LM^-1 x entry {e}")));
            }
            out.push(e.to_integer());
        }
        Ok(out)
    }

    pub fn fire(&self, c: &Configuration, i: usize) -> Result<Configuration> {
        self.check_dim(c)?;
        if i >= self.dim() {
            return Err(Error::Dimension(format!("site {i} out of range")));
        }
        Ok((0..self.dim()).map(|j| &c[j] - &self.l[(j, i)]).collect())
    }

    pub fn fire_multiset(&self, c: &Configuration, z: &[BigInt]) -> Result<Configuration> {
        self.check_dim(c)?;
        let lz = self.l.mat_vec(z)?;
        Ok(c.iter().zip(&lz).map(|(a, b)| a - b).collect())
    }

    pub fn ready_to_fire(&self, c: &Configuration, i: usize) -> Result<bool> {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("configuration is not valid".into()));
        }
        if i >= self.dim() {
            return Err(Error::Dimension(format!("site {i} out of range")));
        }
        let x = self.scaled_point(c)?;
        Ok(self.scaled_ready(&x, i))
    }

    /// For a nonnegative scaled point, site `i` is ready exactly when
    /// its entry reaches `|det L| * deg(v_i)`.
    fn scaled_ready(&self, scaled_x: &[BigInt], i: usize) -> bool {
        scaled_x[i] >= &self.scale * &self.degrees[i]
    }

    pub fn is_stable(&self, c: &Configuration) -> Result<bool> {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("configuration is not valid".into()));
        }
        let x = self.scaled_point(c)?;
        Ok((0..self.dim()).all(|i| !self.scaled_ready(&x, i)))
    }

    pub fn stabilize(&self, c: &Configuration) -> Result<(Configuration, Vec<BigInt>)> {
        self.stabilize_with(c, |ready| ready[0])
    }

    /// Stabilizes with a caller-chosen firing order; `choose` picks one
    /// site from the nonempty list of ready sites. Used by tests to
    /// check confluence.
    pub fn stabilize_with<F>(&self, c: &Configuration, choose: F) -> Result<(Configuration, Vec<BigInt>)>
    where
        F: FnMut(&[usize]) -> usize,
    {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("stabilize requires a valid configuration".into()));
        }
        let x = self.scaled_point(c)?;
        let (_, fired) = self.stabilize_scaled(x, choose)?;
        let lf = self.l.mat_vec(&fired)?;
        let result = c.iter().zip(&lf).map(|(a, b)| a - b).collect();
        Ok((result, fired))
    }

    /// Core loop on scaled `R+` coordinates. Firing site `i` subtracts
    /// `|det L|` times column `i` of `M`.
    fn stabilize_scaled<F>(
        &self,
        mut x: Vec<BigInt>,
        mut choose: F,
    ) -> Result<(Vec<BigInt>, Vec<BigInt>)>
    where
        F: FnMut(&[usize]) -> usize,
    {
        let n = self.dim();
        let mut fired = vec![BigInt::zero(); n];
        let mut count: u64 = 0;
        loop {
            let ready: Vec<usize> = (0..n).filter(|&i| self.scaled_ready(&x, i)).collect();
            if ready.is_empty() {
                return Ok((x, fired));
            }
            let i = ready[choose(&ready).min(ready.len() - 1)];
            // batch: site i can certainly fire floor(x_i / (scale deg_i))
            // times in a row; other entries only grow meanwhile
            let k = (&x[i] / (&self.scale * &self.degrees[i])).max(BigInt::one());
            for j in 0..n {
                let t = &self.scale * &self.m[(j, i)] * &k;
                x[j] -= t;
            }
            fired[i] += &k;
            count += 1;
            if count > MAX_FIRINGS {
                return Err(Error::ResourceGuard(format!(
                    "stabilization exceeded {MAX_FIRINGS} firings"
                )));
            }
        }
    }

    /// Subset (chi) superstability test, which for signed graphs decides
    /// z-superstability: for every nonzero 0/1 vector, subtracting the
    /// corresponding set firing must leave `R+`.
    pub fn is_z_superstable(&self, c: &Configuration) -> Result<bool> {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("superstability test needs a valid configuration".into()));
        }
        let n = self.dim();
        if n > self.chi_cap {
            return Err(Error::ResourceGuard(format!(
                "dimension {n} exceeds subset-test cap {}",
                self.chi_cap
            )));
        }
        let x = self.scaled_point(c)?;
        // scaled columns of M
        let cols: Vec<Vec<BigInt>> = (0..n)
            .map(|j| (0..n).map(|i| &self.scale * &self.m[(i, j)]).collect())
            .collect();
        for mask in 1u64..(1u64 << n) {
            let mut ok = false; // some entry goes negative
            for i in 0..n {
                let mut e = x[i].clone();
                for (j, col) in cols.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        e -= &col[i];
                    }
                }
                if e.is_negative() {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when the sink is adjacent to every nonsink vertex.
    pub fn has_universal_sink(&self) -> bool {
        self.s.iter().all(|e| e.is_one())
    }

    /// Same positive and negative incidence counts at every nonsink
    /// vertex; returns those counts.
    pub fn signed_regular(&self) -> Option<(usize, usize)> {
        let g = &self.graph;
        let mut counts = g.nonsink_vertices().into_iter().map(|v| {
            let (mut pos, mut neg) = (0, 0);
            for (_, s) in g.neighbors(v) {
                match s {
                    Sign::Positive => pos += 1,
                    Sign::Negative => neg += 1,
                }
            }
            (pos, neg)
        });
        let first = counts.next()?;
        counts.all(|c| c == first).then_some(first)
    }

    /// The sink-firing constant: the least `N0 > 0` with
    /// `N0 * L^-1 s` integral and nonnegative, when the sink indicator
    /// `s` is a valid configuration; `None` otherwise. Signed-regular
    /// graphs with universal sink short-circuit to `2 m_- + 1`.
    pub fn sink_firing_constant(&self) -> Result<Option<BigInt>> {
        if self.has_universal_sink() {
            if let Some((_, neg)) = self.signed_regular() {
                return Ok(Some(BigInt::from(2 * neg + 1)));
            }
        }
        if !self.is_valid(&self.s)? {
            return Ok(None);
        }
        let ls = self.l_inv.mat_vec_int(&self.s)?;
        if ls.iter().any(|e| e.is_negative()) {
            return Ok(None);
        }
        let mut n0 = BigInt::one();
        for e in &ls {
            n0 = n0.lcm(e.denom());
        }
        Ok(Some(n0))
    }

    fn require_nonsink_connected(&self) -> Result<()> {
        if !self.graph.is_nonsink_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn is_critical(&self, c: &Configuration) -> Result<bool> {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("criticality test needs a valid configuration".into()));
        }
        self.require_nonsink_connected()?;
        match self.sink_firing_constant()? {
            Some(n0) => self.is_critical_sink_firing(c, &n0),
            None => Ok(self.is_stable(c)? && &self.critical_rep(c)? == c),
        }
    }

    /// Sink-firing criterion: critical iff adding `N0 s` and stabilizing
    /// returns the same configuration.
    pub fn is_critical_sink_firing(&self, c: &Configuration, n0: &BigInt) -> Result<bool> {
        let bumped: Configuration = c.iter().zip(&self.s).map(|(a, b)| a + b * n0).collect();
        let (stab, _) = self.stabilize(&bumped)?;
        Ok(&stab == c)
    }

    /// Representative-equality criterion: critical iff stable and equal
    /// to the unique critical configuration of its class.
    pub fn is_critical_by_rep(&self, c: &Configuration) -> Result<bool> {
        Ok(self.is_stable(c)? && &self.critical_rep(c)? == c)
    }

    /// Class label of `c`: residues of the Smith transform image modulo
    /// the invariant factors, normalized into `[0, d_i)`.
    pub fn class_label(&self, c: &Configuration) -> Result<ClassLabel> {
        self.check_dim(c)?;
        let uc = self.snf.u.mat_vec(c)?;
        let residues = uc
            .iter()
            .zip(&self.snf.d)
            .map(|(e, d)| e.mod_floor(d))
            .collect();
        Ok(ClassLabel(residues))
    }

    pub fn same_class(&self, c: &Configuration, d: &Configuration) -> Result<bool> {
        Ok(self.class_label(c)? == self.class_label(d)?)
    }

    /// Any integer configuration in the class with the given label,
    /// reduced modulo the image of `L` to keep entries small.
    pub fn label_preimage(&self, label: &ClassLabel) -> Result<Configuration> {
        if label.0.len() != self.dim() {
            return Err(Error::Dimension("label length".into()));
        }
        let c = self.u_inv.mat_vec(&label.0)?;
        let t: Vec<BigInt> = self
            .l_inv
            .mat_vec_int(&c)?
            .iter()
            .map(|r| r.round().to_integer())
            .collect();
        let lt = self.l.mat_vec(&t)?;
        Ok(c.iter().zip(&lt).map(|(a, b)| a - b).collect())
    }

    /// All class labels, in lexicographic order of their residue tuples.
    pub fn all_labels(&self) -> Vec<ClassLabel> {
        let mut labels = vec![Vec::new()];
        for d in &self.snf.d {
            let bound = d.abs();
            let mut next = Vec::new();
            for prefix in labels {
                let mut r = BigInt::zero();
                while r < bound {
                    let mut p = prefix.clone();
                    p.push(r.clone());
                    next.push(p);
                    r += 1;
                }
            }
            labels = next;
        }
        labels.into_iter().map(ClassLabel).collect()
    }

    /// The unique critical configuration equivalent to `c`: start from a
    /// large configuration in the class where every site can fire, and
    /// stabilize.
    pub fn critical_rep(&self, c: &Configuration) -> Result<Configuration> {
        self.check_dim(c)?;
        self.require_nonsink_connected()?;
        let n = self.dim();
        let x = self.to_r(c)?;
        // target_i: enough to fire site i from x + M z
        let max_deg = self.degrees.iter().max().cloned().unwrap_or_default();
        let target: Vec<BigRational> = (0..n)
            .map(|i| {
                let deficit = if x[i].is_negative() { -x[i].ceil().to_integer() } else { BigInt::zero() };
                BigRational::from(&self.degrees[i] + BigInt::one() + deficit + &max_deg + BigInt::one())
            })
            .collect();
        let mz = self.m_inv.mat_vec(&target)?;
        let z: Vec<BigInt> = mz.iter().map(|e| e.ceil().to_integer()).collect();
        // scaled start point: |d| (x + M z)
        let mzz = self.m.mat_vec(&z)?;
        let mut start = self.scaled_point(c)?;
        for i in 0..n {
            start[i] += &self.scale * &mzz[i];
        }
        debug_assert!(start
            .iter()
            .enumerate()
            .all(|(i, e)| e >= &(&self.scale * (&self.degrees[i] + BigInt::one()))));
        let (_, fired) = self.stabilize_scaled(start, |r| r[0])?;
        // c + L(z - fired)
        let delta: Vec<BigInt> = z.iter().zip(&fired).map(|(a, b)| a - b).collect();
        let ld = self.l.mat_vec(&delta)?;
        Ok(c.iter().zip(&ld).map(|(a, b)| a + b).collect())
    }

    /// Any valid configuration in the class of `c`: add `L z` with `z`
    /// chosen so the R+ image becomes nonnegative.
    fn valid_class_rep(&self, c: &Configuration) -> Result<Configuration> {
        if self.is_valid(c)? {
            return Ok(c.clone());
        }
        let n = self.dim();
        let x = self.to_r(c)?;
        let max_deg = self.degrees.iter().max().cloned().unwrap_or_default();
        let target: Vec<BigRational> = (0..n)
            .map(|i| {
                let deficit = if x[i].is_negative() { -x[i].ceil().to_integer() } else { BigInt::zero() };
                BigRational::from(deficit + &max_deg + BigInt::one())
            })
            .collect();
        let z: Vec<BigInt> = self
            .m_inv
            .mat_vec(&target)?
            .iter()
            .map(|e| e.ceil().to_integer())
            .collect();
        let lz = self.l.mat_vec(&z)?;
        let rep: Configuration = c.iter().zip(&lz).map(|(a, b)| a + b).collect();
        debug_assert!(self.is_valid(&rep)?);
        Ok(rep)
    }

    /// The unique z-superstable configuration equivalent to `c`, found
    /// by greedy descent: starting from a valid representative,
    /// repeatedly subtract a set firing that keeps validity. The
    /// potential `1^T M^-1 x` drops by at least one per step, so the
    /// descent terminates, and it can only stop at the z-superstable
    /// configuration of the class.
    pub fn superstable_rep(&self, c: &Configuration) -> Result<Configuration> {
        self.check_dim(c)?;
        self.require_nonsink_connected()?;
        let n = self.dim();
        if n > self.chi_cap {
            return Err(Error::ResourceGuard(format!(
                "dimension {n} exceeds subset-test cap {}",
                self.chi_cap
            )));
        }
        let mut cur = self.valid_class_rep(c)?;
        let mut y = self.scaled_point(&cur)?;
        // scaled columns of M and of L, and set-firing deltas per mask
        let m_cols: Vec<Vec<BigInt>> = (0..n)
            .map(|j| (0..n).map(|i| &self.scale * &self.m[(i, j)]).collect())
            .collect();
        let steps_cap = self
            .scan_bound
            .as_ref()
            .and_then(|b| u64::try_from(b).ok())
            .unwrap_or(1_000_000);
        let mut steps: u64 = 0;
        'descend: loop {
            for mask in 1u64..(1u64 << n) {
                let mut w = vec![BigInt::zero(); n]; // scale * M chi
                for (j, col) in m_cols.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        for i in 0..n {
                            w[i] += &col[i];
                        }
                    }
                }
                if y.iter().zip(&w).any(|(yi, wi)| yi < wi) {
                    continue;
                }
                // subtract as many copies of this set firing as validity allows
                let k = (0..n)
                    .filter(|&i| w[i].is_positive())
                    .map(|i| &y[i] / &w[i])
                    .min()
                    .unwrap_or_else(BigInt::one)
                    .max(BigInt::one());
                for i in 0..n {
                    let t = &w[i] * &k;
                    y[i] -= t;
                }
                for j in 0..n {
                    if mask >> j & 1 == 1 {
                        for i in 0..n {
                            let t = &self.l[(i, j)] * &k;
                            cur[i] -= t;
                        }
                    }
                }
                steps += 1;
                if steps > steps_cap {
                    return Err(Error::ResourceGuard(format!(
                        "superstable descent exceeded {steps_cap} steps"
                    )));
                }
                continue 'descend;
            }
            return Ok(cur);
        }
    }

    /// All critical configurations, one per class, sorted.
    pub fn enumerate_criticals(&self) -> Result<Vec<Configuration>> {
        self.require_nonsink_connected()?;
        let mut out = Vec::new();
        for label in self.all_labels() {
            let rep = self.label_preimage(&label)?;
            out.push(self.critical_rep(&rep)?);
        }
        out.sort();
        Ok(out)
    }

    /// All z-superstable configurations, one per class, sorted.
    pub fn enumerate_superstables(&self) -> Result<Vec<Configuration>> {
        self.require_nonsink_connected()?;
        let mut out = Vec::new();
        for label in self.all_labels() {
            let rep = self.label_preimage(&label)?;
            out.push(self.superstable_rep(&rep)?);
        }
        out.sort();
        Ok(out)
    }

    /// Identity of the critical group: the image `L M^-1 e` of the
    /// classical sandpile identity `e` of the underlying graph.
    pub fn identity(&self) -> Result<Configuration> {
        self.require_nonsink_connected()?;
        let underlying = self.underlying_pair()?;
        let e_g = underlying.critical_rep(&vec![BigInt::zero(); self.dim()])?;
        let img = self.lm_inv.mat_vec_int(&e_g)?;
        let mut out = Vec::with_capacity(img.len());
        for e in img {
            if !e.is_integer() {
                return Err(Error::NonIntegral("identity image".into()));
            }
            out.push(e.to_integer());
        }
        Ok(out)
    }

    /// The classical pair on the underlying all-positive graph.
    pub fn underlying_pair(&self) -> Result<ChipFiringPair> {
        let edges = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v, _)| (u, v, Sign::Positive))
            .collect();
        let g = SignedGraph::new(
            self.graph.vertex_names().to_vec(),
            self.graph.sink(),
            edges,
        )?;
        ChipFiringPair::new(g)
    }

    /// Group law on critical configurations: stabilize the sum.
    pub fn group_add(&self, c1: &Configuration, c2: &Configuration) -> Result<Configuration> {
        if !self.is_critical(c1)? || !self.is_critical(c2)? {
            return Err(Error::Precondition("group_add needs critical configurations".into()));
        }
        let sum = c1.iter().zip(c2).map(|(a, b)| a + b).collect();
        Ok(self.stabilize(&sum)?.0)
    }

    pub fn critical_group(&self) -> CriticalGroup {
        let invariant_factors = self
            .snf
            .d
            .iter()
            .filter(|d| d.abs() > BigInt::one())
            .map(|d| d.abs())
            .collect();
        CriticalGroup { invariant_factors, order: self.det_l.abs() }
    }

    /// Sufficient certificate for z-superstability: the `R+` image of
    /// `c` is dominated by a superstable configuration of the underlying
    /// graph.
    pub fn superstable_certificate(&self, c: &Configuration) -> Result<bool> {
        if !self.is_valid(c)? {
            return Err(Error::Precondition("certificate needs a valid configuration".into()));
        }
        let x = self.to_r(c)?;
        for w in self.classical_superstables()? {
            let wr: Vec<BigRational> = w.iter().map(|e| BigRational::from(e.clone())).collect();
            if x.iter().zip(&wr).all(|(a, b)| a <= b) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Superstable configurations of the underlying unsigned graph:
    /// entries below degree, stable under all set firings.
    pub fn classical_superstables(&self) -> Result<Vec<Configuration>> {
        let n = self.dim();
        if n > self.chi_cap {
            return Err(Error::ResourceGuard(format!(
                "dimension {n} exceeds subset-test cap {}",
                self.chi_cap
            )));
        }
        let mut out = Vec::new();
        let mut current = vec![BigInt::zero(); n];
        self.classical_scan(0, &mut current, &mut out);
        Ok(out)
    }

    fn classical_scan(&self, depth: usize, current: &mut Configuration, out: &mut Vec<Configuration>) {
        let n = self.dim();
        if depth == n {
            if self.classical_set_firing_stable(current) {
                out.push(current.clone());
            }
            return;
        }
        let mut v = BigInt::zero();
        while v < self.degrees[depth] {
            current[depth] = v.clone();
            self.classical_scan(depth + 1, current, out);
            v += 1;
        }
        current[depth] = BigInt::zero();
    }

    fn classical_set_firing_stable(&self, w: &Configuration) -> bool {
        let n = self.dim();
        for mask in 1u64..(1u64 << n) {
            let mut some_negative = false;
            for i in 0..n {
                let mut e = w[i].clone();
                for j in 0..n {
                    if mask >> j & 1 == 1 {
                        e -= &self.m[(i, j)];
                    }
                }
                if e.is_negative() {
                    some_negative = true;
                    break;
                }
            }
            if !some_negative {
                return false;
            }
        }
        true
    }

    /// For signed-regular graphs with universal sink, the maximal
    /// critical configuration `m' * 1` with `m' = m(2 m_- + 1) - 1`.
    pub fn max_critical(&self) -> Option<Configuration> {
        if !self.has_universal_sink() {
            return None;
        }
        let (pos, neg) = self.signed_regular()?;
        let m = pos + neg;
        let m_prime = BigInt::from(m * (2 * neg + 1) - 1);
        Some(vec![m_prime; self.dim()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_g_phi, example_h_phi, negative_triangle, positive_triangle};
    use crate::linalg::parse_rational;

    fn rat(entries: &[&str]) -> Vec<BigRational> {
        entries.iter().map(|s| parse_rational(s).unwrap()).collect()
    }

    fn g_pair() -> ChipFiringPair {
        ChipFiringPair::new(example_g_phi()).unwrap()
    }

    fn h_pair() -> ChipFiringPair {
        ChipFiringPair::new(example_h_phi()).unwrap()
    }

    #[test]
    fn pair_caches_worked_example_products() {
        let p = g_pair();
        assert_eq!(p.det_l(), &BigInt::from(8));
        let expected = RatMatrix::new(
            3,
            3,
            rat(&["3/2", "1", "1/2", "5/4", "3/2", "1/4", "0", "0", "1"]),
        );
        assert_eq!(p.lm_inv(), &expected);

        let h = h_pair();
        assert_eq!(h.det_l(), &BigInt::from(12));
        let expected = RatMatrix::new(3, 3, rat(&["2", "2", "1", "5/4", "2", "3/4", "0", "0", "1"]));
        assert_eq!(h.lm_inv(), &expected);
    }

    #[test]
    fn all_positive_pair_is_classical() {
        let p = ChipFiringPair::new(positive_triangle()).unwrap();
        assert_eq!(p.laplacian(), p.underlying_laplacian());
        assert_eq!(p.lm_inv(), &RatMatrix::identity(2));
    }

    #[test]
    fn validity_matches_worked_examples() {
        let p = g_pair();
        assert!(p.is_valid(&cfg(&[0, 0, 0])).unwrap());
        assert!(p.is_valid(&cfg(&[1, 1, 1])).unwrap());
        assert_eq!(p.to_r(&cfg(&[1, 1, 1])).unwrap(), rat(&["0", "1/2", "1"]));

        let h = h_pair();
        assert!(!h.is_valid(&cfg(&[1, 0, 1])).unwrap());
        assert_eq!(h.to_r(&cfg(&[1, 0, 1])).unwrap(), rat(&["1", "-1", "1"]));
    }

    #[test]
    fn r_roundtrip() {
        let p = g_pair();
        let c = cfg(&[6, 6, 2]);
        let x = p.to_r(&c).unwrap();
        assert_eq!(p.from_r(&x).unwrap(), c);

        let h = h_pair();
        assert_eq!(h.to_r(&cfg(&[1, 1, 0])).unwrap(), rat(&["0", "1/2", "0"]));
        assert_eq!(h.to_r(&cfg(&[7, 5, 0])).unwrap(), rat(&["8/3", "5/6", "0"]));
    }

    #[test]
    fn from_r_rejects_nonintegral_image() {
        let p = g_pair();
        let x = rat(&["1/7", "0", "0"]);
        assert!(matches!(p.from_r(&x), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn firing_is_column_subtraction() {
        let p = g_pair();
        assert_eq!(p.fire(&cfg(&[1, 1, 2]), 2).unwrap(), cfg(&[1, 2, 0]));
        assert_eq!(p.fire_multiset(&cfg(&[4, 5, 0]), &cfg(&[0, 0, 0])).unwrap(), cfg(&[4, 5, 0]));

        let t = ChipFiringPair::new(negative_triangle()).unwrap();
        assert_eq!(t.fire(&cfg(&[2, 0]), 0).unwrap(), cfg(&[0, -1]));
    }

    #[test]
    fn zero_is_stable_everywhere() {
        let p = g_pair();
        for i in 0..3 {
            assert!(!p.ready_to_fire(&cfg(&[0, 0, 0]), i).unwrap());
        }
    }

    #[test]
    fn stabilize_worked_example() {
        let p = g_pair();
        let (stable, fired) = p.stabilize(&cfg(&[6, 6, 2])).unwrap();
        assert_eq!(stable, cfg(&[3, 3, 1]));
        let lf = p.laplacian().mat_vec(&fired).unwrap();
        let back: Configuration = stable.iter().zip(&lf).map(|(a, b)| a + b).collect();
        assert_eq!(back, cfg(&[6, 6, 2]));

        // criticality of (4,5,0) via sink firing with N0 = 4
        let bumped = cfg(&[8, 9, 4]);
        assert_eq!(p.stabilize(&bumped).unwrap().0, cfg(&[4, 5, 0]));

        let stable_in = cfg(&[1, 1, 1]);
        let (s, f) = p.stabilize(&stable_in).unwrap();
        assert_eq!(s, stable_in);
        assert!(f.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn superstability_examples() {
        let p = g_pair();
        assert!(p.is_z_superstable(&cfg(&[0, 0, 0])).unwrap());
        assert!(p.is_z_superstable(&cfg(&[3, 4, 0])).unwrap());
        assert!(!p.is_z_superstable(&cfg(&[5, 6, 0])).unwrap());
    }

    #[test]
    fn sink_firing_constants() {
        let p = g_pair();
        assert_eq!(p.sink_firing_constant().unwrap(), Some(BigInt::from(4)));

        let h = h_pair();
        assert_eq!(h.sink_firing_constant().unwrap(), None);

        let t = ChipFiringPair::new(positive_triangle()).unwrap();
        assert_eq!(t.sink_firing_constant().unwrap(), Some(BigInt::one()));
    }

    #[test]
    fn criticality_examples() {
        let p = g_pair();
        assert!(p.is_critical(&cfg(&[4, 5, 0])).unwrap());
        assert!(!p.is_critical(&cfg(&[0, 0, 0])).unwrap());

        let h = h_pair();
        assert!(h.is_critical(&cfg(&[7, 6, 2])).unwrap());
    }

    #[test]
    fn class_labels_respect_firing() {
        let p = g_pair();
        let c = cfg(&[4, 5, 0]);
        let d = p.fire_multiset(&c, &cfg(&[2, -1, 3])).unwrap();
        assert!(p.same_class(&c, &d).unwrap());

        let t = ChipFiringPair::new(negative_triangle()).unwrap();
        // (1,0) - (1,-1) = (0,1) is a multiset firing, so same class
        assert!(t.same_class(&cfg(&[1, 0]), &cfg(&[0, 1])).unwrap());
        assert!(!t.same_class(&cfg(&[1, 0]), &cfg(&[0, 0])).unwrap());
    }

    #[test]
    fn representatives_of_worked_example() {
        let p = g_pair();
        assert_eq!(p.critical_rep(&cfg(&[0, 0, 0])).unwrap(), cfg(&[3, 3, 1]));
        assert_eq!(p.critical_rep(&cfg(&[4, 5, 0])).unwrap(), cfg(&[4, 5, 0]));
        let r = p.critical_rep(&cfg(&[2, 7, -3])).unwrap();
        assert_eq!(p.critical_rep(&r).unwrap(), r);

        assert_eq!(p.superstable_rep(&cfg(&[4, 5, 0])).unwrap(), cfg(&[1, 1, 1]));
        assert_eq!(p.superstable_rep(&cfg(&[0, 0, 0])).unwrap(), cfg(&[0, 0, 0]));

        let h = h_pair();
        assert_eq!(h.superstable_rep(&cfg(&[7, 6, 2])).unwrap(), cfg(&[7, 5, 0]));
    }

    #[test]
    fn identity_and_group_add() {
        let p = g_pair();
        let e = p.identity().unwrap();
        assert_eq!(e, cfg(&[3, 3, 1]));
        assert_eq!(p.group_add(&e, &e).unwrap(), e);
        let c = cfg(&[4, 5, 0]);
        assert_eq!(p.group_add(&e, &c).unwrap(), c);
    }

    #[test]
    fn generator_orbit_covers_group() {
        let p = g_pair();
        let gen = cfg(&[4, 5, 1]);
        let mut seen = std::collections::BTreeSet::new();
        let mut cur = gen.clone();
        for _ in 0..8 {
            seen.insert(p.class_label(&cur).unwrap());
            cur = p.group_add(&cur, &gen).unwrap();
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn critical_group_structures() {
        let p = g_pair();
        let g = p.critical_group();
        assert_eq!(g.order, BigInt::from(8));
        assert_eq!(g.invariant_factors, vec![BigInt::from(8)]);

        let h = h_pair();
        let g = h.critical_group();
        assert_eq!(g.order, BigInt::from(12));
        assert_eq!(g.invariant_factors, vec![BigInt::from(12)]);
    }

    #[test]
    fn certificate_is_sufficient_not_complete() {
        let h = h_pair();
        assert!(h.superstable_certificate(&cfg(&[1, 1, 0])).unwrap());
        assert!(h.superstable_certificate(&cfg(&[0, 0, 0])).unwrap());
        // z-superstable but not dominated by any classical superstable
        assert!(h.is_z_superstable(&cfg(&[5, 4, 2])).unwrap());
        assert!(!h.superstable_certificate(&cfg(&[5, 4, 2])).unwrap());
    }

    #[test]
    fn max_critical_examples() {
        use crate::fixtures::graph;
        // negative triangle with universal sink: m = 2, m_- = 1
        let t = ChipFiringPair::new(negative_triangle()).unwrap();
        let mc = t.max_critical().unwrap();
        assert_eq!(mc, cfg(&[5, 5]));
        assert!(t.is_critical(&mc).unwrap());

        // classical regular case reduces to (m - 1) * 1
        let pt = ChipFiringPair::new(positive_triangle()).unwrap();
        assert_eq!(pt.max_critical().unwrap(), cfg(&[1, 1]));

        // no universal sink: unavailable
        let path = graph(
            &["q", "a", "b"],
            0,
            &[(0, 1, Sign::Positive), (1, 2, Sign::Positive)],
        );
        assert_eq!(ChipFiringPair::new(path).unwrap().max_critical(), None);
    }

    #[test]
    fn enumerations_match_hand_worked_lists() {
        let p = g_pair();
        let criticals = p.enumerate_criticals().unwrap();
        let mut expected: Vec<Configuration> = [
            [4, 5, 0], [3, 3, 1], [4, 5, 1], [4, 4, 1],
            [2, 3, 0], [3, 4, 1], [3, 4, 0], [5, 6, 0],
        ]
        .iter()
        .map(|e| cfg(e))
        .collect();
        expected.sort();
        assert_eq!(criticals, expected);

        let superstables = p.enumerate_superstables().unwrap();
        let mut expected: Vec<Configuration> = [
            [1, 1, 1], [0, 0, 0], [3, 3, 0], [1, 1, 0],
            [2, 3, 0], [2, 2, 0], [3, 4, 0], [2, 2, 1],
        ]
        .iter()
        .map(|e| cfg(e))
        .collect();
        expected.sort();
        assert_eq!(superstables, expected);
    }

    #[test]
    fn negative_triangle_superstables() {
        let t = ChipFiringPair::new(negative_triangle()).unwrap();
        let ss = t.enumerate_superstables().unwrap();
        // ML^-1 = (1/3)[[5,-4],[-4,5]] rules out (1,0) and (0,1);
        // the diagonal configurations represent the three classes
        let expected = vec![cfg(&[0, 0]), cfg(&[1, 1]), cfg(&[2, 2])];
        assert_eq!(ss, expected);
    }

    #[test]
    fn rejects_disconnected_for_criticality() {
        use crate::fixtures::graph;
        // star: sink in the middle, leaves disconnected without it
        let star = graph(
            &["q", "a", "b"],
            0,
            &[(0, 1, Sign::Positive), (0, 2, Sign::Positive)],
        );
        let p = ChipFiringPair::new(star).unwrap();
        assert!(matches!(p.critical_rep(&cfg(&[0, 0])), Err(Error::Disconnected)));
    }
}
