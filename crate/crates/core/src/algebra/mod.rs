//! Truncated boson and spin representations of the six algebras.
//!
//! Every root matrix element has the form `sqrt(q) / 2` with `q` a
//! non-negative integer, and every Cartan eigenvalue is an integer numerator
//! times a per-axis scale. The integer forms are kept next to the floating
//! point operators so that algebra relations can be checked exactly.

mod verify;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::SparseOperator;
use crate::C64;

pub use verify::{CasimirReport, CommutatorReport, RelationCheck};

/// Sites allowed by [`AlgebraRep::build`] unless a different limit is given.
pub const DEFAULT_MAX_SITES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    HeisenbergWeyl,
    Su2,
    Su3,
    So5,
    Euclidean2,
    Su11,
}

impl AlgebraKind {
    pub const ALL: [AlgebraKind; 6] = [
        AlgebraKind::HeisenbergWeyl,
        AlgebraKind::Su2,
        AlgebraKind::Su3,
        AlgebraKind::So5,
        AlgebraKind::Euclidean2,
        AlgebraKind::Su11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::HeisenbergWeyl => "hw",
            AlgebraKind::Su2 => "su2",
            AlgebraKind::Su3 => "su3",
            AlgebraKind::So5 => "so5",
            AlgebraKind::Euclidean2 => "e2",
            AlgebraKind::Su11 => "su11",
        }
    }

    /// Number of Cartan axes used as lattice coordinates.
    pub fn rank(self) -> usize {
        match self {
            AlgebraKind::Su3 | AlgebraKind::So5 => 2,
            _ => 1,
        }
    }

    pub fn root_count(self) -> usize {
        match self {
            AlgebraKind::Su3 => 3,
            AlgebraKind::So5 => 4,
            _ => 1,
        }
    }
}

/// Parity sector of the single-mode su(1,1) realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Su11Sector {
    /// Even boson numbers, Bargmann index 1/4.
    Even,
    /// Odd boson numbers, Bargmann index 3/4.
    Odd,
}

impl Su11Sector {
    pub fn parity(self) -> usize {
        match self {
            Su11Sector::Even => 0,
            Su11Sector::Odd => 1,
        }
    }

    /// Bargmann index `k`.
    pub fn bargmann(self) -> f64 {
        match self {
            Su11Sector::Even => 0.25,
            Su11Sector::Odd => 0.75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgebraParams {
    HeisenbergWeyl { n_max: usize },
    /// Spin `S = two_s / 2`.
    Su2 { two_s: u32 },
    Su3 { n: u32 },
    So5 { n: u32 },
    /// Lattice window `j in [-window, window]`.
    Euclidean2 { window: u32 },
    Su11 { sector: Su11Sector, n_max: usize },
}

impl AlgebraParams {
    pub fn kind(&self) -> AlgebraKind {
        match self {
            AlgebraParams::HeisenbergWeyl { .. } => AlgebraKind::HeisenbergWeyl,
            AlgebraParams::Su2 { .. } => AlgebraKind::Su2,
            AlgebraParams::Su3 { .. } => AlgebraKind::Su3,
            AlgebraParams::So5 { .. } => AlgebraKind::So5,
            AlgebraParams::Euclidean2 { .. } => AlgebraKind::Euclidean2,
            AlgebraParams::Su11 { .. } => AlgebraKind::Su11,
        }
    }

    /// Site count implied by the parameters, or `None` on overflow.
    pub fn site_count(&self) -> Option<usize> {
        match *self {
            AlgebraParams::HeisenbergWeyl { n_max } => n_max.checked_add(1),
            AlgebraParams::Su2 { two_s } => Some(two_s as usize + 1),
            AlgebraParams::Su3 { n } => {
                let n = n as usize;
                (n + 1).checked_mul(n + 2).map(|x| x / 2)
            }
            AlgebraParams::So5 { n } => {
                let n = n as u128;
                let c = (n + 1) * (n + 2) * (n + 3) / 6;
                usize::try_from(c).ok()
            }
            AlgebraParams::Euclidean2 { window } => Some(2 * window as usize + 1),
            AlgebraParams::Su11 { sector, n_max } => Some((n_max - sector.parity()) / 2 + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("parameters describe {params:?} but {requested:?} was requested")]
    KindMismatch { requested: AlgebraKind, params: AlgebraKind },
    #[error("{sites} sites exceed the configured limit of {limit}")]
    TooLarge { sites: usize, limit: usize },
    #[error("{0:?} has no Casimir check")]
    UnsupportedKind(AlgebraKind),
}

/// One nonzero root matrix element `<to| E+ |from> = sqrt(quad_sq) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub from: usize,
    pub to: usize,
    pub quad_sq: u64,
}

/// A diagonal Cartan axis, eigenvalue `numerator * scale` per site.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanAxis {
    pub name: &'static str,
    pub numerators: Vec<i64>,
    pub scale: f64,
}

/// Truncated representation of one algebra on its Fock-state lattice.
#[derive(Debug, Clone)]
pub struct AlgebraRep {
    params: AlgebraParams,
    site_count: usize,
    label_len: usize,
    labels: Vec<i64>,
    cartan: Vec<CartanAxis>,
    cartan_ops: Vec<SparseOperator>,
    ladders: Vec<Vec<Ladder>>,
    root_names: Vec<&'static str>,
    /// Root vector numerators, indexed `[root][axis]`, on the axis scales.
    root_vectors: Vec<Vec<i64>>,
    root_raise: Vec<SparseOperator>,
    root_lower: Vec<SparseOperator>,
    reference_site: Option<usize>,
}

impl AlgebraRep {
    /// Builds the representation described by `params`.
    pub fn build(kind: AlgebraKind, params: AlgebraParams) -> Result<Self, AlgebraError> {
        Self::build_with_limit(kind, params, DEFAULT_MAX_SITES)
    }

    pub fn build_with_limit(kind: AlgebraKind, params: AlgebraParams, max_sites: usize) -> Result<Self, AlgebraError> {
        if params.kind() != kind {
            return Err(AlgebraError::KindMismatch { requested: kind, params: params.kind() });
        }
        validate(&params)?;
        let sites = params.site_count().ok_or(AlgebraError::TooLarge { sites: usize::MAX, limit: max_sites })?;
        if sites > max_sites {
            return Err(AlgebraError::TooLarge { sites, limit: max_sites });
        }
        let raw = match params {
            AlgebraParams::HeisenbergWeyl { n_max } => build_hw(n_max),
            AlgebraParams::Su2 { two_s } => build_su2(two_s),
            AlgebraParams::Su3 { n } => build_su3(n),
            AlgebraParams::So5 { n } => build_so5(n),
            AlgebraParams::Euclidean2 { window } => build_e2(window),
            AlgebraParams::Su11 { sector, n_max } => build_su11(sector, n_max),
        };
        debug_assert_eq!(raw.labels.len(), sites * raw.label_len);
        Ok(raw.finish(params, sites))
    }

    pub fn kind(&self) -> AlgebraKind {
        self.params.kind()
    }

    pub fn params(&self) -> AlgebraParams {
        self.params
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn root_count(&self) -> usize {
        self.ladders.len()
    }

    pub fn coin_dim(&self) -> usize {
        2 * self.root_count()
    }

    /// Total amplitudes of a walker state (`site_count * coin_dim`).
    pub fn state_dim(&self) -> usize {
        self.site_count * self.coin_dim()
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// Label tuple of `site`: HW `n`, su(2) `2l`, su(3) `(n1, n2, n3)`,
    /// so(5) `(n_a_up, n_a_down, n_b_up, n_b_down)`, e(2) `j`, su(1,1) `n`.
    pub fn label(&self, site: usize) -> &[i64] {
        &self.labels[site * self.label_len..(site + 1) * self.label_len]
    }

    pub fn label_len(&self) -> usize {
        self.label_len
    }

    /// Divisor turning stored labels into physical ones (2 for su(2)).
    pub fn label_denominator(&self) -> i64 {
        if self.kind() == AlgebraKind::Su2 {
            2
        } else {
            1
        }
    }

    /// Site index of a stored label tuple.
    pub fn site_index(&self, label: &[i64]) -> Option<usize> {
        if label.len() != self.label_len {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.site_count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.label(mid).cmp(label) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn cartan_axes(&self) -> &[CartanAxis] {
        &self.cartan
    }

    pub fn cartan_ops(&self) -> &[SparseOperator] {
        &self.cartan_ops
    }

    /// Cartan eigenvalue of `site` on `axis`.
    pub fn cartan_value(&self, axis: usize, site: usize) -> f64 {
        let a = &self.cartan[axis];
        a.numerators[site] as f64 * a.scale
    }

    /// Lattice coordinate used for widths: the Cartan eigenvalues, except
    /// su(1,1) which uses the boson number `n`.
    pub fn coordinate(&self, axis: usize, site: usize) -> f64 {
        if self.kind() == AlgebraKind::Su11 {
            self.labels[site] as f64
        } else {
            self.cartan_value(axis, site)
        }
    }

    pub fn root_raise(&self) -> &[SparseOperator] {
        &self.root_raise
    }

    pub fn root_lower(&self) -> &[SparseOperator] {
        &self.root_lower
    }

    pub fn root_name(&self, root: usize) -> &'static str {
        self.root_names[root]
    }

    /// Exact matrix elements of root `root`.
    pub fn ladders(&self, root: usize) -> &[Ladder] {
        &self.ladders[root]
    }

    /// Root vector of `root` in Cartan eigenvalue units.
    pub fn root_vector(&self, root: usize) -> Vec<f64> {
        self.root_vectors[root].iter().zip(&self.cartan).map(|(&r, a)| r as f64 * a.scale).collect()
    }

    pub(crate) fn root_vector_numerators(&self, root: usize) -> &[i64] {
        &self.root_vectors[root]
    }

    /// Site annihilated by every lowering generator, if the algebra has one.
    pub fn reference_site(&self) -> Option<usize> {
        self.reference_site
    }

    /// Steps from `site` to the nearest truncation edge, `usize::MAX` for
    /// representations without truncation.
    pub fn boundary_distance(&self, site: usize) -> usize {
        match self.params {
            AlgebraParams::HeisenbergWeyl { n_max } => n_max - self.labels[site] as usize,
            AlgebraParams::Su11 { n_max, .. } => (n_max - self.labels[site] as usize) / 2,
            AlgebraParams::Euclidean2 { window } => {
                let j = self.labels[site];
                (window as i64 - j.abs()) as usize
            }
            _ => usize::MAX,
        }
    }

    /// Whether the representation truncates an infinite-dimensional algebra.
    pub fn is_truncated(&self) -> bool {
        matches!(
            self.kind(),
            AlgebraKind::HeisenbergWeyl | AlgebraKind::Euclidean2 | AlgebraKind::Su11
        )
    }

    /// Coordinate-triplet text `row col re im` of one raising generator.
    pub fn dump_triplets(&self, root: usize) -> String {
        let mut out = String::new();
        for (r, c, v) in self.root_raise[root].triplets() {
            let _ = writeln!(out, "{r} {c} {:e} {:e}", v.re, v.im);
        }
        out
    }
}

fn validate(params: &AlgebraParams) -> Result<(), AlgebraError> {
    match *params {
        AlgebraParams::HeisenbergWeyl { n_max } if n_max < 1 => Err(AlgebraError::InvalidParams("n_max must be at least 1")),
        AlgebraParams::Su2 { two_s } if two_s < 1 => Err(AlgebraError::InvalidParams("two_s must be at least 1")),
        AlgebraParams::Su3 { n } | AlgebraParams::So5 { n } if n < 1 => {
            Err(AlgebraError::InvalidParams("boson number must be at least 1"))
        }
        AlgebraParams::Euclidean2 { window } if window < 1 => Err(AlgebraError::InvalidParams("window must be at least 1")),
        AlgebraParams::Su11 { sector, n_max } => {
            if n_max < 2 + sector.parity() {
                Err(AlgebraError::InvalidParams("n_max too small for the sector"))
            } else if n_max % 2 != sector.parity() {
                Err(AlgebraError::InvalidParams("n_max parity does not match the sector"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

struct RawRep {
    label_len: usize,
    labels: Vec<i64>,
    cartan: Vec<CartanAxis>,
    ladders: Vec<Vec<Ladder>>,
    root_names: Vec<&'static str>,
    root_vectors: Vec<Vec<i64>>,
    reference_site: Option<usize>,
}

impl RawRep {
    fn finish(self, params: AlgebraParams, site_count: usize) -> AlgebraRep {
        let cartan_ops = self
            .cartan
            .iter()
            .map(|a| {
                let d: Vec<f64> = a.numerators.iter().map(|&x| x as f64 * a.scale).collect();
                SparseOperator::diagonal(&d)
            })
            .collect();
        let root_raise: Vec<SparseOperator> = self
            .ladders
            .iter()
            .map(|l| {
                let t: Vec<_> = l.iter().map(|e| (e.to, e.from, C64::new(entry_value(e.quad_sq), 0.0))).collect();
                SparseOperator::from_triplets(site_count, site_count, &t).expect("ladder entries are unique")
            })
            .collect();
        let root_lower = root_raise.iter().map(|op| op.adjoint()).collect();
        AlgebraRep {
            params,
            site_count,
            label_len: self.label_len,
            labels: self.labels,
            cartan: self.cartan,
            cartan_ops,
            ladders: self.ladders,
            root_names: self.root_names,
            root_vectors: self.root_vectors,
            root_raise,
            root_lower,
            reference_site: self.reference_site,
        }
    }
}

/// `sqrt(q) / 2`, correctly rounded up to the final halving.
pub(crate) fn entry_value(quad_sq: u64) -> f64 {
    (quad_sq as f64).sqrt() * 0.5
}

fn build_hw(n_max: usize) -> RawRep {
    let labels: Vec<i64> = (0..=n_max as i64).collect();
    let ladder = (0..n_max).map(|n| Ladder { from: n, to: n + 1, quad_sq: 4 * (n as u64 + 1) }).collect();
    RawRep {
        label_len: 1,
        cartan: alloc::vec![CartanAxis { name: "n", numerators: labels.clone(), scale: 1.0 }],
        labels,
        ladders: alloc::vec![ladder],
        root_names: alloc::vec!["a+"],
        root_vectors: alloc::vec![alloc::vec![1]],
        reference_site: Some(0),
    }
}

fn build_su2(two_s: u32) -> RawRep {
    let ts = two_s as i64;
    // 2l = -2S, -2S + 2, ..., 2S
    let labels: Vec<i64> = (0..=ts).map(|k| -ts + 2 * k).collect();
    let ladder = (0..two_s as usize)
        .map(|k| {
            let tl = labels[k];
            let q = ts * (ts + 2) - tl * (tl + 2);
            Ladder { from: k, to: k + 1, quad_sq: q as u64 }
        })
        .collect();
    RawRep {
        label_len: 1,
        cartan: alloc::vec![CartanAxis { name: "Sz", numerators: labels.clone(), scale: 0.5 }],
        labels,
        ladders: alloc::vec![ladder],
        root_names: alloc::vec!["S+"],
        root_vectors: alloc::vec![alloc::vec![2]],
        reference_site: Some(0),
    }
}

/// Hopping `x^dagger y` between boson modes on lexicographically sorted labels.
fn boson_ladder(labels: &[i64], width: usize, x: usize, y: usize) -> Vec<Ladder> {
    let sites = labels.len() / width;
    let find = |target: &[i64]| -> usize {
        let (mut lo, mut hi) = (0usize, sites);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match labels[mid * width..(mid + 1) * width].cmp(target) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return mid,
            }
        }
        unreachable!("boson hop stays on the lattice")
    };
    let mut out = Vec::new();
    let mut target = alloc::vec![0i64; width];
    for s in 0..sites {
        let l = &labels[s * width..(s + 1) * width];
        if l[y] == 0 {
            continue;
        }
        target.copy_from_slice(l);
        target[x] += 1;
        target[y] -= 1;
        let q = 4 * (l[x] as u64 + 1) * l[y] as u64;
        out.push(Ladder { from: s, to: find(&target), quad_sq: q });
    }
    out
}

fn build_su3(n: u32) -> RawRep {
    let n = n as i64;
    let mut labels = Vec::new();
    for n1 in 0..=n {
        for n2 in 0..=(n - n1) {
            labels.extend_from_slice(&[n1, n2, n - n1 - n2]);
        }
    }
    let sites = labels.len() / 3;
    let c1 = (0..sites).map(|s| labels[3 * s] - labels[3 * s + 1]).collect();
    let c2 = (0..sites).map(|s| labels[3 * s] + labels[3 * s + 1] - 2 * labels[3 * s + 2]).collect();
    let ladders = alloc::vec![
        boson_ladder(&labels, 3, 0, 1),
        boson_ladder(&labels, 3, 1, 2),
        boson_ladder(&labels, 3, 0, 2),
    ];
    RawRep {
        label_len: 3,
        cartan: alloc::vec![
            CartanAxis { name: "C1", numerators: c1, scale: 1.0 },
            CartanAxis { name: "C2", numerators: c2, scale: 1.0 / 3f64.sqrt() },
        ],
        labels,
        ladders,
        root_names: alloc::vec!["a1+a2", "a2+a3", "a1+a3"],
        root_vectors: alloc::vec![alloc::vec![2, 0], alloc::vec![-1, 3], alloc::vec![1, 3]],
        // (0, 0, N) is the first label in lexicographic order
        reference_site: Some(0),
    }
}

fn build_so5(n: u32) -> RawRep {
    let n = n as i64;
    let mut labels = Vec::new();
    for a_up in 0..=n {
        for a_dn in 0..=(n - a_up) {
            for b_up in 0..=(n - a_up - a_dn) {
                labels.extend_from_slice(&[a_up, a_dn, b_up, n - a_up - a_dn - b_up]);
            }
        }
    }
    let sites = labels.len() / 4;
    let h1 = (0..sites).map(|s| labels[4 * s] - labels[4 * s + 1]).collect();
    let h2 = (0..sites).map(|s| labels[4 * s + 2] - labels[4 * s + 3]).collect();
    let ladders = alloc::vec![
        boson_ladder(&labels, 4, 0, 1),
        boson_ladder(&labels, 4, 2, 3),
        boson_ladder(&labels, 4, 0, 3),
        boson_ladder(&labels, 4, 1, 2),
    ];
    RawRep {
        label_len: 4,
        cartan: alloc::vec![
            CartanAxis { name: "H1", numerators: h1, scale: 0.5 },
            CartanAxis { name: "H2", numerators: h2, scale: 0.5 },
        ],
        labels,
        ladders,
        root_names: alloc::vec!["au+ad", "bu+bd", "au+bd", "ad+bu"],
        root_vectors: alloc::vec![
            alloc::vec![2, 0],
            alloc::vec![0, 2],
            alloc::vec![1, 1],
            // a_dn^dagger b_up lowers both H1 and H2
            alloc::vec![-1, -1],
        ],
        reference_site: Some(0),
    }
}

fn build_e2(window: u32) -> RawRep {
    let w = window as i64;
    let labels: Vec<i64> = (-w..=w).collect();
    let ladder = (0..2 * window as usize).map(|k| Ladder { from: k, to: k + 1, quad_sq: 4 }).collect();
    RawRep {
        label_len: 1,
        cartan: alloc::vec![CartanAxis { name: "j", numerators: labels.clone(), scale: 1.0 }],
        labels,
        ladders: alloc::vec![ladder],
        root_names: alloc::vec!["E+"],
        root_vectors: alloc::vec![alloc::vec![1]],
        reference_site: None,
    }
}

fn build_su11(sector: Su11Sector, n_max: usize) -> RawRep {
    let p = sector.parity() as i64;
    let labels: Vec<i64> = (0..).map(|k| p + 2 * k).take_while(|&x| x <= n_max as i64).collect();
    // K0 = (2n + 1) / 4
    let k0 = labels.iter().map(|&x| 2 * x + 1).collect();
    let ladder = (0..labels.len() - 1)
        .map(|k| {
            let x = labels[k] as u64;
            Ladder { from: k, to: k + 1, quad_sq: (x + 1) * (x + 2) }
        })
        .collect();
    RawRep {
        label_len: 1,
        cartan: alloc::vec![CartanAxis { name: "K0", numerators: k0, scale: 0.25 }],
        labels,
        ladders: alloc::vec![ladder],
        root_names: alloc::vec!["K+"],
        root_vectors: alloc::vec![alloc::vec![4]],
        reference_site: Some(0),
    }
}
