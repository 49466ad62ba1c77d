use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{entry_value, AlgebraError, AlgebraKind, AlgebraParams, AlgebraRep};

/// Outcome of one defining relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub name: String,
    /// Relation holds in exact integer arithmetic on every checked site.
    pub exact: bool,
    /// Deviation of the represented operators: zero when `exact`, otherwise
    /// the floating point residual.
    pub max_abs_error: f64,
    /// Residual of the same relation evaluated with the stored `f64` entries.
    pub float_residual: f64,
    pub sites_checked: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorReport {
    pub relations: Vec<RelationCheck>,
    /// Every lowering generator maps the reference site to zero.
    pub reference_annihilated: Option<bool>,
    /// Largest relative rounding error of a stored root matrix element.
    pub max_entry_relative_error: f64,
}

impl CommutatorReport {
    pub fn all_exact(&self) -> bool {
        self.relations.iter().all(|r| r.exact) && self.reference_annihilated != Some(false)
    }

    pub fn max_abs_error(&self) -> f64 {
        self.relations.iter().map(|r| r.max_abs_error).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirReport {
    /// Relation holds exactly on every site.
    pub exact: bool,
    /// su(2): largest `|C - S(S+1)|` from the stored entries; boson algebras:
    /// largest label-sum deviation.
    pub max_abs_error: f64,
    /// Expected eigenvalue (`S(S+1)` or `N`).
    pub expected: f64,
}

/// Boson modes `(x, y)` of each root `x^dagger y`.
fn boson_modes(kind: AlgebraKind) -> &'static [(usize, usize)] {
    match kind {
        AlgebraKind::Su3 => &[(0, 1), (1, 2), (0, 2)],
        AlgebraKind::So5 => &[(0, 1), (2, 3), (0, 3), (1, 2)],
        _ => &[],
    }
}

impl AlgebraRep {
    /// Checks every defining commutator on sites at least `interior_margin`
    /// steps from a truncation edge.
    pub fn verify_commutators(&self, interior_margin: usize) -> CommutatorReport {
        let n = self.site_count();
        let interior: Vec<bool> = (0..n).map(|s| self.boundary_distance(s) >= interior_margin).collect();
        let mut relations = Vec::new();
        let mut max_entry_rel: f64 = 0.0;

        for root in 0..self.root_count() {
            let ladders = self.ladders(root);
            let raise = &self.root_raise()[root];
            let lower = &self.root_lower()[root];
            let name = self.root_name(root);

            // adjoint pairing
            let adj_ok = ladders.iter().all(|e| {
                let v = raise.get(e.to, e.from);
                lower.get(e.from, e.to) == v.conj() && v.re == entry_value(e.quad_sq)
            }) && lower.nnz() == ladders.len();
            relations.push(RelationCheck {
                name: format!("E- = (E+)^dagger [{name}]"),
                exact: adj_ok,
                max_abs_error: if adj_ok { 0.0 } else { f64::INFINITY },
                float_residual: 0.0,
                sites_checked: n,
            });

            for e in ladders {
                if e.quad_sq > 0 {
                    let v = entry_value(e.quad_sq);
                    let rel = ((4.0 * v * v - e.quad_sq as f64) / e.quad_sq as f64).abs() * 0.5;
                    max_entry_rel = max_entry_rel.max(rel);
                }
            }

            // [E+, E-] is diagonal when each row and column holds at most one entry
            let mut in_q = alloc::vec![0i128; n];
            let mut out_q = alloc::vec![0i128; n];
            let mut in_f = alloc::vec![0f64; n];
            let mut out_f = alloc::vec![0f64; n];
            let mut in_count = alloc::vec![0u8; n];
            let mut out_count = alloc::vec![0u8; n];
            for e in ladders {
                let v = entry_value(e.quad_sq);
                in_q[e.to] += e.quad_sq as i128;
                out_q[e.from] += e.quad_sq as i128;
                in_f[e.to] += v * v;
                out_f[e.from] += v * v;
                in_count[e.to] = in_count[e.to].saturating_add(1);
                out_count[e.from] = out_count[e.from].saturating_add(1);
            }
            let diagonal = in_count.iter().chain(&out_count).all(|&c| c <= 1);
            let mut exact = diagonal;
            let mut residual: f64 = 0.0;
            let mut checked = 0;
            for s in 0..n {
                if !interior[s] {
                    continue;
                }
                checked += 1;
                let target4 = self.diagonal_target4(root, s);
                if in_q[s] - out_q[s] != target4 {
                    exact = false;
                }
                residual = residual.max((in_f[s] - out_f[s] - target4 as f64 / 4.0).abs());
            }
            relations.push(RelationCheck {
                name: format!("[E+, E-] = {} [{name}]", self.diagonal_target_name()),
                exact,
                max_abs_error: if exact { 0.0 } else { residual },
                float_residual: residual,
                sites_checked: checked,
            });

            // [C_a, E+] = r_a E+
            for (axis, cartan) in self.cartan_axes().iter().enumerate() {
                let r = self.root_vector_numerators(root)[axis];
                let mut exact = true;
                let mut residual: f64 = 0.0;
                for e in ladders {
                    let d = cartan.numerators[e.to] - cartan.numerators[e.from];
                    if d != r {
                        exact = false;
                    }
                    let v = entry_value(e.quad_sq);
                    let lhs = (cartan.numerators[e.to] as f64 * cartan.scale
                        - cartan.numerators[e.from] as f64 * cartan.scale)
                        * v;
                    residual = residual.max((lhs - r as f64 * cartan.scale * v).abs());
                }
                relations.push(RelationCheck {
                    name: format!("[{}, E+] = r E+ [{name}]", cartan.name),
                    exact,
                    max_abs_error: if exact { 0.0 } else { residual },
                    float_residual: residual,
                    sites_checked: ladders.len(),
                });
            }
        }

        if self.kind() == AlgebraKind::Su3 {
            relations.push(self.su3_cross_relation(&interior));
        }

        let reference_annihilated = self.reference_site().map(|r| {
            (0..self.root_count()).all(|root| self.ladders(root).iter().all(|e| e.to != r))
                && self.root_lower().iter().all(|op| op.triplets().all(|(_, c, _)| c != r))
        });

        CommutatorReport { relations, reference_annihilated, max_entry_relative_error: max_entry_rel }
    }

    /// Four times the expected diagonal of `[E+, E-]` at `site`.
    fn diagonal_target4(&self, root: usize, site: usize) -> i128 {
        let label = self.label(site);
        match self.kind() {
            AlgebraKind::HeisenbergWeyl => -4,
            AlgebraKind::Su2 => 4 * label[0] as i128,
            AlgebraKind::Su3 | AlgebraKind::So5 => {
                let (x, y) = boson_modes(self.kind())[root];
                4 * (label[x] - label[y]) as i128
            }
            AlgebraKind::Euclidean2 => 0,
            AlgebraKind::Su11 => -(4 * label[0] as i128 + 2),
        }
    }

    fn diagonal_target_name(&self) -> &'static str {
        match self.kind() {
            AlgebraKind::HeisenbergWeyl => "-1",
            AlgebraKind::Su2 => "2 Sz",
            AlgebraKind::Su3 | AlgebraKind::So5 => "n_x - n_y",
            AlgebraKind::Euclidean2 => "0",
            AlgebraKind::Su11 => "-2 K0",
        }
    }

    /// `[E+a1, E+a2] = E+a3` checked entrywise as `sqrt(P) - sqrt(Q) = sqrt(R)`.
    fn su3_cross_relation(&self, interior: &[bool]) -> RelationCheck {
        let n = self.site_count();
        let step = |root: usize| -> Vec<Option<(usize, u64)>> {
            let mut m = alloc::vec![None; n];
            for e in self.ladders(root) {
                m[e.from] = Some((e.to, e.quad_sq));
            }
            m
        };
        let (e1, e2, e3) = (step(0), step(1), step(2));
        let mut exact = true;
        let mut residual: f64 = 0.0;
        let mut checked = 0;
        for s in 0..n {
            if !interior[s] {
                continue;
            }
            checked += 1;
            // E1 E2 |s> and E2 E1 |s>, products of entries sqrt(q1) sqrt(q2) / 4
            let p = e2[s].and_then(|(t, q2)| e1[t].map(|(u, q1)| (u, q1 as i128 * q2 as i128)));
            let q = e1[s].and_then(|(t, q1)| e2[t].map(|(u, q2)| (u, q1 as i128 * q2 as i128)));
            let r = e3[s].map(|(u, q3)| (u, 4 * q3 as i128));
            let target = p.map(|x| x.0).or(q.map(|x| x.0)).or(r.map(|x| x.0));
            let (pp, qq, rr) = (p.map_or(0, |x| x.1), q.map_or(0, |x| x.1), r.map_or(0, |x| x.1));
            let same_target = [p.map(|x| x.0), q.map(|x| x.0), r.map(|x| x.0)]
                .iter()
                .all(|t| t.is_none() || *t == target);
            let d = pp - qq - rr;
            let ok = same_target && pp >= qq && d >= 0 && d * d == 4 * qq * rr;
            if !ok {
                exact = false;
            }
            let f = |x: i128| (x as f64).sqrt() / 4.0;
            residual = residual.max((f(pp) - f(qq) - f(rr)).abs());
        }
        RelationCheck {
            name: String::from("[E+a1, E+a2] = E+a3"),
            exact,
            max_abs_error: if exact { 0.0 } else { residual },
            float_residual: residual,
            sites_checked: checked,
        }
    }

    /// su(2): `Sx^2 + Sy^2 + Sz^2 = S(S+1)`; su(3) and so(5): labels sum to `N`.
    pub fn casimir_check(&self) -> Result<CasimirReport, AlgebraError> {
        match self.params() {
            AlgebraParams::Su2 { two_s } => {
                let ts = two_s as i128;
                let n = self.site_count();
                let mut in_q = alloc::vec![0i128; n];
                let mut out_q = alloc::vec![0i128; n];
                for e in self.ladders(0) {
                    in_q[e.to] += e.quad_sq as i128;
                    out_q[e.from] += e.quad_sq as i128;
                }
                let s = two_s as f64 / 2.0;
                let expected = s * (s + 1.0);
                let mut exact = true;
                let mut err: f64 = 0.0;
                for site in 0..n {
                    let tl = self.label(site)[0] as i128;
                    // 8 C = (in + out) + 2 (2l)^2 with in, out = 4 |S+ entry|^2
                    if in_q[site] + out_q[site] + 2 * tl * tl != 2 * ts * (ts + 2) {
                        exact = false;
                    }
                    let l = tl as f64 / 2.0;
                    let vin = self.root_lower()[0].row(site).map(|(_, v)| v.norm_sqr()).sum::<f64>();
                    let vout = self.root_raise()[0].row(site).map(|(_, v)| v.norm_sqr()).sum::<f64>();
                    let c = (vin + vout) / 2.0 + l * l;
                    err = err.max((c - expected).abs());
                }
                Ok(CasimirReport { exact, max_abs_error: err, expected })
            }
            AlgebraParams::Su3 { n } | AlgebraParams::So5 { n } => {
                let mut worst = 0i64;
                for site in 0..self.site_count() {
                    let sum: i64 = self.label(site).iter().sum();
                    worst = worst.max((sum - n as i64).abs());
                }
                Ok(CasimirReport { exact: worst == 0, max_abs_error: worst as f64, expected: n as f64 })
            }
            _ => Err(AlgebraError::UnsupportedKind(self.kind())),
        }
    }
}
