//! Comparison of the lattice action with the continuum Yang–Mills–Higgs
//! functional on the unit torus.
//!
//! Links are `L_e = exp(i l A_μ(m_e))` with `m_e` the edge midpoint and
//! `D_v = Φ(x_v)`. Each sector of the lattice action, multiplied by
//! `l^{d−4}`, is compared with
//!
//! ```text
//! gauge    ⅛ ∫ Σ_{μν} tr F_{μν}²         F = ∂_μA_ν − ∂_νA_μ − i[A_μ, A_ν]
//! kinetic  ½ ∫ Σ_μ tr (D_μΦ)²            D_μΦ = ∂_μΦ − i[A_μ, Φ]
//! mass     d Λ² ∫ tr Φ²                  Λ = 1/l
//! quartic  ∫ tr Φ⁴
//! ```
//!
//! where the lattice gauge sector is the Wilson part minus its vacuum value,
//! kinetic is hopping plus half the mass term, and mass is the other half.

use std::f64::consts::PI;

use serde::Serialize;

use super::local_parts;
use crate::error::{Error, Result};
use crate::num::{self, ComplexMatrix, I, ONE, ZERO};
use crate::quiver::{build_lattice, QuiverRep};

pub const SECTORS: [&str; 5] = ["gauge", "kinetic", "mass", "quartic", "total"];

/// Smooth single-mode fixture of rank `n ∈ {1, 2}`: `A_1 = a sin(2πx_0) T`,
/// other components zero, and `Φ = (m + b cos(2πx_1)) P`, where `T = P = 1`
/// for `n = 1` and `T = σ_1`, `P = σ_3` for `n = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fixture {
    pub rank: usize,
    pub gauge_amplitude: f64,
    pub higgs_mean: f64,
    pub higgs_amplitude: f64,
}

impl Default for Fixture {
    fn default() -> Self {
        Self {
            rank: 2,
            gauge_amplitude: 0.3,
            higgs_mean: 0.5,
            higgs_amplitude: 0.2,
        }
    }
}

fn sigma(k: usize) -> ComplexMatrix {
    let (a, b, c, d) = match k {
        1 => (ZERO, ONE, ONE, ZERO),
        2 => (ZERO, -I, I, ZERO),
        _ => (ONE, ZERO, ZERO, -ONE),
    };
    ComplexMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn real(m: ComplexMatrix, s: f64) -> ComplexMatrix {
    m * num_complex::Complex64::new(s, 0.0)
}

impl Fixture {
    /// `U(1)` gauge field alone.
    pub fn abelian_gauge() -> Self {
        Self {
            rank: 1,
            gauge_amplitude: 0.3,
            higgs_mean: 0.0,
            higgs_amplitude: 0.0,
        }
    }

    /// `U(2)` Higgs field on trivial links.
    pub fn higgs_only() -> Self {
        Self {
            gauge_amplitude: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.rank) {
            return Err(Error::Unsupported(format!("fixture rank {} (1 or 2)", self.rank)));
        }
        Ok(())
    }

    fn generator(&self) -> ComplexMatrix {
        if self.rank == 1 {
            num::identity(1)
        } else {
            sigma(1)
        }
    }

    fn higgs_direction(&self) -> ComplexMatrix {
        if self.rank == 1 {
            num::identity(1)
        } else {
            sigma(3)
        }
    }

    fn zero(&self) -> ComplexMatrix {
        num::zeros(self.rank, self.rank)
    }

    pub fn gauge(&self, mu: usize, x: &[f64]) -> ComplexMatrix {
        if mu == 1 {
            real(self.generator(), self.gauge_amplitude * (2.0 * PI * x[0]).sin())
        } else {
            self.zero()
        }
    }

    /// `∂_ν A_μ`.
    pub fn gauge_derivative(&self, nu: usize, mu: usize, x: &[f64]) -> ComplexMatrix {
        if mu == 1 && nu == 0 {
            real(
                self.generator(),
                2.0 * PI * self.gauge_amplitude * (2.0 * PI * x[0]).cos(),
            )
        } else {
            self.zero()
        }
    }

    pub fn higgs(&self, x: &[f64]) -> ComplexMatrix {
        real(
            self.higgs_direction(),
            self.higgs_mean + self.higgs_amplitude * (2.0 * PI * x[1]).cos(),
        )
    }

    pub fn higgs_derivative(&self, mu: usize, x: &[f64]) -> ComplexMatrix {
        if mu == 1 {
            real(
                self.higgs_direction(),
                -2.0 * PI * self.higgs_amplitude * (2.0 * PI * x[1]).sin(),
            )
        } else {
            self.zero()
        }
    }

    fn field_strength(&self, mu: usize, nu: usize, x: &[f64]) -> ComplexMatrix {
        let (am, an) = (self.gauge(mu, x), self.gauge(nu, x));
        let comm = &am * &an - &an * &am;
        self.gauge_derivative(mu, nu, x) - self.gauge_derivative(nu, mu, x) - comm * I
    }

    fn covariant_derivative(&self, mu: usize, x: &[f64]) -> ComplexMatrix {
        let (a, p) = (self.gauge(mu, x), self.higgs(x));
        let comm = &a * &p - &p * &a;
        self.higgs_derivative(mu, x) - comm * I
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuumRow {
    pub size: usize,
    pub spacing: f64,
    pub sector: String,
    pub lattice: f64,
    pub continuum: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub sector: String,
    pub from_size: usize,
    pub to_size: usize,
    /// `None` when either error is at rounding level.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuumStudy {
    pub d: usize,
    pub fixture: Fixture,
    pub rows: Vec<ContinuumRow>,
    pub orders: Vec<OrderEstimate>,
}

impl ContinuumStudy {
    pub fn row(&self, size: usize, sector: &str) -> Option<&ContinuumRow> {
        self.rows.iter().find(|r| r.size == size && r.sector == sector)
    }
}

/// Refinement ladders: halvings of `l` from `L = 4` for `d = 2`, and
/// 3, 4, 6, 8 for `d = 4`, truncated to `levels` entries.
pub fn ladder(d: usize, levels: usize) -> Vec<usize> {
    match d {
        4 => [3, 4, 6, 8].into_iter().take(levels).collect(),
        _ => (0..levels).map(|k| 4 << k).collect(),
    }
}

pub fn default_sizes(d: usize) -> Vec<usize> {
    ladder(d, 3)
}

/// Midpoint rule on the `(4L)^d` grid.
fn continuum_values(fx: &Fixture, d: usize, size: usize) -> [f64; 4] {
    let m = 4 * size;
    let h = 1.0 / m as f64;
    let total = m.pow(d as u32);
    let mut acc = [0.0; 4];
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut r = idx;
        for c in (0..d).rev() {
            x[c] = ((r % m) as f64 + 0.5) * h;
            r /= m;
        }
        let mut f2 = 0.0;
        let mut kin = 0.0;
        for mu in 0..d {
            for nu in 0..d {
                let f = fx.field_strength(mu, nu, &x);
                f2 += num::trace(&(&f * &f)).re;
            }
            let dp = fx.covariant_derivative(mu, &x);
            kin += num::trace(&(&dp * &dp)).re;
        }
        let p = fx.higgs(&x);
        let p2 = &p * &p;
        acc[0] += f2 / 8.0;
        acc[1] += kin / 2.0;
        acc[2] += num::trace(&p2).re;
        acc[3] += num::trace(&(&p2 * &p2)).re;
    }
    let vol = h.powi(d as i32);
    let l = 1.0 / size as f64;
    [
        acc[0] * vol,
        acc[1] * vol,
        acc[2] * vol * d as f64 / (l * l),
        acc[3] * vol,
    ]
}

fn lattice_values(fx: &Fixture, d: usize, size: usize) -> Result<[f64; 4]> {
    let l = 1.0 / size as f64;
    let eq = build_lattice(d, size, l, true)?;
    let mut links = Vec::with_capacity(eq.quiver.num_edges());
    for (e, &(s, _)) in eq.quiver.edges.iter().enumerate() {
        let mu = eq.axis(e).expect("lattice edge");
        let mut mid = eq.positions[s].clone();
        mid[mu] += 0.5 * l;
        links.push(num::expi_hermitian(&fx.gauge(mu, &mid), l)?);
    }
    let mut rep = QuiverRep::from_links(&eq.quiver, links)?;
    for v in 0..eq.quiver.num_vertices {
        rep.set_dirac(v, fx.higgs(&eq.positions[v]))?;
    }
    let parts = local_parts(&eq, &rep)?;
    let vacuum_wilson = -0.5 * fx.rank as f64 * eq.plaquettes.len() as f64;
    let scale = l.powi(d as i32 - 4);
    Ok([
        (parts.wilson_part - vacuum_wilson) * scale,
        (parts.higgs_hopping + 0.5 * parts.higgs_mass) * scale,
        0.5 * parts.higgs_mass * scale,
        parts.higgs_quartic * scale,
    ])
}

/// Relative error, falling back to the absolute error when the continuum
/// value vanishes.
fn rel_error(lattice: f64, continuum: f64) -> f64 {
    let diff = (lattice - continuum).abs();
    if continuum.abs() < 1e-14 {
        diff
    } else {
        diff / continuum.abs()
    }
}

/// Sector-by-sector comparison along a ladder of lattice sizes.
pub fn continuum_study(d: usize, sizes: &[usize], fixture: &Fixture) -> Result<ContinuumStudy> {
    if !d.is_multiple_of(2) || !(2..=4).contains(&d) {
        return Err(Error::Unsupported(format!(
            "continuum study needs a grading, so d must be 2 or 4, got {d}"
        )));
    }
    fixture.validate()?;
    if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
        return Err(Error::InvalidInput("continuum sizes must be >= 2".into()));
    }
    let mut rows = Vec::new();
    for &size in sizes {
        let lat = lattice_values(fixture, d, size)?;
        let con = continuum_values(fixture, d, size);
        let spacing = 1.0 / size as f64;
        let mut push = |sector: &str, a: f64, b: f64| {
            rows.push(ContinuumRow {
                size,
                spacing,
                sector: sector.to_string(),
                lattice: a,
                continuum: b,
                rel_error: rel_error(a, b),
            })
        };
        for k in 0..4 {
            push(SECTORS[k], lat[k], con[k]);
        }
        push("total", lat.iter().sum(), con.iter().sum());
    }
    let mut orders = Vec::new();
    for w in sizes.windows(2) {
        for sector in SECTORS {
            let find = |s: usize| rows.iter().find(|r| r.size == s && r.sector == sector).expect("row");
            let (a, b) = (find(w[0]), find(w[1]));
            let order = (a.rel_error > 1e-12 && b.rel_error > 1e-12)
                .then(|| (a.rel_error / b.rel_error).ln() / (w[1] as f64 / w[0] as f64).ln());
            orders.push(OrderEstimate {
                sector: sector.to_string(),
                from_size: w[0],
                to_size: w[1],
                order,
            });
        }
    }
    Ok(ContinuumStudy {
        d,
        fixture: *fixture,
        rows,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_sector_matches_difference_quotient() {
        // The gauge field varies along x_0 only, so each plaquette angle is
        // l·(A(x+l) − A(x)) and the relative error is 1 − sinc²(πl).
        let fx = Fixture::abelian_gauge();
        let st = continuum_study(2, &[4, 8], &fx).unwrap();
        for size in [4usize, 8] {
            let z = PI / size as f64;
            let predicted = 1.0 - (z.sin() / z).powi(2);
            let err = st.row(size, "gauge").unwrap().rel_error;
            assert!((err - predicted).abs() < 5e-3, "L={size}: {err} vs {predicted}");
        }
    }

    #[test]
    fn second_order_in_two_dimensions() {
        let st = continuum_study(2, &default_sizes(2), &Fixture::default()).unwrap();
        for o in &st.orders {
            if o.sector == "gauge" || o.sector == "kinetic" {
                let p = o.order.unwrap();
                assert!((p - 2.0).abs() < 0.3, "{}: {p}", o.sector);
            }
        }
        assert!(st.row(16, "quartic").unwrap().rel_error < 1e-10);
        assert!(st.row(16, "mass").unwrap().rel_error < 1e-10);
    }

    #[test]
    fn covariant_derivative_sign() {
        // With A_1 = aσ_1 and Φ = φσ_3, D_1Φ = ∂_1Φ − 2aφσ_2.
        let fx = Fixture::default();
        let x = [0.1, 0.3];
        let a = fx.gauge_amplitude * (2.0 * PI * x[0]).sin();
        let phi = fx.higgs_mean + fx.higgs_amplitude * (2.0 * PI * x[1]).cos();
        let expected = fx.higgs_derivative(1, &x) - real(sigma(2), 2.0 * a * phi);
        assert!(num::max_abs_diff(&fx.covariant_derivative(1, &x), &expected) < 1e-14);
    }

    #[test]
    fn vacuum_fixture_is_zero() {
        let fx = Fixture {
            rank: 2,
            gauge_amplitude: 0.0,
            higgs_mean: 0.0,
            higgs_amplitude: 0.0,
        };
        let st = continuum_study(2, &[2, 4], &fx).unwrap();
        for r in &st.rows {
            assert_eq!(r.continuum, 0.0);
            assert!(r.lattice.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn higgs_kinetic_matches_laplacian() {
        let st = continuum_study(2, &default_sizes(2), &Fixture::higgs_only()).unwrap();
        let errs: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&s| st.row(s, "kinetic").unwrap().rel_error)
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(st
            .orders
            .iter()
            .filter(|o| o.sector == "kinetic")
            .all(|o| o.order.unwrap() >= 1.5));
        assert_eq!(st.row(4, "gauge").unwrap().lattice, 0.0);
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(matches!(
            continuum_study(3, &[3], &Fixture::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
