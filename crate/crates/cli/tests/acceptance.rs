//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gaugenet::action::continuum::{continuum_study, Fixture};
use gaugenet::action::mc::{metropolis, MCParams};
use gaugenet::action::{exact_for, ks_magnetic, randomize_higgs, spectral_action_closed, wilson_action};
use gaugenet::dirac::{assemble, spectrum};
use gaugenet::finalg::{canonical_morphism, enumerate_bratteli, enumerate_unital, hom_descriptor, AlgebraObject};
use gaugenet::network::{enumerate_networks, evolution_phase, hamiltonian_energy, NetworkFrame};
use gaugenet::num::{self, clifford, rng_from_seed, ComplexMatrix};
use gaugenet::quiver::{build_lattice, gauge_act, plaquette_holonomy, GaugeTransform, Quiver, QuiverRep};
use gaugenet::repthy::{
    casimir, casimir_explicit, decompose, explicit, invariant_character, invariant_dim, tensor_decompose,
    weight_multiplicities, weyl_dim, HighestWeight, TorusEmbedding,
};
use num_complex::Complex64;

const TOL_CLOSED_FORM: f64 = 1e-9;
const TOL_GAUGE_ACTION: f64 = 1e-9;
const TOL_DIRAC_COVARIANCE: f64 = 1e-10;
const MIN_CONTINUUM_ORDER: f64 = 1.5;
const TOL_CASIMIR: f64 = 1e-8;
const TOL_PHASE: f64 = 1e-12;
const TOL_FOURIER: f64 = 1e-9;
const TOL_KS: f64 = 1e-9;
const MC_SIGMAS: f64 = 3.0;
const MC_SWEEPS: usize = 100_000;

const DRAWS: usize = 20;
const GAUGE_TRANSFORMS: usize = 50;
const KS_CONFIGS: usize = 20;

type Outcome = Result<String, String>;
type DiagramSet = BTreeSet<Vec<Vec<usize>>>;
type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hw(v: &[i64]) -> HighestWeight {
    HighestWeight::new(v.to_vec()).unwrap()
}

/// 20 Haar link draws with random Higgs blocks at d = 4, L = 3.
fn closed_form() -> Outcome {
    let cs = clifford(4).unwrap();
    let eq = build_lattice(4, 3, 0.8, true).unwrap();
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for n in [1, 2] {
        let mut rng = rng_from_seed(1000 + n as u64);
        for k in 0..DRAWS {
            let start = Instant::now();
            let mut rep = QuiverRep::haar_links(&eq.quiver, n, &mut rng).unwrap();
            randomize_higgs(&mut rep, 0.5, &mut rng).unwrap();
            let closed = spectral_action_closed(&eq, &rep, &cs).unwrap();
            let exact = exact_for(&eq, &rep, &cs).unwrap();
            let diff = (closed.total - exact.normalized).abs();
            ensure(diff < TOL_CLOSED_FORM, || {
                format!("N={n} draw {k}: |closed - exact| = {diff:e}")
            })?;
            ensure((closed.total - closed.parts_sum()).abs() < TOL_CLOSED_FORM, || {
                format!("N={n} draw {k}: breakdown does not add up")
            })?;
            worst = worst.max(diff);
            slowest = slowest.max(start.elapsed());
        }
    }
    ensure(slowest < Duration::from_secs(60), || {
        format!("slowest draw took {slowest:?}")
    })?;
    Ok(format!(
        "max delta {worst:.2e} over {} draws, slowest {slowest:.2?}",
        2 * DRAWS
    ))
}

fn gauge() -> Outcome {
    let mut worst_action: f64 = 0.0;
    let mut worst_dirac: f64 = 0.0;
    for (d, size, seed) in [(4usize, 2usize, 21u64), (3, 3, 22)] {
        let cs = clifford(d).unwrap();
        let eq = build_lattice(d, size, 0.7, true).unwrap();
        let q = &eq.quiver;
        let mut rng = rng_from_seed(seed);
        let mut rep = QuiverRep::haar_links(q, 2, &mut rng).unwrap();
        if cs.grading.is_some() {
            randomize_higgs(&mut rep, 0.4, &mut rng).unwrap();
        }
        let s0 = exact_for(&eq, &rep, &cs).unwrap().normalized;
        let c0 = spectral_action_closed(&eq, &rep, &cs).unwrap().total;
        let w0 = wilson_action(&rep, &eq).unwrap();
        let ld = assemble(&eq, &rep, &cs).unwrap();
        for _ in 0..GAUGE_TRANSFORMS {
            let g = GaugeTransform::random(&rep, &mut rng);
            let acted = gauge_act(q, &rep, &g).unwrap();
            let ds = [
                exact_for(&eq, &acted, &cs).unwrap().normalized - s0,
                spectral_action_closed(&eq, &acted, &cs).unwrap().total - c0,
                wilson_action(&acted, &eq).unwrap() - w0,
            ];
            worst_action = ds.iter().fold(worst_action, |m, x| m.max(x.abs()));
            let u = ld.block_unitary(&g.hilbert_unitaries(&rep).unwrap()).unwrap();
            let expect = &u * &ld.matrix * u.adjoint();
            let got = assemble(&eq, &acted, &cs).unwrap();
            worst_dirac = worst_dirac.max(num::max_abs_diff(&got.matrix, &expect));
        }
    }
    ensure(worst_action < TOL_GAUGE_ACTION, || {
        format!("action moved by {worst_action:e}")
    })?;
    ensure(worst_dirac < TOL_DIRAC_COVARIANCE, || {
        format!("Dirac covariance defect {worst_dirac:e}")
    })?;
    Ok(format!(
        "action {worst_action:.2e}, Dirac {worst_dirac:.2e}, {GAUGE_TRANSFORMS} transforms per lattice"
    ))
}

fn continuum() -> Outcome {
    let fx = Fixture::abelian_gauge();
    // ¼∫F² with F₀₁ = −2πa cos(2πx₀) on the unit box.
    let exact = (std::f64::consts::PI * fx.gauge_amplitude).powi(2) / 2.0;
    let mut summary = Vec::new();
    for (d, sizes) in [(2usize, [4usize, 8, 16]), (4, [3, 4, 6])] {
        let study = continuum_study(d, &sizes, &fx).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&s| {
                let r = study.row(s, "gauge").unwrap();
                assert!(
                    (r.continuum - exact).abs() < 1e-10,
                    "continuum integral {}",
                    r.continuum
                );
                r.rel_error
            })
            .collect();
        ensure(errs.windows(2).all(|w| w[1] < w[0]), || {
            format!("d={d}: errors not decreasing {errs:?}")
        })?;
        for (w, s) in errs.windows(2).zip(sizes.windows(2)) {
            let order = (w[0] / w[1]).ln() / (s[1] as f64 / s[0] as f64).ln();
            ensure(order >= MIN_CONTINUUM_ORDER, || {
                format!("d={d} L={}->{}: order {order:.3}", s[0], s[1])
            })?;
            summary.push(format!("d={d} {}->{}: {order:.2}", s[0], s[1]));
        }
    }
    Ok(format!("orders {}", summary.join(", ")))
}

fn representations() -> Outcome {
    let adj = hw(&[1, 0, 0, -1]);
    ensure(weyl_dim(&adj) == 15, || format!("weyl_dim = {}", weyl_dim(&adj)))?;
    // Zero weights of the adjoint: traceless diagonal matrices, N − 1 of them.
    let zero = weight_multiplicities(&adj).unwrap().get(&[0, 0, 0, 0]);
    ensure(zero == 3, || format!("zero-weight multiplicity {zero}"))?;

    let k = TorusEmbedding::new(vec![2], vec![4], vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
    let h = TorusEmbedding::new(vec![2], vec![4], vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
    let inv = invariant_dim(&adj, &k).unwrap();
    ensure(inv == 3, || format!("invariant_dim = {inv}"))?;
    let residual = decompose(&invariant_character(&[adj], &k, &h).unwrap()).unwrap();
    let expect_res = [(vec![hw(&[1, -1])], 1u64)].into_iter().collect();
    ensure(residual == expect_res, || format!("residual {residual:?}"))?;

    let t = tensor_decompose(&hw(&[1, -1]), &hw(&[1, -1])).unwrap();
    let expect_t = [(hw(&[2, -2]), 1u64), (hw(&[1, -1]), 1), (hw(&[0, 0]), 1)]
        .into_iter()
        .collect();
    ensure(t == expect_t, || format!("tensor {t:?}"))?;
    let total: u128 = t.iter().map(|(w, m)| weyl_dim(w) * *m as u128).sum();
    ensure(total == 9, || format!("tensor dimensions add to {total}"))?;
    Ok("15, 3, 3 with residual V(1,-1), (2,-2)+(1,-1)+(0,0)".into())
}

/// Ordered fillings of a target block by copies of source blocks.
fn fillings(sizes: &[usize], total: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &s) in sizes.iter().enumerate() {
        if s <= total {
            for mut rest in fillings(sizes, total - s) {
                rest.insert(0, i);
                out.push(rest);
            }
        }
    }
    out
}

/// Unital diagrams by exhaustive filling, and the admissible ones by
/// comparing characters of `λ₁` and `λ₂∘φ` on random unitaries.
fn brute_force(a1: &AlgebraObject, a2: &AlgebraObject) -> (DiagramSet, DiagramSet) {
    let sizes = a1.sizes();
    let cols: Vec<BTreeSet<Vec<usize>>> = a2
        .blocks
        .iter()
        .map(|b| {
            fillings(&sizes, b.size)
                .into_iter()
                .map(|f| {
                    (0..sizes.len())
                        .map(|i| f.iter().filter(|&&x| x == i).count())
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut unital = BTreeSet::new();
    let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for col in &cols {
        let mut next = Vec::new();
        for p in &partial {
            for c in col {
                let mut q = p.clone();
                q.push(c.clone());
                next.push(q);
            }
        }
        partial = next;
    }
    for by_col in partial {
        let d: Vec<Vec<usize>> = (0..sizes.len())
            .map(|i| by_col.iter().map(|c| c[i]).collect())
            .collect();
        unital.insert(d);
    }
    let mut rng = rng_from_seed(5);
    let samples: Vec<Vec<ComplexMatrix>> = (0..4).map(|_| a1.random_unitary(&mut rng)).collect();
    let admissible = unital
        .iter()
        .filter(|d| {
            a1.hilbert_dim() == a2.hilbert_dim()
                && samples.iter().all(|u| {
                    let lhs: Complex64 = a1
                        .blocks
                        .iter()
                        .zip(u)
                        .map(|(b, x)| num::trace(x) * b.mult as f64)
                        .sum();
                    let rhs: Complex64 = a2
                        .blocks
                        .iter()
                        .enumerate()
                        .map(|(j, bj)| {
                            let img: Complex64 = (0..a1.num_blocks()).map(|i| num::trace(&u[i]) * d[i][j] as f64).sum();
                            img * bj.mult as f64
                        })
                        .sum();
                    (lhs - rhs).norm() < 1e-9
                })
        })
        .cloned()
        .collect();
    (unital, admissible)
}

fn bratteli() -> Outcome {
    let obj = |s: &[usize], m: &[usize]| AlgebraObject::from_sizes(s, m).unwrap();

    // M_N on ℂ^N to itself: one diagram, Aut = U(N) × U(1) with the shared phase flagged.
    let mn = AlgebraObject::matrix(2).unwrap();
    let h0 = hom_descriptor(&mn, &mn);
    ensure(h0.len() == 1 && h0[0].aut_dim == 5 && h0[0].central_redundancy, || {
        format!("M_2 endomorphisms {h0:?}")
    })?;

    // ℂ → ℂ ⊕ M₂ with the M₂ block acting trivially: z ↦ z ⊕ z1₂.
    let (c, cm2) = (obj(&[1], &[1]), obj(&[1, 2], &[1, 0]));
    let ds = enumerate_bratteli(&c, &cm2);
    ensure(ds.len() == 1 && ds[0].d == vec![vec![1, 2]], || {
        format!("C -> C + M_2 diagrams {ds:?}")
    })?;
    let z = vec![ComplexMatrix::from_element(1, 1, num::ONE * 0.3 + num::I * 0.7)];
    let img = canonical_morphism(&c, &cm2, &ds[0])
        .unwrap()
        .diagram
        .embed(&c, &cm2, &z);
    let want_m2 = num::identity(2) * z[0][(0, 0)];
    ensure(
        num::max_abs_diff(&img[0], &z[0]) == 0.0 && num::max_abs_diff(&img[1], &want_m2) == 0.0,
        || "C -> C + M_2 image is not z ⊕ z1₂".into(),
    )?;

    // ℂ ⊕ M₂ on ℂ ⊕ ℂ² into M₃ on ℂ³.
    let (a, b) = (obj(&[1, 2], &[1, 1]), obj(&[3], &[1]));
    let (u, ad) = (enumerate_unital(&a, &b), enumerate_bratteli(&a, &b));
    ensure(
        u.len() == 2 && ad.len() == 1 && ad[0].d == vec![vec![1], vec![1]],
        || format!("C + M_2 -> M_3: {} unital, {} admissible", u.len(), ad.len()),
    )?;

    // M₂ ⊕ M₃ → M₅ ⊕ M₃, both acting trivially.
    let (a, b) = (obj(&[2, 3], &[0, 0]), obj(&[5, 3], &[0, 0]));
    let f5 = enumerate_bratteli(&a, &b);
    ensure(f5.len() == 1 && f5[0].d == vec![vec![1, 0], vec![1, 1]], || {
        format!("M_2 + M_3 -> M_5 + M_3 {f5:?}")
    })?;

    let mut objects = Vec::new();
    for sizes in [&[1usize][..], &[2], &[1, 1], &[1, 2], &[2, 2], &[1, 1, 1]] {
        for code in 0..3usize.pow(sizes.len() as u32) {
            let mults: Vec<usize> = (0..sizes.len()).map(|i| code / 3usize.pow(i as u32) % 3).collect();
            if let Ok(o) = AlgebraObject::from_sizes(sizes, &mults) {
                if (1..=5).contains(&o.hilbert_dim()) {
                    objects.push(o);
                }
            }
        }
    }
    let mut pairs = 0;
    for a1 in &objects {
        for a2 in &objects {
            let (u, ad) = brute_force(a1, a2);
            let got_u: BTreeSet<_> = enumerate_unital(a1, a2).into_iter().map(|b| b.d).collect();
            let got_a: BTreeSet<_> = enumerate_bratteli(a1, a2).into_iter().map(|b| b.d).collect();
            ensure(got_u == u && got_a == ad, || {
                format!("oracle disagrees on {a1:?} -> {a2:?}")
            })?;
            pairs += 1;
        }
    }
    Ok(format!("four named fixtures and {pairs} exhaustive pairs"))
}

fn casimir_and_hamiltonian() -> Outcome {
    // Expected spectrum of an explicit representation from its decomposition.
    let mut worst: f64 = 0.0;
    let mut check = |images: Vec<ComplexMatrix>, parts: Vec<(HighestWeight, u64)>| {
        let mut expect: Vec<f64> = parts
            .iter()
            .flat_map(|(w, m)| std::iter::repeat_n(casimir(w) as f64, (weyl_dim(w) * *m as u128) as usize))
            .collect();
        expect.sort_by(f64::total_cmp);
        let got = casimir_explicit(&images).unwrap();
        assert_eq!(got.len(), expect.len());
        for (g, e) in got.iter().zip(&expect) {
            worst = worst.max((g - e).abs());
        }
    };
    for n in 1..=4usize {
        let mut e = vec![0; n];
        e[0] = 1;
        check(explicit::defining(n), vec![(hw(&e), 1)]);
        check(explicit::dual(n), vec![(hw(&e).dual(), 1)]);
        if n > 1 {
            let mut a = e.clone();
            a[n - 1] = -1;
            // u(N) = centre ⊕ su(N)
            check(explicit::adjoint(n), vec![(hw(&vec![0; n]), 1), (hw(&a), 1)]);
        }
    }
    for (x, y, wx, wy) in [
        (explicit::defining(2), explicit::dual(2), hw(&[1, 0]), hw(&[0, -1])),
        (explicit::defining(2), explicit::defining(2), hw(&[1, 0]), hw(&[1, 0])),
        (
            explicit::defining(3),
            explicit::adjoint(3),
            hw(&[1, 0, 0]),
            hw(&[1, 0, -1]),
        ),
    ] {
        let mut parts: Vec<_> = tensor_decompose(&wx, &wy).unwrap().into_iter().collect();
        if wy.lambda == [1, 0, -1] {
            // the centre of u(3) inside the adjoint contributes a copy of the defining rep
            parts.push((wx.clone(), 1));
        }
        check(explicit::tensor(&x, &y), parts);
    }
    ensure(worst < TOL_CASIMIR, || format!("Casimir deviation {worst:e}"))?;

    // Abelian theta graph: gauge-invariant characters e^{i(m₀θ₀ + m₁θ₁)} need
    // m₀ + m₁ = 0; the torus Laplacian gives m₀² + m₁².
    let cutoff = 4;
    let c = AlgebraObject::matrix(1).unwrap();
    let b = enumerate_bratteli(&c, &c).remove(0);
    let q = Quiver::new(2, vec![(0, 1), (0, 1)]).unwrap();
    let frame = NetworkFrame::new(q, vec![c.clone(), c], vec![b.clone(), b]).unwrap();
    let nets = enumerate_networks(&frame, cutoff).unwrap();
    let mut got: Vec<i64> = nets.iter().map(hamiltonian_energy).collect();
    let mut oracle: Vec<i64> = Vec::new();
    for m0 in -cutoff..=cutoff {
        for m1 in -cutoff..=cutoff {
            if m0 + m1 == 0 {
                oracle.push(m0 * m0 + m1 * m1);
            }
        }
    }
    got.sort();
    oracle.sort();
    ensure(got == oracle, || format!("theta energies {got:?} vs {oracle:?}"))?;
    ensure(
        got.iter()
            .all(|e| (e / 2) * 2 == *e && ((e / 2) as f64).sqrt().fract() == 0.0),
        || "energies are not 2n²".into(),
    )?;

    let mut phase_err: f64 = 0.0;
    for (t, s) in [(0.3, 1.1), (2.5, -0.7), (10.0, 3.3)] {
        for a in &nets {
            for b in &nets {
                for c in &nets {
                    let lhs = evolution_phase(a, b, t) * evolution_phase(b, c, t);
                    phase_err = phase_err.max((lhs - evolution_phase(a, c, t)).norm());
                }
                let split = evolution_phase(a, b, t) * evolution_phase(a, b, s);
                phase_err = phase_err.max((split - evolution_phase(a, b, t + s)).norm());
            }
        }
    }
    ensure(phase_err < TOL_PHASE, || format!("phase cocycle defect {phase_err:e}"))?;
    Ok(format!(
        "Casimir {worst:.2e}, {} theta states, cocycle {phase_err:.2e}",
        nets.len()
    ))
}

fn free_dirac() -> Outcome {
    let l = 0.7;
    let mut worst: f64 = 0.0;
    for d in [3usize, 4] {
        let cs = clifford(d).unwrap();
        let s = cs.spinor_dim();
        for size in [3usize, 4] {
            let eq = build_lattice(d, size, l, true).unwrap();
            let rep = QuiverRep::identity_links(&eq.quiver, 1).unwrap();
            let got = spectrum(&assemble(&eq, &rep, &cs).unwrap()).unwrap();
            let mut oracle = Vec::new();
            let mut zeros = 0;
            for k in 0..size.pow(d as u32) {
                let e: f64 = (0..d)
                    .map(|a| {
                        let ka = (k / size.pow(a as u32)) % size;
                        (2.0 * std::f64::consts::PI * ka as f64 / size as f64).sin().powi(2)
                    })
                    .sum::<f64>()
                    .sqrt()
                    / l;
                if e < 1e-12 {
                    zeros += s;
                }
                for _ in 0..s / 2 {
                    oracle.push(e);
                    oracle.push(-e);
                }
            }
            oracle.sort_by(f64::total_cmp);
            ensure(got.len() == oracle.len(), || {
                format!("d={d} L={size}: dimension {}", got.len())
            })?;
            for (g, o) in got.iter().zip(&oracle) {
                worst = worst.max((g - o).abs());
            }
            let got_zeros = got.iter().filter(|x| x.abs() < 1e-9).count();
            let doublers = if size % 2 == 0 { 1 << d } else { 1 };
            ensure(got_zeros == zeros && zeros == doublers * s, || {
                format!("d={d} L={size}: {got_zeros} zero modes, expected {}", doublers * s)
            })?;
        }
        let eq = build_lattice(d, 2, l, true).unwrap();
        let rep = QuiverRep::identity_links(&eq.quiver, 2).unwrap();
        let m = assemble(&eq, &rep, &cs).unwrap().matrix;
        ensure(num::max_abs(&m) == 0.0, || format!("d={d} L=2: D is not zero"))?;
    }
    ensure(worst < TOL_FOURIER, || format!("Fourier deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e}, doublers counted, L=2 gives D=0"))
}

fn kogut_susskind() -> Outcome {
    let (d, size, n) = (3usize, 3usize, 2usize);
    let cs = clifford(d).unwrap();
    let eq = build_lattice(d, size, 1.0, true).unwrap();
    // Derived constant V·N·(8d² − 2d)/16 from the closed non-plaquette walks.
    let constant = (size.pow(d as u32) * n) as f64 * (8 * d * d - 2 * d) as f64 / 16.0;
    let mut rng = rng_from_seed(88);
    let mut worst: f64 = 0.0;
    for _ in 0..KS_CONFIGS {
        let rep = QuiverRep::haar_links(&eq.quiver, n, &mut rng).unwrap();
        let magnetic: f64 = eq
            .plaquettes
            .iter()
            .map(|p| 2.0 * num::trace(&plaquette_holonomy(&rep, p).unwrap()).re)
            .sum();
        let lib = ks_magnetic(&rep, &eq).unwrap();
        ensure((lib - magnetic).abs() < 1e-10, || {
            format!("magnetic term {lib} vs {magnetic}")
        })?;
        let exact = exact_for(&eq, &rep, &cs).unwrap().normalized;
        worst = worst.max((exact - (-0.25 * magnetic + constant)).abs());
    }
    ensure(worst < TOL_KS, || format!("plaquette form misses by {worst:e}"))?;
    Ok(format!(
        "max delta {worst:.2e} over {KS_CONFIGS} U(2) configurations, constant {constant}"
    ))
}

/// `⟨cos θ⟩` under `e^{β cos θ}` by the periodic trapezoid rule.
fn plaquette_oracle(beta: f64) -> f64 {
    let m = 4096;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..m {
        let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let w = (beta * th.cos()).exp();
        num += th.cos() * w;
        den += w;
    }
    num / den
}

fn monte_carlo() -> Outcome {
    let mut lines = Vec::new();
    for (beta, seed) in [(0.0, 40u64), (0.5, 41), (1.0, 42), (2.0, 43)] {
        let s = metropolis(MCParams::single_plaquette(beta, MC_SWEEPS, seed))
            .and_then(|st| st.summary())
            .map_err(|e| e.to_string())?;
        let target = plaquette_oracle(beta);
        let z = (s.mean_plaquette - target) / s.plaquette_error;
        ensure(z.abs() < MC_SIGMAS, || {
            format!(
                "beta={beta}: {} +- {} vs {target} ({z:.2} sigma)",
                s.mean_plaquette, s.plaquette_error
            )
        })?;
        lines.push(format!("b={beta}: {z:+.2}σ"));
    }
    Ok(lines.join(", "))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_gaugenet"))
        .args(args)
        .output()
        .expect("run gaugenet");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let dir: PathBuf = std::env::temp_dir().join(format!("gaugenet-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let ck = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (ck1, ck2) = (ck("a.json"), ck("b.json"));
    let commands: Vec<Vec<&str>> = vec![
        vec!["brat", "--a1", "1,2", "--a2", "3", "--h1", "1,2", "--h2", "3"],
        vec!["hom", "--a1", "2", "--a2", "2"],
        vec!["rep", "dim", "--weight", "1,0,0,-1"],
        vec!["rep", "weights", "--weight", "2,0,-1"],
        vec!["rep", "tensor", "--weight", "1,-1", "--with", "1,-1"],
        vec!["rep", "casimir", "--weight", "1,0,-1"],
        vec![
            "rep",
            "invariant",
            "--weight",
            "1,0,0,-1",
            "--fixed",
            "1,1,0,0;0,0,1,1",
            "--residual",
            "1,0,1,0;0,1,0,1",
        ],
        vec!["basis", "--graph", "theta", "--cutoff", "3"],
        vec![
            "hamiltonian",
            "--graph",
            "cycle",
            "--len",
            "3",
            "--N",
            "2",
            "--cutoff",
            "1",
        ],
        vec!["dirac", "spectrum", "--d", "3", "--L", "3", "--N", "2", "--seed", "4"],
        vec!["action", "compare", "--d", "4", "--L", "3", "--N", "2", "--seed", "7"],
        vec![
            "action", "compare", "--d", "4", "--L", "2", "--seed", "3", "--higgs", "0.5",
        ],
        vec!["continuum", "--levels", "3"],
        vec![
            "mc",
            "--beta",
            "1",
            "--sweeps",
            "500",
            "--seed",
            "3",
            "--single-plaquette",
            "--checkpoint",
            &ck1,
        ],
        vec![
            "mc", "--beta", "2", "--sweeps", "200", "--seed", "3", "--N", "2", "--L", "3", "--bin", "20", "--chains",
            "3",
        ],
        vec!["ks", "--seed", "5", "--configs", "4"],
    ];
    let mut runs = 0;
    for cmd in &commands {
        for json in [false, true] {
            let mut args = cmd.clone();
            if json {
                args.push("--json");
            }
            let first = cli(&args);
            let before = std::fs::read(&ck1).ok();
            let second = cli(&args);
            ensure(first.0 == 0, || format!("`{}` exited with {}", args.join(" "), first.0))?;
            ensure(first == second, || format!("`{}` differs between runs", args.join(" ")))?;
            if cmd[0] == "mc" && before.is_some() {
                ensure(before == std::fs::read(&ck1).ok(), || {
                    "checkpoint differs between runs".into()
                })?;
            }
            runs += 1;
        }
    }

    // Documented outputs.
    let (_, out) = cli(&commands[0]);
    ensure(
        String::from_utf8_lossy(&out).contains("1 admissible of 2 unital"),
        || "brat output".into(),
    )?;
    let (_, out) = cli(&commands[2]);
    ensure(String::from_utf8_lossy(&out).lines().last() == Some("15"), || {
        "rep dim output".into()
    })?;
    let (_, out) = cli(&[
        "action", "compare", "--d", "4", "--L", "3", "--N", "2", "--seed", "7", "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let delta = v["result"]["delta"].as_f64().unwrap_or(f64::INFINITY);
    ensure(delta < TOL_CLOSED_FORM, || format!("action compare delta {delta}"))?;

    // A stopped and resumed chain ends where an uninterrupted one does.
    let base = [
        "mc", "--beta", "1.5", "--sweeps", "300", "--seed", "11", "--L", "3", "--N", "2", "--therm", "40",
    ];
    let (c1, full) = cli(&[&base[..], &["--checkpoint", &ck1, "--json"]].concat());
    let (c2, _) = cli(&[&base[..], &["--stop-after", "123", "--checkpoint", &ck2]].concat());
    let (c3, resumed) = cli(&["mc", "--resume", &ck2, "--checkpoint", &ck2, "--json"]);
    ensure(c1 == 0 && c2 == 0 && c3 == 0, || "checkpoint run failed".into())?;
    let r1: serde_json::Value = serde_json::from_slice(&full).map_err(|e| e.to_string())?;
    let r2: serde_json::Value = serde_json::from_slice(&resumed).map_err(|e| e.to_string())?;
    ensure(r1["result"] == r2["result"], || "resumed chain diverges".into())?;
    ensure(std::fs::read(&ck1).ok() == std::fs::read(&ck2).ok(), || {
        "resumed checkpoint differs".into()
    })?;

    // Exit codes.
    ensure(cli(&["frobnicate"]).0 == 2, || "unknown command must exit 2".into())?;
    ensure(cli(&["rep", "dim", "--weight", "0,1"]).0 == 2, || {
        "invalid weight must exit 2".into()
    })?;
    ensure(cli(&["mc", "--beta", "1", "--sweeps", "10"]).0 == 2, || {
        "missing seed must exit 2".into()
    })?;

    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{runs} invocations byte-identical, resume matches, exit codes"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "closed-form spectral action equals (l^4/dim S) Tr D^4",
            Duration::from_secs(20 * 2 * 60),
            closed_form,
        ),
        (
            2,
            "gauge invariance and Dirac covariance",
            Duration::from_secs(30),
            gauge,
        ),
        (
            3,
            "continuum limit of the U(1) gauge sector",
            Duration::from_secs(300),
            continuum,
        ),
        (
            4,
            "representation-theory fixtures",
            Duration::from_secs(10),
            representations,
        ),
        (
            5,
            "Bratteli fixtures and exhaustive oracle",
            Duration::from_secs(10),
            bratteli,
        ),
        (
            6,
            "Casimir, theta-graph energies and phase cocycle",
            Duration::from_secs(30),
            casimir_and_hamiltonian,
        ),
        (
            7,
            "free Dirac dispersion and doublers",
            Duration::from_secs(60),
            free_dirac,
        ),
        (
            8,
            "Kogut-Susskind plaquette form in d = 3",
            Duration::from_secs(60),
            kogut_susskind,
        ),
        (
            9,
            "single-plaquette Monte Carlo calibration",
            Duration::from_secs(120),
            monte_carlo,
        ),
        (10, "CLI determinism", Duration::from_secs(300), determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= budget {
                Ok(d)
            } else {
                Err(format!("{d}; took {elapsed:.1?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{elapsed:.2?}]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {reason} [{elapsed:.2?}]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
