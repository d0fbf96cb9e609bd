// Probe: what do the PRINTED (as-published) Q/Fisher entry lists give for
// the benchmark cells? Compared against the oracle-validated forms.
use nalgebra::DMatrix;
use ququart_mub::bounds::{block_layout, fisher_matrix, q_matrix, random_mixed, random_pure};
use ququart_mub::tomo::{born_probabilities, DensityMatrix};
use ququart_mub::{BasisFamily, RingContext};

fn main() {
    for n in [1usize, 2] {
        let ctx = RingContext::new(2, n, None).unwrap();
        let fam = BasisFamily::for_ring(ctx.clone()).unwrap();
        let i2 = (1usize << n) as f64; // 2^N
        let d4 = fam.space().dim() as f64; // 4^N

        // slot metadata mirroring the layout: (is_base, outcome, bar, gamma, setup)
        let layout = block_layout(&fam);
        let ctxr = fam.ctx();
        let meta = |g: &ququart_mub::bounds::GroupLayout| {
            g.slots_meta()
        };

        let mixed_probe = DensityMatrix::maximally_mixed(fam.space().dim());
        let probs = born_probabilities(&mixed_probe, &fam).unwrap();

        // printed Q
        let q_print = |a: &(bool, usize, usize, usize, usize), b: &(bool, usize, usize, usize, usize)| -> f64 {
            let (a_base, a_out, a_bar, a_gam, a_set) = *a;
            let (b_base, b_out, b_bar, b_gam, b_set) = *b;
            match (a_base, b_base) {
                (true, true) => {
                    // symmetrized q1
                    let d_kk = f64::from(a_out == b_out);
                    let d_bar = f64::from(a_bar == b_bar);
                    let d_gg = f64::from(a_gam == b_gam);
                    let z_a = f64::from(a_bar == 0);
                    let z_b = f64::from(b_bar == 0);
                    (1.0 / i2)
                        * ((d4 - i2 + 1.0) * (d_kk + 1.0)
                            + (i2 - 1.0)
                                * (d_bar * (1.0 - d_gg)
                                    - (2.0 * z_a * z_b + z_a + z_b)))
                }
                (true, false) | (false, true) => {
                    let (bar_base, bar_sh) = if a_base { (a_bar, b_bar) } else { (b_bar, a_bar) };
                    // printed q3 / 2 (symmetric convention)
                    -(1.0 - f64::from(bar_base == 0) - f64::from(bar_sh == 0))
                }
                (false, false) => {
                    if a_set == b_set && a_bar == b_bar {
                        1.0 + f64::from(a_gam == b_gam)
                    } else {
                        0.0
                    }
                }
            }
        };

        // printed Fisher (only its listed nonzero families)
        let shifted_count = i2 as usize - 1;
        let fisher_print = |g: &ququart_mub::bounds::GroupLayout,
                            a: &(bool, usize, usize, usize, usize),
                            b: &(bool, usize, usize, usize, usize)|
         -> f64 {
            let p = |setup: usize, out: usize| g.prob_of(&probs, setup, out).max(1e-10);
            let (a_base, a_out, a_bar, a_gam, a_set) = *a;
            let (b_base, b_out, b_bar, b_gam, b_set) = *b;
            match (a_base, b_base) {
                (true, true) => {
                    let mut v = 1.0 / p(0, 0);
                    if a_out == b_out {
                        v += 1.0 / p(0, a_out);
                    }
                    if a_bar != 0 && b_bar != 0 {
                        for s in 1..=shifted_count {
                            v += 1.0 / p(s, 0);
                            if a_bar == b_bar {
                                v += 1.0 / p(s, a_bar);
                            }
                        }
                    }
                    v
                }
                (true, false) | (false, true) => {
                    let (bar_base, sh) = if a_base { (a_bar, (b_set, b_bar)) } else { (b_bar, (a_set, a_bar)) };
                    if bar_base == sh.1 && bar_base != 0 {
                        -1.0 / p(sh.0, sh.1)
                    } else {
                        0.0
                    }
                }
                (false, false) => {
                    if a_set == b_set && a_bar == b_bar {
                        let mut v = 1.0 / p(a_set, a_bar);
                        if a_gam == b_gam {
                            v += 1.0 / p(a_set, a_out);
                        }
                        v
                    } else {
                        0.0
                    }
                }
            }
        };

        let cr_printed = |rho: &DensityMatrix| -> f64 {
            let probs = born_probabilities(rho, &fam).unwrap();
            let mut total = 0.0;
            for g in &layout {
                let m = meta(g);
                let d = m.len();
                let mut q = DMatrix::<f64>::zeros(d, d);
                let mut f = DMatrix::<f64>::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        q[(i, j)] = q_print(&m[i], &m[j]);
                        let pf = |setup: usize, out: usize| g.prob_of(&probs, setup, out).max(1e-10);
                        let _ = pf;
                        f[(i, j)] = {
                            // rebuild closure with this state's probs
                            let p = |setup: usize, out: usize| g.prob_of(&probs, setup, out).max(1e-10);
                            let (a_base, a_out, a_bar, a_gam, a_set) = m[i];
                            let (b_base, b_out, b_bar, b_gam, b_set) = m[j];
                            match (a_base, b_base) {
                                (true, true) => {
                                    let mut v = 1.0 / p(0, 0);
                                    if a_out == b_out {
                                        v += 1.0 / p(0, a_out);
                                    }
                                    if a_bar != 0 && b_bar != 0 {
                                        for s in 1..=shifted_count {
                                            v += 1.0 / p(s, 0);
                                            if a_bar == b_bar {
                                                v += 1.0 / p(s, a_bar);
                                            }
                                        }
                                    }
                                    v
                                }
                                (true, false) | (false, true) => {
                                    let (bar_base, sh) = if a_base {
                                        (a_bar, (b_set, b_bar))
                                    } else {
                                        (b_bar, (a_set, a_bar))
                                    };
                                    if bar_base == sh.1 && bar_base != 0 {
                                        -1.0 / p(sh.0, sh.1)
                                    } else {
                                        0.0
                                    }
                                }
                                (false, false) => {
                                    if a_set == b_set && a_bar == b_bar {
                                        let mut v = 1.0 / p(a_set, a_bar);
                                        if a_gam == b_gam {
                                            v += 1.0 / p(a_set, a_out);
                                        }
                                        v
                                    } else {
                                        0.0
                                    }
                                }
                            }
                        };
                    }
                }
                let solved = f.lu().solve(&q).expect("solvable");
                total += solved.trace();
            }
            total
        };
        let _ = fisher_print;

        let mm = DensityMatrix::maximally_mixed(fam.space().dim());
        println!("N={n}: printed-form CR(max mixed) = {:.6}  sqrt={:.4}", cr_printed(&mm), cr_printed(&mm).sqrt());

        let count = 200;
        let mut pure_acc = 0.0;
        let mut mixed_acc = 0.0;
        for i in 0..count {
            pure_acc += cr_printed(&random_pure(fam.space().dim(), 7, i)).max(0.0).sqrt();
            mixed_acc += cr_printed(&random_mixed(fam.space().dim(), 7, i)).max(0.0).sqrt();
        }
        println!(
            "N={n}: printed-form MC means: pure {:.4}, mixed {:.4}",
            pure_acc / count as f64,
            mixed_acc / count as f64
        );
        // correct forms for reference
        let q = q_matrix(&fam);
        let f = fisher_matrix(&probs, &fam, 1e-10).unwrap();
        let mut total = 0.0;
        for ((_, fb), (_, qb)) in f.blocks.iter().zip(&q.blocks) {
            total += fb.clone().lu().solve(qb).unwrap().trace();
        }
        println!("N={n}: oracle-validated CR(max mixed) = {:.6} sqrt={:.4}", total, total.sqrt());
    }
}
