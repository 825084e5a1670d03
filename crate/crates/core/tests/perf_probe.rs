use std::time::Instant;

use flagres_core::grothendieck::{groth_determinant, groth_direct, FamilySpec, GrothParams};
use flagres_core::ring::Rational;
use flagres_core::symfun::Partition;

/// All partitions with at most `len` parts, each part at most `max`,
/// trailing zeros padded to exactly `len`.
fn shapes(len: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, max: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        let cap = current.last().copied().unwrap_or(max);
        for part in (0..=cap).rev() {
            current.push(part);
            rec(len, max, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, max, &mut Vec::new(), &mut out);
    out
}

#[test]
#[ignore]
fn probe_full_criterion6() {
    let start = Instant::now();
    let mut cases = 0usize;
    for r in 1..=3usize {
        for parts in shapes(r, 3) {
            let lambda1 = parts.first().copied().unwrap_or(0) as usize;
            // alpha = 0, exact
            let p = GrothParams::new(
                r,
                Partition::new(parts.clone()).unwrap(),
                FamilySpec::Symbolic,
                FamilySpec::Values(vec![Rational::zero(); lambda1]),
                FamilySpec::Symbolic,
                4,
            )
            .unwrap();
            assert_eq!(groth_direct(&p).unwrap(), groth_determinant(&p).unwrap());
            cases += 1;
            // symbolic alpha mod T=4
            if lambda1 > 0 {
                let p = GrothParams::new(
                    r,
                    Partition::new(parts.clone()).unwrap(),
                    FamilySpec::Symbolic,
                    FamilySpec::Symbolic,
                    FamilySpec::Symbolic,
                    4,
                )
                .unwrap();
                assert_eq!(groth_direct(&p).unwrap(), groth_determinant(&p).unwrap());
                cases += 1;
            }
        }
    }
    eprintln!("criterion 6 sweep: {cases} cases in {:?}", start.elapsed());
}

#[test]
#[ignore]
fn probe_criterion6_split() {
    for (name, alpha_symbolic) in [("alpha=0", false), ("alpha sym", true)] {
        let start = Instant::now();
        for r in 1..=3usize {
            for parts in shapes(r, 3) {
                let lambda1 = parts.first().copied().unwrap_or(0) as usize;
                if alpha_symbolic && lambda1 == 0 {
                    continue;
                }
                let alpha = if alpha_symbolic {
                    FamilySpec::Symbolic
                } else {
                    FamilySpec::Values(vec![Rational::zero(); lambda1])
                };
                let p = GrothParams::new(
                    r,
                    Partition::new(parts.clone()).unwrap(),
                    FamilySpec::Symbolic,
                    alpha,
                    FamilySpec::Symbolic,
                    4,
                )
                .unwrap();
                let t0 = Instant::now();
                let d = groth_direct(&p).unwrap();
                let t1 = t0.elapsed();
                let t0 = Instant::now();
                let q = groth_determinant(&p).unwrap();
                let t2 = t0.elapsed();
                assert_eq!(d, q);
                if t1.as_millis() + t2.as_millis() > 3000 {
                    eprintln!("  {name} {parts:?} r={r}: direct {t1:?} phi {t2:?}");
                }
            }
        }
        eprintln!("{name} pass: {:?}", start.elapsed());
    }
}
