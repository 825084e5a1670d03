use std::time::Instant;
use flagres_core::grothendieck::{groth_determinant, groth_direct, groth_probe_entries, FamilySpec, GrothParams};
use flagres_core::symfun::Partition;

#[test]
#[ignore]
fn probe_333_stages() {
    let p = GrothParams::new(
        3,
        Partition::new(vec![3, 3, 3]).unwrap(),
        FamilySpec::Symbolic,
        FamilySpec::Symbolic,
        FamilySpec::Symbolic,
        4,
    )
    .unwrap();
    // warm silently first? no, just measure.
    let t0 = Instant::now();
    let d = groth_direct(&p).unwrap();
    eprintln!("direct total: {:?} ({} terms)", t0.elapsed(), d.num_terms());
    drop(d);
    let t0 = Instant::now();
    let q = groth_determinant(&p).unwrap();
    eprintln!("phi total: {:?} ({} terms)", t0.elapsed(), q.num_terms());
    drop(q);
    let t0 = Instant::now();
    let _ = groth_probe_entries(&p).unwrap();
    eprintln!("entries build: {:?}", t0.elapsed());
}
