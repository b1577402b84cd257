use std::time::Instant;
fn main() {
    let inst = gft_core::Instance::uniform_uniform();
    let t = Instant::now();
    let report = gft_core::secondbest::second_best(&inst, 20, 20).unwrap();
    println!(
        "sb={:.6} fb_d={:.6} sp_d={:.6} bp_d={:.6} iters={} viol={:.2e} elapsed={:?}",
        report.solution.sb, report.fb_d, report.sp_d, report.bp_d,
        report.solution.iterations, report.solution.max_violation, t.elapsed()
    );
}
