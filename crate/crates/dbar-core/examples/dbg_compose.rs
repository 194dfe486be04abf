use dbar_core::grid::*;
use dbar_core::koppelman::*;
use dbar_core::recalibration::{accumulate, recalibrate};
use dbar_core::solver::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_rad: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(128);
    let n_ang: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(256);
    let which: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);
    let spec = QuadratureSpec::new(n_rad, n_ang, 1.0).unwrap();
    let ctx = spec.grid_ctx(0.5).unwrap();
    let problem = if which == 0 { manufactured::potential_m0(&ctx) } else { manufactured::conjugated_m1(&ctx, 0.3, 0.3) };
    let config = SolveConfig { r0: 0.5, tol: 1e-9, max_iter: 3, quad: spec, record_states: true, ..Default::default() };
    let report = iterate(&problem, &config).unwrap();
    let sched = build_schedule(problem.conn.resolution_length(), 0.5).unwrap();
    for k in 1..=report.step_params.len() {
        let ctx_k = spec.grid_ctx(sched.radius(k)).unwrap();
        let steps: Vec<_> = report.step_params[..k].iter()
            .map(|p| resample_param(p, &ctx_k).unwrap())
            .collect();
        let acc = accumulate(&steps).unwrap();
        let direct = recalibrate(&acc, &resample_connection(&problem.conn, &ctx_k).unwrap()).unwrap();
        let loop_state = &report.states[k];
        let mut gap = 0.0f64;
        for (s, kk) in loop_state.index_range() {
            let d = loop_state.entry(s as i64, kk).sub(&direct.entry(s as i64, kk)).unwrap();
            gap = gap.max(d.sup_norm());
        }
        println!("k={k}: composition gap = {:.3e}", gap);
    }
}
