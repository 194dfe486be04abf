use dbar_core::grid::*;
use dbar_core::koppelman::*;
use dbar_core::solver::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_rad: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(128);
    let n_ang: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(256);
    let iters: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(8);
    let which: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0);
    let spec = QuadratureSpec::new(n_rad, n_ang, 1.0).unwrap();
    let ctx = spec.grid_ctx(0.5).unwrap();
    let problem = if which == 0 { manufactured::potential_m0(&ctx) } else { manufactured::conjugated_m1(&ctx, 0.3, 0.3) };
    let config = SolveConfig { r0: 0.5, tol: 1e-9, max_iter: iters, quad: spec, record_states: true, ..Default::default() };
    let t0 = std::time::Instant::now();
    let report = iterate(&problem, &config).unwrap();
    println!("stop: {} ({:.1?})", report.stop, t0.elapsed());
    for rec in &report.history {
        println!("k={} r={:.4} a={:.6e} eta_sup={:.4e} g={:.3} gi={:.3} sigma_psi={:.4e} sigma_phi={:?}",
          rec.k, rec.radius, rec.a, rec.max_eta_sup, rec.gauge_sup, rec.gauge_inv_sup, rec.sigma_psi.unwrap_or(-1.0), rec.sigma_phi);
    }
    for (k, st) in report.states.iter().enumerate() {
        let sups: Vec<String> = st.stored_entries().iter().filter(|(&(_, kk), _)| kk >= 0)
            .map(|(&(s, kk), e)| format!("({s},{kk})={:.3e}", e.sup_norm())).collect();
        println!("state {}: {}", k, sups.join(" "));
    }
}
