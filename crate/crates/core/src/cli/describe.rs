/// `(file, column, meaning)` for every CSV the tool writes.
pub const COLUMNS: &[(&str, &str, &str)] = &[
    ("trace.csv", "m", "iteration index, 1 = heat flow of the data"),
    ("trace.csv", "u_crit", "‖u^m‖ in the critical space-time Besov norm B^{5/p-1,5/2p-1/2}_{p,5}"),
    ("trace.csv", "b_crit", "‖b^m‖ in the same critical norm"),
    ("trace.csv", "b_lip", "‖b^m‖ in B^{5/p,5/2p}_{p,1}"),
    ("trace.csv", "u_alpha", "‖u^m‖ in B^{α-1,(α-1)/2}_{p,q}"),
    ("trace.csv", "b_alpha", "‖b^m‖ in B^{α,α/2}_{p,q}"),
    ("trace.csv", "du_crit", "critical norm of u^m - u^{m-1} (u^0 = 0)"),
    ("trace.csv", "db_crit", "critical norm of b^m - b^{m-1}"),
    ("trace.csv", "db_lip", "B^{5/p,5/2p}_{p,1} norm of b^m - b^{m-1}"),
    ("trace.csv", "triple", "du_crit + db_crit + db_lip; convergence is triple < tol"),
    ("trace.csv", "rho", "triple_{m+1} / triple_m; empty on the last row or when triple_m <= 1e-14"),
    ("trace.csv", "max_divergence", "largest scaled spectral divergence over all slices of u^m and b^m"),
    ("smallness.csv", "name", "controlled norm (u_crit, b_crit, b_lip, u_alpha, b_alpha)"),
    ("smallness.csv", "first", "value at m = 1"),
    ("smallness.csv", "sup", "supremum over the trace"),
    ("smallness.csv", "argsup", "iteration attaining the supremum"),
    ("smallness.csv", "last", "value at the last iteration"),
    ("smallness.csv", "flagged", "true if some iterate exceeds twice the m = 1 value"),
    ("sweep.csv", "amplitude", "data amplitude max|u0| = max|b0|"),
    ("sweep.csv", "verdict", "converged | diverged | max-iter"),
    ("sweep.csv", "iterations", "trace length"),
    ("sweep.csv", "rho_bar", "geometric mean of the measured contraction ratios; empty if none"),
    ("sweep.csv", "final_triple", "triple norm of the last difference"),
    ("sweep.csv", "refined", "true for amplitudes added by bracket refinement"),
    ("boxsize.csv", "factor", "box multiple m; the box side is m L at grid n m"),
    ("boxsize.csv", "box_length", "box side"),
    ("boxsize.csv", "n", "grid points per side"),
    ("boxsize.csv", "verdict", "converged | diverged | max-iter"),
    ("boxsize.csv", "iterations", "trace length"),
    ("boxsize.csv", "rho_bar", "geometric mean of the contraction ratios; empty if none"),
    ("boxsize.csv", "u_max", "max |u(T)| on the central L-cube"),
    ("boxsize.csv", "b_max", "max |b(T)| on the central L-cube"),
    ("boxsize.csv", "change", "relative max difference of (u, b)(T) on the central cube against the previous box"),
    ("norms.csv", "j", "dyadic block index"),
    ("norms.csv", "weighted", "2^{js} times the block L^p norm"),
    ("norms.csv", "raw", "block L^p norm"),
    ("battery.csv", "inequality", "inequality name"),
    ("battery.csv", "fitted_constant", "largest LHS/RHS ratio over the calibration half"),
    ("battery.csv", "heldout_max", "largest LHS/RHS ratio over the held-out half"),
    ("battery.csv", "violations", "held-out samples with ratio > 1.05 × fitted_constant"),
    ("battery.csv", "degenerate", "samples with RHS = 0 and LHS > 0"),
    ("battery.csv", "pass", "no violations and no degenerate samples"),
    ("imex.csv", "step", "time step index"),
    ("imex.csv", "t", "time"),
    ("imex.csv", "energy", "‖u‖² + ‖b‖² (L² over the box)"),
    ("compare.csv", "dt", "IMEX step"),
    ("compare.csv", "rel_l2", "relative L² gap of (u, b) at t = T"),
    ("compare.csv", "rel_l2_u", "relative L² gap of u"),
    ("compare.csv", "rel_l2_b", "relative L² gap of b"),
    ("compare.csv", "besov_gap_b", "spatial B^{3/p}_{p,1} norm of the magnetic difference"),
    ("compare.csv", "tol_model", "max(5 dt², 10 × 1e-8)"),
    ("compare.csv", "pass", "rel_l2 <= tol_model"),
];

pub fn render() -> String {
    let mut out = String::new();
    let mut current = "";
    for (file, col, what) in COLUMNS {
        if *file != current {
            out.push_str(file);
            out.push('\n');
            current = file;
        }
        out.push_str(&format!("  {col:<16} {what}\n"));
    }
    out
}
