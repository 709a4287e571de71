//! Solve the three-choice arena with every method. Max goes left at each
//! choice node even though it loses pointwise on the middle pair.

use contpay::graph::{not_multi_arena, Owner, PositionalStrategy};
use contpay::payoff::fixtures;
use contpay::solver::{
    brute_force_solve, improve, random_switch_solve, solve_value_iteration, verify_equilibrium, SwitchRule,
    Tolerances,
};

fn main() -> anyhow::Result<()> {
    let fig = not_multi_arena();
    let g = &fig.graph;
    let base = fixtures::not_multi_base();
    let tol = Tolerances::default();

    let vi = solve_value_iteration(g, &base, tol)?;
    let si = improve(g, &base, fig.go_right(), SwitchRule::Greedy, tol)?;
    let rand = random_switch_solve(g, &base, 7, tol)?;
    let (brute, table) = brute_force_solve(g, &base)?;

    for (name, eq) in [("vi", &vi), ("si", &si.equilibrium), ("rand", &rand.equilibrium), ("brute", &brute)] {
        let vals: Vec<String> = fig.v.iter().map(|&u| format!("{:.9}", eq.values[u])).collect();
        println!("{name:>5}: v1..v3 = {}  goes left: {}", vals.join(", "), eq.sigma == fig.go_left());
    }
    println!("greedy improvement from go-right switched {:?}", si.switches);
    println!("brute force enumerated {} Max strategies", table.max.len());

    let empty = PositionalStrategy::first_edges(g, Owner::Min);
    let bad = verify_equilibrium(g, &base, &fig.go_right(), &empty, 1e-8)?;
    println!("go-right certificate: gap {:.3} at node {} (pass = {})", bad.gap, bad.worst_node, bad.pass);
    Ok(())
}
