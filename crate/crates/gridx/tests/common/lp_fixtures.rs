//! Small hand-built LPs shared by the MPS and acceptance suites.

use gridx::lp::{LpModel, Sense, INF};

/// Two products sharing two machines.
pub fn production() -> LpModel {
    let mut m = LpModel::new();
    let a = m.add_col("make_a", 0.0, 40.0, -25.0);
    let b = m.add_col("make_b", 0.0, INF, -30.0);
    let lathe = m.add_row("lathe_hours", Sense::Le, 160.0);
    let mill = m.add_row("mill_hours", Sense::Le, 120.0);
    m.add_coeff(lathe, a, 2.0);
    m.add_coeff(lathe, b, 4.0);
    m.add_coeff(mill, a, 3.0);
    m.add_coeff(mill, b, 1.5);
    m.finalize().unwrap();
    m
}

/// One of each bound record kind: FR, MI, FX, LO+UP, plain UP.
pub fn bounds_zoo() -> LpModel {
    let mut m = LpModel::new();
    let f = m.add_col("free_var", -INF, INF, 1.0);
    let mi = m.add_col("no_floor", -INF, 5.0, 2.0);
    let fx = m.add_col("pinned", 3.0, 3.0, 0.5);
    let rng = m.add_col("shifted", -2.0, 2.0, -1.0);
    let up = m.add_col("capped", 0.0, 7.0, 0.25);
    let bal = m.add_row("balance", Sense::Eq, 4.0);
    let floor = m.add_row("floor", Sense::Ge, -6.0);
    m.add_coeff(bal, f, 1.0);
    m.add_coeff(bal, mi, 1.0);
    m.add_coeff(bal, fx, 1.0);
    m.add_coeff(floor, rng, 2.0);
    m.add_coeff(floor, up, 1.0);
    m.add_coeff(floor, f, -0.5);
    m.finalize().unwrap();
    m
}

/// 2 plants x 2 cities, minimum-cost shipment with supply/demand rows.
pub fn transport() -> LpModel {
    let mut m = LpModel::new();
    let costs = [[4.0, 6.0], [5.0, 3.0]];
    let mut ship = [[0usize; 2]; 2];
    for p in 0..2 {
        for c in 0..2 {
            ship[p][c] = m.add_col(format!("ship_{p}_{c}"), 0.0, INF, costs[p][c]);
        }
    }
    for (p, cap) in [35.0, 50.0].iter().enumerate() {
        let r = m.add_row(format!("supply_{p}"), Sense::Le, *cap);
        for c in 0..2 {
            m.add_coeff(r, ship[p][c], 1.0);
        }
    }
    for (c, need) in [30.0, 40.0].iter().enumerate() {
        let r = m.add_row(format!("demand_{c}"), Sense::Ge, *need);
        for p in 0..2 {
            m.add_coeff(r, ship[p][c], 1.0);
        }
    }
    m.finalize().unwrap();
    m
}

/// The three golden-file fixtures, with their on-disk names.
pub fn golden_set() -> Vec<(&'static str, LpModel)> {
    vec![
        ("production.mps", production()),
        ("bounds_zoo.mps", bounds_zoo()),
        ("transport.mps", transport()),
    ]
}
