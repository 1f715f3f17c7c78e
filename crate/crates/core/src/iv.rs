//! The binary instrumental-variables model: randomized assignment `z`,
//! treatment actually received `d`, response `y`, with `d` and `y` coupled
//! by an exogenous common cause (so `{d, y}` form one cluster with a joint
//! 16-cell response distribution).

use crate::observed::{ConditionalTable, IvDistribution, ObservedConditionals, ObservedError};
use crate::rational::{rat, Rational};
use crate::rfm::{CausalModel, Variable};

/// `z -> d -> y`, clusters `{z}` and `{d, y}`, all binary.
pub fn iv_model() -> CausalModel {
    CausalModel::new(
        vec![
            Variable::new("z", &["0", "1"], &[]),
            Variable::new("d", &["0", "1"], &["z"]),
            Variable::new("y", &["0", "1"], &["d"]),
        ],
        vec![vec!["z".into()], vec!["d".into(), "y".into()]],
    )
    .expect("fixed model is valid")
}

/// General-form observation tables for the IV model. Entry `yd.z` becomes
/// `P(d, y | z)` in the pair table (child order follows the cluster, so the
/// lexicographic column index is `d * 2 + y`).
pub fn observed_from_iv(p: &IvDistribution) -> Result<ObservedConditionals, ObservedError> {
    let model = iv_model();
    let z_table = ConditionalTable::new(
        &["z"],
        &[],
        vec![vec![Rational::from_integer(1.into()) - p.p_z1(), p.p_z1().clone()]],
    );
    let mut rows = Vec::new();
    for z in 0..2 {
        let mut row = Vec::with_capacity(4);
        for d in 0..2 {
            for y in 0..2 {
                row.push(p.entry(y, d, z).clone());
            }
        }
        rows.push(row);
    }
    let dy_table = ConditionalTable::new(&["d", "y"], &["z"], rows);
    ObservedConditionals::new(&model, vec![z_table, dy_table])
}

/// The product-sample trial data used throughout the tests: `P(z1) = 0.1`
/// with the eight conditional entries below.
pub fn peptaid_distribution() -> IvDistribution {
    IvDistribution::new(
        [
            rat(32, 100), // 00.0
            rat(32, 100), // 01.0
            rat(4, 100),  // 10.0
            rat(32, 100), // 11.0
            rat(2, 100),  // 00.1
            rat(17, 100), // 01.1
            rat(67, 100), // 10.1
            rat(14, 100), // 11.1
        ],
        rat(1, 10),
    )
    .expect("built-in data is valid")
}
