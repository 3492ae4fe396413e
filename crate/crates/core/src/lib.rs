// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod grid;
pub mod milp;
pub mod profiles;
pub mod reliability;
pub mod scuc;
pub mod tep;
pub mod util;
