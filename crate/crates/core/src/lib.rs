#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod anim;
pub mod cut;
pub mod exec;
pub mod reskin;
pub mod rig;
pub mod tear;
