//! Bundled scalpel scripts for the fixture rigs.
//!
//! Radial scalpels in a plane across the forearm, stepping around it. The
//! cylinders script is one step; the arm script is two chained steps.

use nalgebra::Vector3;

use super::ScalpelState;

fn state(time: f64, tip: [f64; 3], tail: [f64; 3]) -> ScalpelState {
    ScalpelState {
        time,
        tip: Vector3::from(tip),
        tail: Vector3::from(tail),
    }
}

pub fn cylinders() -> Vec<ScalpelState> {
    vec![
        state(0.0, [26.3, 0.9888, 0.1494], [26.3, 3.9551, 0.5978]),
        state(1.0, [26.3, -0.9243, 0.3817], [26.3, -3.6972, 1.5266]),
    ]
}

pub fn arm() -> Vec<ScalpelState> {
    vec![
        state(0.0, [40.3, 0.9888, 0.1494], [40.3, 5.9326, 0.8966]),
        state(1.0, [40.3, 0.3342, 0.9425], [40.3, 2.0054, 5.6549]),
        state(2.0, [40.3, -0.6811, 0.7322], [40.3, -4.0863, 4.3934]),
    ]
}
