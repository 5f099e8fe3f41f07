//! Basis blades of R(4,1) and the frozen Cayley table.
//!
//! Basis vectors are `e1, e2, e3, e+, e-` and are stored as bits 0..4 of a
//! blade mask. The 32 blades are ordered grade first, then lexicographically
//! by their sorted index lists:
//!
//! ```text
//!  0: 1
//!  1: e1   2: e2   3: e3   4: e+   5: e-
//!  6: e12  7: e13  8: e1+  9: e1- 10: e23 11: e2+ 12: e2- 13: e3+ 14: e3- 15: e+-
//! 16: e123 17: e12+ 18: e12- 19: e13+ 20: e13- 21: e1+- 22: e23+ 23: e23- 24: e2+- 25: e3+-
//! 26: e123+ 27: e123- 28: e12+- 29: e13+- 30: e23+-
//! 31: e123+-
//! ```
//!
//! All tables are computed by `const fn` at compile time and never mutated.

/// Number of basis blades.
pub const BLADE_COUNT: usize = 32;

/// Number of basis vectors.
pub const DIMENSION: usize = 5;

/// Squares of the basis vectors, in bit order.
pub const METRIC: [f64; DIMENSION] = [1.0, 1.0, 1.0, 1.0, -1.0];

/// Bit of the negative-signature basis vector `e-`.
const NEGATIVE_BIT: u8 = 1 << 4;

const fn popcount(mut m: u8) -> u32 {
    let mut c = 0;
    while m != 0 {
        c += (m & 1) as u32;
        m >>= 1;
    }
    c
}

/// Lexicographic comparison of the sorted index lists of two same-grade masks.
const fn lex_less(a: u8, b: u8) -> bool {
    let mut x = a;
    let mut y = b;
    while x != 0 && y != 0 {
        let lx = x.trailing_zeros();
        let ly = y.trailing_zeros();
        if lx != ly {
            return lx < ly;
        }
        x &= x - 1;
        y &= y - 1;
    }
    false
}

const fn blade_less(a: u8, b: u8) -> bool {
    let ga = popcount(a);
    let gb = popcount(b);
    if ga != gb {
        ga < gb
    } else {
        lex_less(a, b)
    }
}

const fn build_masks() -> [u8; BLADE_COUNT] {
    let mut masks = [0u8; BLADE_COUNT];
    let mut i = 0;
    while i < BLADE_COUNT {
        masks[i] = i as u8;
        i += 1;
    }
    // selection sort, fine at compile time
    let mut i = 0;
    while i < BLADE_COUNT {
        let mut best = i;
        let mut j = i + 1;
        while j < BLADE_COUNT {
            if blade_less(masks[j], masks[best]) {
                best = j;
            }
            j += 1;
        }
        let t = masks[i];
        masks[i] = masks[best];
        masks[best] = t;
        i += 1;
    }
    masks
}

const fn build_index(masks: &[u8; BLADE_COUNT]) -> [u8; BLADE_COUNT] {
    let mut idx = [0u8; BLADE_COUNT];
    let mut i = 0;
    while i < BLADE_COUNT {
        idx[masks[i] as usize] = i as u8;
        i += 1;
    }
    idx
}

/// Sign from reordering the concatenation `a b` into canonical order, times
/// the metric factor of the contracted vectors.
const fn product_sign(a: u8, b: u8) -> i8 {
    let mut swaps = 0;
    let mut x = a >> 1;
    while x != 0 {
        swaps += popcount(x & b);
        x >>= 1;
    }
    let mut sign: i8 = if swaps % 2 == 0 { 1 } else { -1 };
    if a & b & NEGATIVE_BIT != 0 {
        sign = -sign;
    }
    sign
}

const fn build_gp_tables(masks: &[u8; BLADE_COUNT], index: &[u8; BLADE_COUNT]) -> ([[i8; BLADE_COUNT]; BLADE_COUNT], [[u8; BLADE_COUNT]; BLADE_COUNT]) {
    let mut sign = [[0i8; BLADE_COUNT]; BLADE_COUNT];
    let mut target = [[0u8; BLADE_COUNT]; BLADE_COUNT];
    let mut i = 0;
    while i < BLADE_COUNT {
        let mut j = 0;
        while j < BLADE_COUNT {
            sign[i][j] = product_sign(masks[i], masks[j]);
            target[i][j] = index[(masks[i] ^ masks[j]) as usize];
            j += 1;
        }
        i += 1;
    }
    (sign, target)
}

const fn build_grades(masks: &[u8; BLADE_COUNT]) -> [u8; BLADE_COUNT] {
    let mut g = [0u8; BLADE_COUNT];
    let mut i = 0;
    while i < BLADE_COUNT {
        g[i] = popcount(masks[i]) as u8;
        i += 1;
    }
    g
}

/// Bit mask of each blade, indexed by canonical position.
pub const BLADE_MASKS: [u8; BLADE_COUNT] = build_masks();

/// Canonical position of each bit mask.
pub const BLADE_INDEX: [u8; BLADE_COUNT] = build_index(&BLADE_MASKS);

/// Grade of each blade, indexed by canonical position.
pub const BLADE_GRADES: [u8; BLADE_COUNT] = build_grades(&BLADE_MASKS);

const GP_TABLES: ([[i8; BLADE_COUNT]; BLADE_COUNT], [[u8; BLADE_COUNT]; BLADE_COUNT]) =
    build_gp_tables(&BLADE_MASKS, &BLADE_INDEX);

/// `GP_SIGN[i][j]`: sign of `blade_i * blade_j`.
pub const GP_SIGN: [[i8; BLADE_COUNT]; BLADE_COUNT] = GP_TABLES.0;

/// `GP_TARGET[i][j]`: canonical position of the blade `blade_i * blade_j`.
pub const GP_TARGET: [[u8; BLADE_COUNT]; BLADE_COUNT] = GP_TABLES.1;

/// Canonical positions of frequently used blades.
pub mod idx {
    pub const SCALAR: usize = 0;
    pub const E1: usize = 1;
    pub const E2: usize = 2;
    pub const E3: usize = 3;
    pub const EP: usize = 4;
    pub const EM: usize = 5;
    pub const E12: usize = 6;
    pub const E13: usize = 7;
    pub const E23: usize = 10;
    pub const EPM: usize = 15;
    pub const PSEUDOSCALAR: usize = 31;
}

/// Human readable name of a blade, e.g. `e12+`.
pub fn blade_name(index: usize) -> String {
    const NAMES: [&str; DIMENSION] = ["1", "2", "3", "+", "-"];
    let mask = BLADE_MASKS[index];
    if mask == 0 {
        return "1".to_owned();
    }
    let mut s = String::from("e");
    for (bit, name) in NAMES.iter().enumerate() {
        if mask & (1 << bit) != 0 {
            s.push_str(name);
        }
    }
    s
}
