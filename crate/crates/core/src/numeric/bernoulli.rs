//! Even-index Bernoulli numbers B_2 .. B_60 as exact fractions rounded to f64.

use std::sync::OnceLock;

// (numerator, denominator) of B_{2k}, k = 1..=30
const FRACTIONS: [(f64, f64); 30] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
    (1520097643918070802691.0, 1806.0),
    (-27833269579301024235023.0, 690.0),
    (596451111593912163277961.0, 282.0),
    (-5609403368997817686249127547.0, 46410.0),
    (495057205241079648212477525.0, 66.0),
    (-801165718135489957347924991853.0, 1590.0),
    (29149963634884862421418123812691.0, 798.0),
    (-2479392929313226753685415739663229.0, 870.0),
    (84483613348880041862046775994036021.0, 354.0),
    (-1215233140483755572040304994079820246041491.0, 56786730.0),
];

/// Number of tabulated even Bernoulli numbers.
pub const MAX_INDEX: usize = 30;

/// `b2k(k)` is B_{2k} for `1 <= k <= MAX_INDEX`.
pub fn b2k(k: usize) -> f64 {
    table()[k - 1]
}

fn table() -> &'static [f64; 30] {
    static TABLE: OnceLock<[f64; 30]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 30];
        for (slot, (n, d)) in out.iter_mut().zip(FRACTIONS.iter()) {
            *slot = n / d;
        }
        out
    })
}
