//! Heilbronn matrices for Hecke operators on Manin symbols.

/// Merel's set: [a b; c d] with a > b >= 0, d > c >= 0, ad - bc = l.
/// Returned as [a, b, c, d].
pub fn merel_heilbronn(l: u64) -> Vec<[i64; 4]> {
    let l = l as i64;
    let mut out = Vec::new();
    // ad - bc >= a + d - 1, so a + d <= l + 1
    for a in 1..=l {
        for d in 1..=(l + 1 - a) {
            let m = a * d - l;
            if m < 0 {
                continue;
            }
            if m == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
                continue;
            }
            for b in 1..a.min(m + 1) {
                if m % b == 0 {
                    let c = m / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}
