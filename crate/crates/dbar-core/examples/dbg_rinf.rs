fn main() {
    // direct product, f64
    let mut r = 1.0f64;
    let mut k = 0;
    loop {
        let s = (-(k as f64) - 2.0).exp();
        if s < 1e-19 { break; }
        r *= 1.0 - s;
        k += 1;
    }
    println!("prod f64 = {:.15}", r);
    // Kahan-style via logs for cross-check
    let mut ln = 0.0f64;
    for k in 0..2000 {
        let s = (-(k as f64) - 2.0).exp();
        ln += (1.0 - s).ln_1p_like();
    }
    println!("prod via ln = {:.15}", ln.exp());
}
trait L { fn ln_1p_like(self) -> f64; }
impl L for f64 { fn ln_1p_like(self) -> f64 { (self - 1.0).ln_1p() } }
