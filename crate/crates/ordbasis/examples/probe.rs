use num::BigInt;
use ordbasis::exact::{Poly, QRat, RatFunc};
use std::time::Instant;

fn randpoly(deg: usize, bits: u64, seed: &mut u64) -> Poly {
    let mut coeffs = vec![];
    for _ in 0..=deg {
        let mut n = BigInt::from(0);
        for _ in 0..(bits / 32 + 1) {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            n = (n << 32) + BigInt::from((*seed >> 33) as u32);
        }
        coeffs.push(QRat::from_integer(n));
    }
    Poly::new(coeffs)
}

fn main() {
    let mut seed = 7u64;
    let g = randpoly(5, 100, &mut seed);
    let a = &randpoly(45, 200, &mut seed) * &g;
    let b = &randpoly(45, 200, &mut seed) * &g;
    let t0 = Instant::now();
    let gg = a.gcd(&b);
    eprintln!("gcd deg50/300bit with deg-5 common factor: {:?} (deg {})", t0.elapsed(), gg.degree());
    let a2 = randpoly(50, 300, &mut seed);
    let b2 = randpoly(50, 300, &mut seed);
    let t0 = Instant::now();
    let gg = a2.gcd(&b2);
    eprintln!("gcd coprime deg50/300bit: {:?} (deg {})", t0.elapsed(), gg.degree());
    let t0 = Instant::now();
    let _ = RatFunc::new(a2.clone(), b2.clone());
    eprintln!("RatFunc::new same: {:?}", t0.elapsed());
}
