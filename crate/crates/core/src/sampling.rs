//! Seeded random generators for the property suites and the CLI self-test.
//!
//! Every generator draws from a caller-supplied RNG, so a fixed seed fixes
//! the whole transcript.

use nalgebra::{DMatrix, Matrix4};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field_calculus::{project_selfdual, FieldStrengthSample, PointFrame};
use crate::polarization::{push_forward_taming, taming_from_siegel_point, SiegelPoint, Taming};
use crate::{IntegerMatrix, LatticeType};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of `steps` random elementary row operations and sign flips.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize, steps: usize) -> IntegerMatrix {
    let mut u = IntegerMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u.negate_row(0);
        }
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..5) {
            0 => u.swap_rows(i, j),
            1 => u.negate_row(i),
            _ => u.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2..=2))),
        }
    }
    u
}

pub fn random_type<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LatticeType {
    let mut t = Vec::with_capacity(n);
    let mut cur = 1u64;
    for _ in 0..n {
        cur *= [1, 1, 2, 3][rng.gen_range(0..4)];
        t.push(cur);
    }
    LatticeType::new(t).expect("valid by construction")
}

fn symmetric_times_t<R: Rng + ?Sized>(rng: &mut R, t: &LatticeType, range: i64) -> IntegerMatrix {
    let n = t.half_rank();
    let mut s = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = BigInt::from(rng.gen_range(-range..=range));
            s[(i, j)] = v.clone();
            s[(j, i)] = v;
        }
    }
    let tm = IntegerMatrix::diagonal(t.entries().iter().map(|&x| BigInt::from(x)));
    &s * &tm
}

/// Word in the unipotent generators `[[I, S·T], [0, I]]` and `[[I, 0], [S·T, I]]`
/// with `S` symmetric, all of which lie in `Sp_t(2n, ℤ)`.
pub fn random_sp<R: Rng + ?Sized>(rng: &mut R, t: &LatticeType, letters: usize, range: i64) -> IntegerMatrix {
    let n = t.half_rank();
    let mut g = IntegerMatrix::identity(2 * n);
    for _ in 0..letters {
        let b = symmetric_times_t(rng, t, range);
        let mut e = IntegerMatrix::identity(2 * n);
        let upper = rng.gen_bool(0.5);
        for i in 0..n {
            for j in 0..n {
                if upper {
                    e[(i, n + j)] = b[(i, j)].clone();
                } else {
                    e[(n + i, j)] = b[(i, j)].clone();
                }
            }
        }
        if rng.gen_bool(0.2) {
            e = -&e;
        }
        g = &g * &e;
    }
    g
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, num: i64, den: i64) -> BigRational {
    BigRational::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

pub fn random_frame<R: Rng + ?Sized>(rng: &mut R) -> PointFrame {
    let eta = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0));
    loop {
        let l = Matrix4::<f64>::identity() + Matrix4::from_fn(|_, _| rng.gen_range(-0.35..0.35));
        let g = l.transpose() * eta * l;
        let o = if rng.gen_bool(0.5) { 1 } else { -1 };
        if let Ok(f) = PointFrame::new(g, o) {
            return f;
        }
    }
}

pub fn random_siegel_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SiegelPoint {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let x = (&a + a.transpose()) * 0.5;
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
    let y = &b * b.transpose() + DMatrix::identity(n, n) * 0.5;
    SiegelPoint::new(x, y).expect("valid by construction")
}

/// A taming from a random Siegel point, moved by a short random word.
pub fn random_taming<R: Rng + ?Sized>(rng: &mut R, t: &LatticeType) -> Taming {
    let z = random_siegel_point(rng, t.half_rank());
    let base = taming_from_siegel_point(&z, &t.omega()).expect("valid by construction").taming;
    let g = random_sp(rng, t, 1, 1);
    push_forward_taming(&g, &base).expect("valid by construction")
}

pub fn random_field<R: Rng + ?Sized>(rng: &mut R, width: usize) -> FieldStrengthSample {
    FieldStrengthSample::new(DMatrix::from_fn(6, width, |_, _| rng.gen_range(-1.0..1.0))).expect("valid by construction")
}

pub fn random_selfdual<R: Rng + ?Sized>(rng: &mut R, frame: &PointFrame, taming: &Taming) -> FieldStrengthSample {
    project_selfdual(&random_field(rng, taming.dim()), frame, taming).expect("valid by construction")
}

/// Random element of SL(2, ℤ) as a word in `S` and `T^k`.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, letters: usize) -> IntegerMatrix {
    let s = IntegerMatrix::from_rows(&[[0, -1], [1, 0]]);
    let mut g = IntegerMatrix::identity(2);
    for _ in 0..letters {
        let k = rng.gen_range(-3..=3);
        let t = IntegerMatrix::from_rows(&[[1, k], [0, 1]]);
        g = &(&g * &t) * &s;
    }
    g
}

/// Divisor chain with entries at most 2, keeping tamings well conditioned.
pub fn random_small_type<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LatticeType {
    let k = rng.gen_range(0..=n);
    LatticeType::new((0..n).map(|i| if i < k { 1 } else { 2 }).collect()).expect("valid by construction")
}

/// Taming of a random Siegel point, without a further push-forward.
pub fn random_siegel_taming<R: Rng + ?Sized>(rng: &mut R, t: &LatticeType) -> Taming {
    let z = random_siegel_point(rng, t.half_rank());
    taming_from_siegel_point(&z, &t.omega()).expect("valid by construction").taming
}
