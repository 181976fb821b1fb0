use cmzv::integrator::*;
use cmzv::ratfun::{Poly, RatFun};
use cmzv::reducer::{build_table, reduce};
use cmzv::scalars::CycRat;
use cmzv::expr::cmzv_numeric;

fn main() {
    let t0 = std::time::Instant::now();
    // ∫₀¹ Li₂(-1/x)·Li₂(4x/(1+x)²)/x dx at level 2
    let spec = IntegralSpec {
        level: 2,
        kernel_pole: CycRat::zero(2),
        factors: vec![
            LiFactor { bits: exps_to_bits(&[2]),
                r: RatFun::new(Poly::from_ints(2, &[-1]), Poly::from_ints(2, &[0,1])).unwrap() },
            LiFactor { bits: exps_to_bits(&[2]),
                r: RatFun::new(Poly::from_ints(2, &[0,4]), Poly::from_ints(2, &[1,2,1])).unwrap() },
        ],
        prefactor: CycRat::one(2),
    };
    let out = integrate(&spec).unwrap();
    println!("expanded words: {}, regularized: {}, monodromy: {}, exterior: {} [{:?}]",
        out.expanded_words, out.regularized, out.monodromy, out.exterior, t0.elapsed());
    println!("symbolic terms: {}", out.symbolic.num_terms());
    let table = build_table(2, 5).unwrap();
    let (red, done) = reduce(&out.symbolic, &table);
    println!("reduced ({done}): {red}");
    let v = cmzv_numeric(&red, 140).unwrap();
    println!("numeric: {:?} rad {:.2e}", v.to_f64_pair(), v.rad_f64());
    // paper: 24Li₅(1/2)+16Li₄(1/2)log2+π²ζ(3)/2−93ζ(5)/4+(7/2)ζ(3)log²2+7log⁵2/15−π²log³2/3−41π⁴log2/360
    println!("[{:?} total]", t0.elapsed());
}
