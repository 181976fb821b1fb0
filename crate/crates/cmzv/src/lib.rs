//! Exact symbolic-numeric evaluation of one-dimensional polylogarithmic
//! integrals and Apéry-like series in colored multiple zeta values (CMZVs)
//! of levels 1, 2 and 4.
//!
//! The crate is organized around one algebraic object: finite linear
//! combinations of words over the alphabet `{a, b_0, …, b_{N-1}}` with
//! coefficients in the cyclotomic field `Q(μ_N)`.  Everything else is a
//! view on, or a map out of, that object:
//!
//! * [`scalars`] — exact arithmetic in `Q(μ_N)` and rigorous complex balls;
//! * [`words`] — the Hoffman–Racinet algebras, shuffle and stuffle products,
//!   finite harmonic numbers;
//! * [`reg`] — shuffle regularization and bar-notation expansion;
//! * [`expr`] — symbolic CMZV terms, named constants, the word ↔ CMZV
//!   dictionary;
//! * [`numeric`] — certified evaluation of iterated integrals by path
//!   composition (geometric convergence at the midpoint split);
//! * [`reducer`] — dimension tables, double-shuffle relation generation and
//!   exact sparse reduction to a small basis of constants;
//! * [`ratfun`] — admissible rational functions, dlog decompositions and the
//!   orbit enumeration of admissible functions;
//! * [`integrator`] — the main algorithm: `∫₀¹ f(x)·Π Li_{w_i}(R_i(x)) dx`
//!   as an exact CMZV expression;
//! * [`series`] — central-binomial and binomial-ratio series, the D-operator
//!   calculus and rapidly convergent ω-word series;
//! * [`fl`] — symbolic Fourier–Legendre expansions, elliptic-K pairings and
//!   squared-binomial series;
//! * [`parser`] and [`cli`] — the expression grammar and the command-line
//!   front end.

pub mod ball;
pub mod cli;
pub mod expr;
pub mod fl;
pub mod integrator;
pub mod numeric;
pub mod oddsums;
pub mod parser;
pub mod quad;
pub mod ratfun;
pub mod reducer;
pub mod reg;
pub mod scalars;
pub mod series;
pub mod words;

mod book;

pub use ball::ComplexBall;
pub use scalars::{BigRat, CycRat};
pub use words::{Letter, Word, WordPoly, ZWord};
