use num_rational::BigRational;
use serde::Serializer;

/// Exact rationals serialize as `"num/den"` strings.
pub fn rational_str<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn opt_rational_str<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

pub fn bigint_str<S: Serializer>(n: &num_bigint::BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}
