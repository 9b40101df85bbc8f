//! Shared serialization helpers for machine-readable reports.

/// Version tag embedded in every JSON document the CLI emits.
pub const SCHEMA_VERSION: &str = "isetlab/1";

/// Exact integers as decimal strings; counts outgrow 64-bit JSON numbers.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
    }
}

/// Signed counterpart of [`decimal`].
pub mod signed_decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        BigInt::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
    }
}

/// [`decimal`] for optional values.
pub mod opt_decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| {
            BigUint::parse_bytes(t.as_bytes(), 10)
                .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {t:?}")))
        })
        .transpose()
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::{BigInt, BigUint};
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Probe {
        #[serde(with = "super::decimal")]
        a: BigUint,
        #[serde(with = "super::signed_decimal")]
        b: BigInt,
        #[serde(with = "super::opt_decimal")]
        c: Option<BigUint>,
    }

    #[test]
    fn decimals_round_trip() {
        let p = Probe {
            a: BigUint::from(10u32).pow(30),
            b: BigInt::from(-42),
            c: None,
        };
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"a":"1000000000000000000000000000000","b":"-42","c":null}"#
        );
        assert_eq!(serde_json::from_str::<Probe>(&text).unwrap(), p);
        assert!(serde_json::from_str::<Probe>(r#"{"a":"x","b":"1","c":null}"#).is_err());
    }
}
