//! The five-profile sample database used in examples and golden tests.

use crate::model::{GoldStandard, Profile, ProfileId, Schema};

/// `sample.csv` as shipped in the repository's `fixtures/` directory.
pub const SAMPLE_CSV: &str = include_str!("../../../fixtures/sample.csv");

pub fn sample_schema() -> Schema {
    Schema::with_attributes(["first_name", "last_name", "occupation", "city", "country"])
        .expect("sample schema is valid")
}

pub fn sample_profiles() -> Vec<Profile> {
    let mut rdr = csv::Reader::from_reader(SAMPLE_CSV.as_bytes());
    let headers = rdr.headers().expect("fixture header").clone();
    rdr.records()
        .map(|r| {
            let r = r.expect("fixture row");
            let mut p = Profile::new(&r[0]);
            for (h, v) in headers.iter().zip(r.iter()).skip(1) {
                p.set(h, v);
            }
            p
        })
        .collect()
}

/// Duplicates: (P1,P3) and (P4,P5).
pub fn sample_gold() -> GoldStandard {
    GoldStandard::from_clusters([
        vec![ProfileId::new("P1"), ProfileId::new("P3")],
        vec![ProfileId::new("P4"), ProfileId::new("P5")],
    ])
}

